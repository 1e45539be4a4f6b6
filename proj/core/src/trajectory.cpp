// Copyright 2026 The qtraj Authors
//
// Licensed under the Apache License, Version 2.0 (the "License");
// you may not use this file except in compliance with the License.
// You may obtain a copy of the License at
//
//     http://www.apache.org/licenses/LICENSE-2.0
//
// Unless required by applicable law or agreed to in writing, software
// distributed under the License is distributed on an "AS IS" BASIS,
// WITHOUT WARRANTIES OR CONDITIONS OF ANY KIND, either express or implied.
// See the License for the specific language governing permissions and
// limitations under the License.

#include "qtraj/trajectory.hpp"

#include <charconv>
#include <ostream>

#include "qtraj/errors.hpp"

namespace qtraj {

std::vector<std::string> trajectory_columns(TrajectoryKind kind) {
  std::vector<std::string> cols = {"t"};
  for (const char* who : {"p", "i", "r"}) {
    for (const char* q : {"x", "y", "z", "purity"}) cols.push_back(std::string(q) + "_" + who);
  }
  if (kind == TrajectoryKind::counting) {
    for (const char* c : {"tr_rho0", "tr_rho1", "tr_rho2", "lo_sign", "dead", "photon", "cpc",
                          "avalanche", "reset", "dark"})
      cols.emplace_back(c);
  } else {
    for (const char* c : {"v_mean", "v_var", "v_true"}) cols.emplace_back(c);
  }
  return cols;
}

std::string format_double(double v) {
  char buf[64];
  auto res = std::to_chars(buf, buf + sizeof(buf), v);
  return std::string(buf, res.ptr);
}

namespace {
void write_comments(std::ostream& os, const std::vector<std::string>& comments) {
  for (const auto& c : comments) os << c << '\n';
}

void write_state(std::ostream& os, const DensityOperator& rho) {
  auto b = rho.bloch();
  os << ',' << format_double(b.x) << ',' << format_double(b.y) << ',' << format_double(b.z)
     << ',' << format_double(purity(b));
}
}  // namespace

void write_trajectory_csv(std::ostream& os, const TripleTrajectory& traj,
                          const std::vector<std::string>& header_comments) {
  write_comments(os, header_comments);
  auto cols = trajectory_columns(traj.kind);
  for (std::size_t i = 0; i < cols.size(); ++i) os << (i ? "," : "") << cols[i];
  os << '\n';
  for (const auto& s : traj.samples) {
    os << format_double(s.t);
    write_state(os, s.perfect);
    write_state(os, s.intermediate);
    write_state(os, s.realistic);
    for (double d : s.detector) os << ',' << format_double(d);
    if (traj.kind == TrajectoryKind::counting) {
      os << ',' << s.lo_sign << ',' << int(s.dead);
      for (std::uint8_t f : {event::photon, event::cpc, event::avalanche, event::reset, event::dark})
        os << ',' << int((s.events & f) != 0);
    }
    os << '\n';
  }
}

void write_voltage_csv(std::ostream& os, const TripleTrajectory& traj,
                       const std::vector<std::string>& header_comments) {
  if (traj.kind != TrajectoryKind::homodyne) {
    throw InvalidArgument("voltage distribution is only recorded for homodyne runs");
  }
  write_comments(os, header_comments);
  os << "t";
  for (double v : traj.voltage_grid) os << ',' << format_double(v);
  os << '\n';
  for (std::size_t k = 0; k < traj.samples.size(); ++k) {
    os << format_double(traj.samples[k].t);
    for (double p : traj.voltage_distribution.at(k)) os << ',' << format_double(p);
    os << '\n';
  }
}

}  // namespace qtraj
