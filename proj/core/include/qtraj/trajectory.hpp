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

#pragma once

#include <array>
#include <cstdint>
#include <iosfwd>
#include <string>
#include <vector>

#include "qtraj/two_level.hpp"

namespace qtraj {

enum class TrajectoryKind { counting, homodyne };

namespace event {
inline constexpr std::uint8_t photon = 1;     // perfect-record jump
inline constexpr std::uint8_t cpc = 2;        // charged-pair creation
inline constexpr std::uint8_t avalanche = 4;  // laboratory click
inline constexpr std::uint8_t reset = 8;      // detector ready again
inline constexpr std::uint8_t dark = 16;      // cpc caused by a dark count
}  // namespace event

struct TripleSample {
  double t = 0.0;
  DensityOperator perfect;
  DensityOperator intermediate;
  DensityOperator realistic;
  // Counting: Tr[rho_0], Tr[rho_1], Tr[rho_2] of the realistic supersystem.
  // Homodyne: mean and variance of the voltage distribution, true voltage.
  std::array<double, 3> detector{};
  int lo_sign = 0;            // adaptive counting only
  bool dead = false;          // realistic observer inside a dead window
  std::uint8_t events = 0;    // event flags since the previous sample
};

struct TripleTrajectory {
  TrajectoryKind kind = TrajectoryKind::counting;
  std::vector<TripleSample> samples;
  std::vector<double> voltage_grid;                      // homodyne only
  std::vector<std::vector<double>> voltage_distribution;  // one row per sample
};

std::vector<std::string> trajectory_columns(TrajectoryKind kind);

// Shortest decimal representation that round-trips.
std::string format_double(double v);

// Comment lines (already prefixed with '#') are written first, then the
// column header and one row per sample.
void write_trajectory_csv(std::ostream& os, const TripleTrajectory& traj,
                          const std::vector<std::string>& header_comments = {});
// Header row holds the grid voltages; each following row is t, P(v_0), ...
void write_voltage_csv(std::ostream& os, const TripleTrajectory& traj,
                       const std::vector<std::string>& header_comments = {});

}  // namespace qtraj
