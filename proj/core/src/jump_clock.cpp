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

#include "qtraj/jump_clock.hpp"

#include <cmath>
#include <string>

#include "qtraj/errors.hpp"

namespace qtraj {

namespace {
void check_threshold(double r) {
  if (!(r > 0.0) || !(r <= 1.0)) {
    throw InvalidArgument("uniform deviate must lie in (0, 1], got " + std::to_string(r));
  }
}
}  // namespace

double draw_response_time(double r, double gamma_r, double tau_dd) {
  check_threshold(r);
  if (!(gamma_r > 0.0)) throw InvalidArgument("response rate must be positive");
  if (!(tau_dd >= 0.0)) throw InvalidArgument("dead time must be non-negative");
  if (std::isinf(gamma_r)) return tau_dd;
  return -std::log(r) / gamma_r + tau_dd;
}

JumpClock::JumpClock(double threshold, double tolerance)
    : threshold_(threshold), tolerance_(tolerance) {
  check_threshold(threshold);
}

bool JumpClock::fires(double norm) {
  if (!std::isfinite(norm)) throw NumericalError("no-jump norm is not finite");
  if (norm > last_norm_ + tolerance_) {
    throw NumericalError("no-jump norm increased from " + std::to_string(last_norm_) + " to " +
                         std::to_string(norm));
  }
  last_norm_ = norm;
  return norm <= threshold_;
}

void JumpClock::rearm(double threshold) {
  check_threshold(threshold);
  threshold_ = threshold;
  last_norm_ = 1.0;
}

std::optional<std::size_t> jump_by_norm(std::span<const double> norms, double r,
                                        double tolerance) {
  JumpClock clock(r, tolerance);
  for (std::size_t i = 0; i < norms.size(); ++i) {
    if (clock.fires(norms[i])) return i;
  }
  return std::nullopt;
}

}  // namespace qtraj
