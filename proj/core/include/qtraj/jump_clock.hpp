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

#include <cstddef>
#include <optional>
#include <span>

namespace qtraj {

// Delay from charged-pair creation to the end of the dead time:
// -ln(R)/gamma_r + tau_dd. An infinite gamma_r gives tau_dd.
double draw_response_time(double r, double gamma_r, double tau_dd);

// Waiting-time clock for quantum jumps: the unnormalized no-jump norm is
// compared against a uniform threshold and a jump fires when the norm first
// drops below it.
class JumpClock {
 public:
  explicit JumpClock(double threshold, double tolerance = 1e-12);

  // Feeds the current no-jump norm; returns true when the jump fires.
  bool fires(double norm);
  // New threshold after a jump; the norm history restarts at 1.
  void rearm(double threshold);

  double threshold() const noexcept { return threshold_; }

 private:
  double threshold_;
  double tolerance_;
  double last_norm_ = 1.0;
};

// Index of the first entry of a no-jump norm history that falls below r, or
// nullopt if none does.
std::optional<std::size_t> jump_by_norm(std::span<const double> norms, double r,
                                        double tolerance = 1e-12);

}  // namespace qtraj
