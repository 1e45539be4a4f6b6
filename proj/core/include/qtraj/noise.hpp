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

#include <cstdint>
#include <random>

namespace qtraj {

// Seeded source of Wiener increments and uniform deviates. A stream is
// identified by (seed, stream, substream); equal identifiers give equal
// sequences, and distinct substreams are used for independent noise sources
// of one trajectory so that adding draws to one source never shifts another.
class NoiseStream {
 public:
  NoiseStream(std::uint64_t seed, std::uint64_t stream, std::uint64_t substream = 0);

  double gaussian();           // N(0, 1)
  double wiener(double dt);    // N(0, dt)
  double uniform();            // (0, 1]
  bool bernoulli(double p);

  std::uint64_t seed() const noexcept { return seed_; }
  std::uint64_t counter() const noexcept { return counter_; }

 private:
  std::uint64_t seed_;
  std::uint64_t counter_ = 0;
  std::mt19937_64 engine_;
  std::normal_distribution<double> normal_;
};

}  // namespace qtraj
