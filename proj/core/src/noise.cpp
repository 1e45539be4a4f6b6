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

#include "qtraj/noise.hpp"

#include <cmath>

namespace qtraj {

namespace {
std::mt19937_64 make_engine(std::uint64_t seed, std::uint64_t stream, std::uint64_t sub) {
  auto lo = [](std::uint64_t v) { return static_cast<std::uint32_t>(v & 0xffffffffu); };
  auto hi = [](std::uint64_t v) { return static_cast<std::uint32_t>(v >> 32); };
  std::seed_seq seq{lo(seed), hi(seed), lo(stream), hi(stream), lo(sub), hi(sub)};
  return std::mt19937_64(seq);
}
}  // namespace

NoiseStream::NoiseStream(std::uint64_t seed, std::uint64_t stream, std::uint64_t substream)
    : seed_(seed), engine_(make_engine(seed, stream, substream)) {}

double NoiseStream::gaussian() {
  ++counter_;
  return normal_(engine_);
}

double NoiseStream::wiener(double dt) { return std::sqrt(dt) * gaussian(); }

double NoiseStream::uniform() {
  ++counter_;
  // 53 random bits in [0, 1), reflected to (0, 1].
  double u = static_cast<double>(engine_() >> 11) * 0x1.0p-53;
  return 1.0 - u;
}

bool NoiseStream::bernoulli(double p) { return uniform() <= p; }

}  // namespace qtraj
