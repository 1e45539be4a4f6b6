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
#include <cstdint>
#include <utility>
#include <vector>

#include <Eigen/Core>

#include "qtraj/superoperators.hpp"

namespace qtraj {

// Flat supersystem vector: block s occupies entries [4s, 4s+4) and holds
// vec(rho_s) in the (ee, ge, eg, gg) order.
using SupersystemState = std::vector<cplx>;

struct GeneratorEntry {
  std::size_t row = 0;
  std::size_t col = 0;
  cplx value;
};

// Linear map on the flat supersystem vector stored as coalesced triples.
class SparseGenerator {
 public:
  SparseGenerator() = default;
  SparseGenerator(std::size_t dim, std::vector<GeneratorEntry> entries);

  std::size_t dim() const noexcept { return dim_; }
  std::size_t blocks() const noexcept { return dim_ / 4; }
  const std::vector<GeneratorEntry>& entries() const noexcept { return entries_; }

  SupersystemState apply(const SupersystemState& in) const;
  Eigen::MatrixXcd to_dense() const;

  // Rate of change of the total trace sum_s Tr[rho_s] per unit of each input
  // coordinate.
  std::vector<cplx> column_trace_sums() const;

 private:
  std::size_t dim_ = 0;
  std::vector<GeneratorEntry> entries_;
};

// target block += matrix * source block
struct LinearTerm {
  std::size_t target = 0;
  std::size_t source = 0;
  SuperMatrix matrix;
};

SparseGenerator assemble_generator(std::size_t blocks, const std::vector<LinearTerm>& terms);

// Throws NumericalError if the generator changes the total trace of any input
// by more than tol (checked on every column).
void verify_trace_preserving(const SparseGenerator& g, double tol = 1e-12);

// state + dt * (g state) + per_step; per_step may be empty.
SupersystemState euler_step(const SupersystemState& state, const SparseGenerator& g, double dt,
                            const SupersystemState& per_step = {});

// Real form of a Hermitian block: (rho_ee, Re rho_ge, Im rho_ge, rho_gg).
void pack_block(const Mat2& m, double* out);
Mat2 unpack_block(const double* in);

// Hermiticity-preserving linear map compiled to real 4x4 blocks stored in
// block-row compressed form. Used for the per-step hot loops.
class BlockOperator {
 public:
  BlockOperator() = default;

  // identity (optional) + sum_i weight_i * g_i
  static BlockOperator compile(std::size_t blocks,
                               const std::vector<std::pair<const SparseGenerator*, double>>& terms,
                               bool add_identity);

  std::size_t blocks() const noexcept { return row_start_.empty() ? 0 : row_start_.size() - 1; }
  std::size_t nonzero_blocks() const noexcept { return entries_.size(); }

  // out = op * in; the buffers must not alias.
  void apply(const double* in, double* out) const;

 private:
  struct Entry {
    std::uint32_t source;
    double m[16];
  };
  std::vector<std::uint32_t> row_start_;
  std::vector<Entry> entries_;
};

}  // namespace qtraj
