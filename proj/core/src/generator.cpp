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

#include "qtraj/generator.hpp"

#include <algorithm>
#include <cmath>
#include <map>
#include <string>

#include "qtraj/errors.hpp"

namespace qtraj {

SparseGenerator::SparseGenerator(std::size_t dim, std::vector<GeneratorEntry> entries)
    : dim_(dim) {
  if (dim % 4 != 0) throw InvalidArgument("generator dimension must be a multiple of 4");
  std::sort(entries.begin(), entries.end(), [](const auto& a, const auto& b) {
    return a.row != b.row ? a.row < b.row : a.col < b.col;
  });
  for (const auto& e : entries) {
    if (e.row >= dim || e.col >= dim) {
      throw InvalidArgument("generator entry outside the supersystem dimension");
    }
    if (!entries_.empty() && entries_.back().row == e.row && entries_.back().col == e.col) {
      entries_.back().value += e.value;
    } else {
      entries_.push_back(e);
    }
  }
  std::erase_if(entries_, [](const auto& e) { return e.value == cplx(0.0); });
}

SupersystemState SparseGenerator::apply(const SupersystemState& in) const {
  if (in.size() != dim_) throw InvalidArgument("state dimension does not match generator");
  SupersystemState out(dim_, cplx(0.0));
  for (const auto& e : entries_) out[e.row] += e.value * in[e.col];
  return out;
}

Eigen::MatrixXcd SparseGenerator::to_dense() const {
  Eigen::MatrixXcd m = Eigen::MatrixXcd::Zero(dim_, dim_);
  for (const auto& e : entries_) m(e.row, e.col) += e.value;
  return m;
}

std::vector<cplx> SparseGenerator::column_trace_sums() const {
  std::vector<cplx> sums(dim_, cplx(0.0));
  for (const auto& e : entries_) {
    std::size_t local = e.row % 4;
    if (local == 0 || local == 3) sums[e.col] += e.value;
  }
  return sums;
}

SparseGenerator assemble_generator(std::size_t blocks, const std::vector<LinearTerm>& terms) {
  std::vector<GeneratorEntry> entries;
  entries.reserve(terms.size() * 16);
  for (const auto& t : terms) {
    if (t.target >= blocks || t.source >= blocks) {
      throw InvalidArgument("linear term refers to block " +
                            std::to_string(std::max(t.target, t.source)) + " of " +
                            std::to_string(blocks));
    }
    for (int r = 0; r < 4; ++r)
      for (int c = 0; c < 4; ++c) {
        cplx v = t.matrix(r, c);
        if (v != cplx(0.0)) entries.push_back({4 * t.target + r, 4 * t.source + c, v});
      }
  }
  return SparseGenerator(4 * blocks, std::move(entries));
}

void verify_trace_preserving(const SparseGenerator& g, double tol) {
  auto sums = g.column_trace_sums();
  for (std::size_t j = 0; j < sums.size(); ++j) {
    // Off-diagonal inputs enter the trace as a pair (ge, eg) that must cancel
    // for Hermitian input; diagonal inputs must give zero on their own.
    std::size_t local = j % 4;
    double drift = 0.0;
    if (local == 0 || local == 3) {
      drift = std::abs(sums[j]);
    } else if (local == 1) {
      drift = std::abs(sums[j] + sums[j + 1]) + std::abs(sums[j] - sums[j + 1]);
    }
    if (drift > tol) {
      throw NumericalError("generator is not trace preserving: column " + std::to_string(j) +
                           " drifts by " + std::to_string(drift));
    }
  }
}

SupersystemState euler_step(const SupersystemState& state, const SparseGenerator& g, double dt,
                            const SupersystemState& per_step) {
  if (!(dt > 0.0)) throw InvalidArgument("time step must be positive");
  if (!per_step.empty() && per_step.size() != state.size()) {
    throw InvalidArgument("per-step term dimension does not match the state");
  }
  SupersystemState out = g.apply(state);
  for (std::size_t i = 0; i < out.size(); ++i) {
    out[i] = state[i] + dt * out[i];
    if (!per_step.empty()) out[i] += per_step[i];
    if (!std::isfinite(out[i].real()) || !std::isfinite(out[i].imag())) {
      throw NumericalError("Euler step produced a non-finite value at index " + std::to_string(i));
    }
  }
  return out;
}

void pack_block(const Mat2& m, double* out) {
  out[0] = m(0, 0).real();
  out[1] = m(1, 0).real();
  out[2] = m(1, 0).imag();
  out[3] = m(1, 1).real();
}

Mat2 unpack_block(const double* in) {
  Mat2 m;
  m(0, 0) = in[0];
  m(1, 0) = cplx(in[1], in[2]);
  m(0, 1) = cplx(in[1], -in[2]);
  m(1, 1) = in[3];
  return m;
}

BlockOperator BlockOperator::compile(
    std::size_t blocks, const std::vector<std::pair<const SparseGenerator*, double>>& terms,
    bool add_identity) {
  // Accumulate complex 4x4 blocks keyed by (block row, block col).
  std::map<std::pair<std::size_t, std::size_t>, SuperMatrix> acc;
  auto block_at = [&acc](std::size_t r, std::size_t c) -> SuperMatrix& {
    auto [it, inserted] = acc.try_emplace({r, c});
    if (inserted) it->second.setZero();
    return it->second;
  };
  if (add_identity)
    for (std::size_t b = 0; b < blocks; ++b) block_at(b, b) += SuperMatrix::Identity();
  for (const auto& [g, w] : terms) {
    if (g->blocks() != blocks) throw InvalidArgument("generator block count mismatch");
    for (const auto& e : g->entries())
      block_at(e.row / 4, e.col / 4)(e.row % 4, e.col % 4) += w * e.value;
  }

  // Real coordinates r map to complex z = T r.
  Eigen::Matrix4cd t = Eigen::Matrix4cd::Zero();
  const cplx i(0.0, 1.0);
  t(0, 0) = 1.0;
  t(1, 1) = 1.0;
  t(1, 2) = i;
  t(2, 1) = 1.0;
  t(2, 2) = -i;
  t(3, 3) = 1.0;

  BlockOperator op;
  op.row_start_.assign(blocks + 1, 0);
  for (const auto& [key, sm] : acc) {
    Eigen::Matrix4cd w = sm * t;
    double scale = std::max(1.0, w.cwiseAbs().maxCoeff());
    for (int c = 0; c < 4; ++c) {
      bool hermitian = std::abs(w(0, c).imag()) <= 1e-12 * scale &&
                       std::abs(w(3, c).imag()) <= 1e-12 * scale &&
                       std::abs(w(2, c) - std::conj(w(1, c))) <= 1e-12 * scale;
      if (!hermitian) throw InvalidArgument("generator does not preserve Hermiticity");
    }
    Entry e{};
    e.source = static_cast<std::uint32_t>(key.second);
    for (int c = 0; c < 4; ++c) {
      e.m[0 * 4 + c] = w(0, c).real();
      e.m[1 * 4 + c] = w(1, c).real();
      e.m[2 * 4 + c] = w(1, c).imag();
      e.m[3 * 4 + c] = w(3, c).real();
    }
    op.entries_.push_back(e);
    ++op.row_start_[key.first + 1];
  }
  for (std::size_t b = 0; b < blocks; ++b) op.row_start_[b + 1] += op.row_start_[b];
  return op;
}

void BlockOperator::apply(const double* in, double* out) const {
  const std::size_t nb = blocks();
  for (std::size_t r = 0; r < nb; ++r) {
    double o0 = 0.0, o1 = 0.0, o2 = 0.0, o3 = 0.0;
    for (std::uint32_t k = row_start_[r]; k < row_start_[r + 1]; ++k) {
      const Entry& e = entries_[k];
      const double* x = in + 4 * e.source;
      const double* m = e.m;
      o0 += m[0] * x[0] + m[1] * x[1] + m[2] * x[2] + m[3] * x[3];
      o1 += m[4] * x[0] + m[5] * x[1] + m[6] * x[2] + m[7] * x[3];
      o2 += m[8] * x[0] + m[9] * x[1] + m[10] * x[2] + m[11] * x[3];
      o3 += m[12] * x[0] + m[13] * x[1] + m[14] * x[2] + m[15] * x[3];
    }
    double* y = out + 4 * r;
    y[0] = o0;
    y[1] = o1;
    y[2] = o2;
    y[3] = o3;
  }
}

}  // namespace qtraj
