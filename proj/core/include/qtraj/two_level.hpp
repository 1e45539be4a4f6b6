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
#include <complex>
#include <string_view>

#include <Eigen/Core>

namespace qtraj {

using cplx = std::complex<double>;
using Mat2 = Eigen::Matrix2cd;
using Ket = Eigen::Vector2cd;

// Basis ordering is {|e>, |g>}; the lowering operator is |g><e|.
inline constexpr int kExcited = 0;
inline constexpr int kGround = 1;

inline constexpr double kPositivityTolerance = 1e-9;

namespace pauli {
Mat2 identity();
Mat2 x();
Mat2 y();
Mat2 z();
Mat2 lowering();
}  // namespace pauli

struct BlochVector {
  double x = 0.0;
  double y = 0.0;
  double z = 0.0;

  double length() const;
};

// Normalized, Hermitian 2x2 state. Construction goes through the named
// factories, which validate or enforce the invariants.
class DensityOperator {
 public:
  DensityOperator();  // ground state

  static DensityOperator ground();
  static DensityOperator excited();
  static DensityOperator maximally_mixed();
  static DensityOperator from_bloch(const BlochVector& b);
  static DensityOperator from_ket(const Ket& psi);
  // Rejects non-Hermitian input and traces away from one.
  static DensityOperator from_matrix(const Mat2& m, double tol = 1e-10);
  // Divides an unnormalized Hermitian operator by its trace.
  static DensityOperator normalize(const Mat2& m);

  const Mat2& matrix() const noexcept { return m_; }
  BlochVector bloch() const;
  double purity() const;

 private:
  explicit DensityOperator(const Mat2& m) : m_(m) {}
  Mat2 m_;
};

DensityOperator to_density(const BlochVector& b);
BlochVector to_bloch(const Mat2& rho, double tol = 1e-10);

double purity(const DensityOperator& rho);
double purity(const BlochVector& b);

// Eigenvalues of a Hermitian 2x2 matrix, ascending.
std::array<double, 2> hermitian_eigenvalues(const Mat2& m);

// Throws NumericalError if m has non-finite entries or an eigenvalue below
// -tol (relative to its trace when the trace is positive).
void check_physical(const Mat2& m, double tol = kPositivityTolerance,
                    std::string_view what = "state");

// True iff support(inner) lies inside support(outer), i.e. outer - eps*inner
// is positive for some eps > 0. Eigenvalues of outer below null_tol count as
// zero; inner may then have at most overlap_tol weight on those directions.
bool support_contains(const DensityOperator& outer, const DensityOperator& inner,
                      double null_tol = 1e-9, double overlap_tol = 1e-7);

}  // namespace qtraj
