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

#include "qtraj/two_level.hpp"

#include <cmath>

#include <Eigen/Eigenvalues>

#include "qtraj/errors.hpp"

namespace qtraj {

namespace pauli {
Mat2 identity() { return Mat2::Identity(); }
Mat2 x() {
  Mat2 m;
  m << 0, 1, 1, 0;
  return m;
}
Mat2 y() {
  Mat2 m;
  m << 0, cplx(0, -1), cplx(0, 1), 0;
  return m;
}
Mat2 z() {
  Mat2 m;
  m << 1, 0, 0, -1;
  return m;
}
Mat2 lowering() {
  Mat2 m;
  m << 0, 0, 1, 0;
  return m;
}
}  // namespace pauli

double BlochVector::length() const { return std::sqrt(x * x + y * y + z * z); }

DensityOperator::DensityOperator() : DensityOperator(ground()) {}

DensityOperator DensityOperator::ground() {
  Mat2 m = Mat2::Zero();
  m(kGround, kGround) = 1.0;
  return DensityOperator(m);
}

DensityOperator DensityOperator::excited() {
  Mat2 m = Mat2::Zero();
  m(kExcited, kExcited) = 1.0;
  return DensityOperator(m);
}

DensityOperator DensityOperator::maximally_mixed() {
  return DensityOperator(Mat2::Identity() * 0.5);
}

DensityOperator DensityOperator::from_bloch(const BlochVector& b) {
  if (!std::isfinite(b.x) || !std::isfinite(b.y) || !std::isfinite(b.z)) {
    throw InvalidArgument("Bloch vector has non-finite components");
  }
  if (b.length() > 1.0 + kPositivityTolerance) {
    throw InvalidArgument("Bloch vector longer than one: " + std::to_string(b.length()));
  }
  Mat2 m = 0.5 * (pauli::identity() + b.x * pauli::x() + b.y * pauli::y() +
                  b.z * pauli::z());
  return DensityOperator(m);
}

DensityOperator DensityOperator::from_ket(const Ket& psi) {
  double n = psi.squaredNorm();
  if (!(n > 0.0) || !std::isfinite(n)) {
    throw NumericalError("cannot build a state from a zero or non-finite ket");
  }
  Mat2 m = psi * psi.adjoint() / n;
  m(0, 0) = m(0, 0).real();
  m(1, 1) = m(1, 1).real();
  m(1, 0) = std::conj(m(0, 1));
  return DensityOperator(m);
}

DensityOperator DensityOperator::from_matrix(const Mat2& m, double tol) {
  if (!m.allFinite()) throw InvalidArgument("matrix has non-finite entries");
  if ((m - m.adjoint()).cwiseAbs().maxCoeff() > tol) {
    throw InvalidArgument("matrix is not Hermitian");
  }
  if (std::abs(m.trace() - 1.0) > tol) {
    throw InvalidArgument("matrix does not have unit trace");
  }
  Mat2 h = 0.5 * (m + m.adjoint());
  return DensityOperator(h);
}

DensityOperator DensityOperator::normalize(const Mat2& m) {
  double tr = m.trace().real();
  if (!(tr > 0.0) || !std::isfinite(tr) || !m.allFinite()) {
    throw NumericalError("cannot normalize an operator with trace " +
                         std::to_string(tr));
  }
  Mat2 h = 0.5 * (m + m.adjoint()) / tr;
  return DensityOperator(h);
}

BlochVector DensityOperator::bloch() const {
  return {2.0 * m_(kExcited, kGround).real(), -2.0 * m_(kExcited, kGround).imag(),
          (m_(kExcited, kExcited) - m_(kGround, kGround)).real()};
}

double DensityOperator::purity() const { return qtraj::purity(bloch()); }

DensityOperator to_density(const BlochVector& b) { return DensityOperator::from_bloch(b); }

BlochVector to_bloch(const Mat2& rho, double tol) {
  return DensityOperator::from_matrix(rho, tol).bloch();
}

double purity(const BlochVector& b) {
  return 0.5 * (1.0 + b.x * b.x + b.y * b.y + b.z * b.z);
}

double purity(const DensityOperator& rho) { return purity(rho.bloch()); }

std::array<double, 2> hermitian_eigenvalues(const Mat2& m) {
  double a = m(0, 0).real();
  double d = m(1, 1).real();
  double mid = 0.5 * (a + d);
  double r = std::hypot(0.5 * (a - d), std::abs(m(0, 1)));
  return {mid - r, mid + r};
}

void check_physical(const Mat2& m, double tol, std::string_view what) {
  if (!m.allFinite()) {
    throw NumericalError(std::string(what) + ": non-finite entries");
  }
  double tr = m.trace().real();
  if (tr < -tol) {
    throw NumericalError(std::string(what) + ": negative trace " + std::to_string(tr));
  }
  double scale = tr > 0.0 ? tr : 1.0;
  auto ev = hermitian_eigenvalues(m);
  if (ev[0] < -tol * scale) {
    throw NumericalError(std::string(what) + ": eigenvalue " + std::to_string(ev[0] / scale) +
                         " below positivity tolerance");
  }
}

bool support_contains(const DensityOperator& outer, const DensityOperator& inner,
                      double null_tol, double overlap_tol) {
  Eigen::SelfAdjointEigenSolver<Mat2> es(outer.matrix());
  for (int i = 0; i < 2; ++i) {
    if (es.eigenvalues()(i) > null_tol) continue;
    Ket v = es.eigenvectors().col(i);
    double w = (v.adjoint() * inner.matrix() * v)(0, 0).real();
    if (w > overlap_tol) return false;
  }
  return true;
}

}  // namespace qtraj
