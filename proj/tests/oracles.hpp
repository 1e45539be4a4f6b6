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

// Reference computations written independently of the library code paths.

#include <cmath>
#include <complex>

#include <Eigen/Dense>
#include <unsupported/Eigen/KroneckerProduct>
#include <unsupported/Eigen/MatrixFunctions>

namespace oracle {

using cplx = std::complex<double>;
using M2 = Eigen::Matrix2cd;
using M4 = Eigen::Matrix4cd;

// Basis {e, g}.
inline M2 sigma() {
  M2 s = M2::Zero();
  s(1, 0) = 1.0;
  return s;
}

inline M2 sx() {
  M2 s;
  s << 0, 1, 1, 0;
  return s;
}

// Column-major vec: vec(A X B) = (B^T kron A) vec(X).
inline M4 lindblad(double omega, double gamma) {
  const M2 id = M2::Identity();
  const M2 h = 0.5 * omega * sx();
  const M2 c = std::sqrt(gamma) * sigma();
  const M2 cdc = c.adjoint() * c;
  const cplx i(0.0, 1.0);
  M4 l = -i * (Eigen::kroneckerProduct(id, h).eval() - Eigen::kroneckerProduct(h.transpose(), id).eval());
  l += Eigen::kroneckerProduct(c.conjugate(), c).eval();
  l -= 0.5 * Eigen::kroneckerProduct(id, cdc).eval();
  l -= 0.5 * Eigen::kroneckerProduct(cdc.transpose(), id).eval();
  return l;
}

inline Eigen::Vector4cd vec(const M2& m) {
  return Eigen::Vector4cd(m(0, 0), m(1, 0), m(0, 1), m(1, 1));
}

inline M2 unvec(const Eigen::Vector4cd& v) {
  M2 m;
  m << v(0), v(2), v(1), v(3);
  return m;
}

// exp(L t) rho
inline M2 me_propagate(double omega, double gamma, const M2& rho, double t) {
  M4 prop = (lindblad(omega, gamma) * t).exp();
  return unvec(prop * vec(rho));
}

// Optical Bloch equations steady state for H = (omega/2) sigma_x, solved as
// a 3x3 linear system in (x, y, z).
inline Eigen::Vector3d bloch_steady(double omega, double gamma) {
  Eigen::Matrix3d a;
  a << -gamma / 2, 0, 0, 0, -gamma / 2, -omega, 0, omega, -gamma;
  Eigen::Vector3d b(0, 0, gamma);
  return a.colPivHouseholderQr().solve(b);
}

inline double bloch_purity(const Eigen::Vector3d& r) { return 0.5 * (1.0 + r.squaredNorm()); }

}  // namespace oracle
