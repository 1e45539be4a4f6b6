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

#include "qtraj/superoperators.hpp"

#include <string>

#include "qtraj/errors.hpp"

namespace qtraj {

Mat2 dissipator(const Mat2& a, const Mat2& rho) {
  Mat2 ada = a.adjoint() * a;
  return a * rho * a.adjoint() - 0.5 * (ada * rho + rho * ada);
}

Mat2 innovation(const Mat2& a, const Mat2& rho) {
  Mat2 s = a * rho + rho * a.adjoint();
  return s - s.trace() * rho;
}

Mat2 jump(const Mat2& a, const Mat2& rho) { return a * rho * a.adjoint(); }

Mat2 jump_update(const Mat2& a, const Mat2& rho) {
  Mat2 j = jump(a, rho);
  double p = j.trace().real();
  if (!(p > 0.0)) {
    throw DegenerateJump("jump requested from a state with jump probability " +
                         std::to_string(p));
  }
  return j / p - rho;
}

Mat2 apply_superoperator(SuperopKind kind, const Mat2& a, const Mat2& rho) {
  switch (kind) {
    case SuperopKind::dissipator:
      return dissipator(a, rho);
    case SuperopKind::innovation:
      return innovation(a, rho);
    case SuperopKind::jump:
      return jump(a, rho);
    case SuperopKind::jump_update:
      return jump_update(a, rho);
  }
  throw InvalidArgument("unknown superoperator kind");
}

Vec4 vec(const Mat2& m) { return Eigen::Map<const Vec4>(m.data()); }

Mat2 unvec(const Vec4& v) { return Eigen::Map<const Mat2>(v.data()); }

SuperMatrix sandwich(const Mat2& a, const Mat2& b) {
  // vec(a X b) = (b^T kron a) vec(X)
  SuperMatrix s;
  for (int i = 0; i < 2; ++i)
    for (int j = 0; j < 2; ++j) s.block<2, 2>(2 * i, 2 * j) = b(j, i) * a;
  return s;
}

SuperMatrix left_multiply(const Mat2& a) { return sandwich(a, Mat2::Identity()); }

SuperMatrix right_multiply(const Mat2& b) { return sandwich(Mat2::Identity(), b); }

SuperMatrix jump_matrix(const Mat2& a) { return sandwich(a, a.adjoint()); }

SuperMatrix dissipator_matrix(const Mat2& a) {
  Mat2 ada = a.adjoint() * a;
  return jump_matrix(a) - 0.5 * (left_multiply(ada) + right_multiply(ada));
}

SuperMatrix commutator_matrix(const Mat2& h) {
  const cplx i(0.0, 1.0);
  return -i * (left_multiply(h) - right_multiply(h));
}

SuperMatrix to_super_matrix(const std::function<Mat2(const Mat2&)>& map) {
  SuperMatrix s;
  for (int k = 0; k < 4; ++k) {
    Vec4 e = Vec4::Zero();
    e(k) = 1.0;
    s.col(k) = vec(map(unvec(e)));
  }
  return s;
}

}  // namespace qtraj
