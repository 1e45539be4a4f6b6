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

#include <functional>

#include <Eigen/Core>

#include "qtraj/two_level.hpp"

namespace qtraj {

// Superoperators act on the column-major vectorization of a 2x2 operator,
// i.e. on (rho_ee, rho_ge, rho_eg, rho_gg).
using SuperMatrix = Eigen::Matrix4cd;
using Vec4 = Eigen::Vector4cd;

enum class SuperopKind {
  dissipator,   // D[A] rho = A rho A^+ - (A^+A rho + rho A^+A)/2
  innovation,   // H[A] rho = A rho + rho A^+ - Tr[A rho + rho A^+] rho
  jump,         // J[A] rho = A rho A^+
  jump_update,  // G[A] rho = J[A] rho / Tr[J[A] rho] - rho
};

Mat2 dissipator(const Mat2& a, const Mat2& rho);
Mat2 innovation(const Mat2& a, const Mat2& rho);
Mat2 jump(const Mat2& a, const Mat2& rho);
// Throws DegenerateJump when Tr[A rho A^+] vanishes.
Mat2 jump_update(const Mat2& a, const Mat2& rho);

Mat2 apply_superoperator(SuperopKind kind, const Mat2& a, const Mat2& rho);

Vec4 vec(const Mat2& m);
Mat2 unvec(const Vec4& v);

// rho -> a rho b
SuperMatrix sandwich(const Mat2& a, const Mat2& b);
SuperMatrix left_multiply(const Mat2& a);
SuperMatrix right_multiply(const Mat2& b);
SuperMatrix jump_matrix(const Mat2& a);
SuperMatrix dissipator_matrix(const Mat2& a);
// rho -> -i[h, rho]
SuperMatrix commutator_matrix(const Mat2& h);

// Matrix of an arbitrary linear map, built column by column.
SuperMatrix to_super_matrix(const std::function<Mat2(const Mat2&)>& map);

}  // namespace qtraj
