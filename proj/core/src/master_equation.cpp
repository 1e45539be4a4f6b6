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

#include "qtraj/master_equation.hpp"

#include <cmath>
#include <string>

#include "qtraj/errors.hpp"

namespace qtraj {

void SystemParams::validate() const {
  if (!(omega >= 0.0) || !std::isfinite(omega)) {
    throw InvalidArgument("system.omega must be finite and >= 0, got " + std::to_string(omega));
  }
  if (!(gamma > 0.0) || !std::isfinite(gamma)) {
    throw InvalidArgument("system.gamma must be finite and > 0, got " + std::to_string(gamma));
  }
}

Mat2 hamiltonian(const SystemParams& p) { return 0.5 * p.omega * pauli::x(); }

Mat2 lowering_operator(const SystemParams& p) { return std::sqrt(p.gamma) * pauli::lowering(); }

Mat2 no_jump_operator(const SystemParams& p, cplx mu) {
  const cplx i(0.0, 1.0);
  Mat2 c = lowering_operator(p);
  return i * hamiltonian(p) + 0.5 * c.adjoint() * c + std::conj(mu) * c +
         0.5 * std::norm(mu) * Mat2::Identity();
}

Mat2 liouvillian(const SystemParams& p, const Mat2& rho) {
  const cplx i(0.0, 1.0);
  Mat2 h = hamiltonian(p);
  return -i * (h * rho - rho * h) + dissipator(lowering_operator(p), rho);
}

SuperMatrix liouvillian_matrix(const SystemParams& p) {
  return commutator_matrix(hamiltonian(p)) + dissipator_matrix(lowering_operator(p));
}

DensityOperator me_steady_state(const SystemParams& p) {
  double o2 = p.omega * p.omega;
  double g2 = p.gamma * p.gamma;
  double den = 2.0 * o2 + g2;
  return DensityOperator::from_bloch({0.0, 2.0 * p.omega * p.gamma / den, -g2 / den});
}

double me_steady_purity(const SystemParams& p) {
  double o2 = p.omega * p.omega;
  double r = o2 / (2.0 * o2 + p.gamma * p.gamma);
  return 1.0 - 2.0 * r * r;
}

double scaled_purity(double p, double p_me) {
  if (!(p_me < 1.0)) {
    throw InvalidArgument("scaled purity is undefined when the master-equation purity is 1");
  }
  return (p - p_me) / (1.0 - p_me);
}

double photon_flux(CountingScheme scheme, const SystemParams& p) {
  if (scheme == CountingScheme::adaptive) return 0.25 * p.gamma;
  double o2 = p.omega * p.omega;
  return p.gamma * o2 / (2.0 * o2 + p.gamma * p.gamma);
}

double adaptive_lo_amplitude(const SystemParams& p) { return 0.5 * std::sqrt(p.gamma); }

Mat2 kraus_drift(const Mat2& a, const Mat2& rho, double dt) {
  Mat2 m = Mat2::Identity() - dt * a;
  return m * rho * m.adjoint();
}

Mat2 me_step(const SystemParams& p, const Mat2& rho, double dt) {
  Mat2 c = lowering_operator(p);
  Mat2 out = kraus_drift(no_jump_operator(p), rho, dt) + dt * jump(c, rho);
  return out / out.trace().real();
}

}  // namespace qtraj
