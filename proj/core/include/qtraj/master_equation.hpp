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

#include "qtraj/superoperators.hpp"
#include "qtraj/two_level.hpp"

namespace qtraj {

// Resonantly driven, radiatively damped two-level atom. Rates are in units of
// the decay rate, so gamma is 1 unless a test says otherwise.
struct SystemParams {
  double omega = 10.0;
  double gamma = 1.0;

  void validate() const;
};

Mat2 hamiltonian(const SystemParams& p);        // (omega/2) sigma_x
Mat2 lowering_operator(const SystemParams& p);  // sqrt(gamma) sigma

// A = iH + c^+c/2 + mu* c + |mu|^2/2. With a local oscillator of amplitude mu
// the no-detection evolution is rho -> rho - dt (A rho + rho A^+) and the
// detection operator is c + mu. mu = 0 gives the usual effective Hamiltonian
// generator K = iH + c^+c/2.
Mat2 no_jump_operator(const SystemParams& p, cplx mu = 0.0);

Mat2 liouvillian(const SystemParams& p, const Mat2& rho);
SuperMatrix liouvillian_matrix(const SystemParams& p);

DensityOperator me_steady_state(const SystemParams& p);
double me_steady_purity(const SystemParams& p);

// (p - p_me) / (1 - p_me); undefined for an undriven atom where p_me = 1.
double scaled_purity(double p, double p_me);

enum class CountingScheme { direct, adaptive };

double photon_flux(CountingScheme scheme, const SystemParams& p);
double adaptive_lo_amplitude(const SystemParams& p);  // sqrt(gamma)/2

// (1 - dt a) rho (1 - dt a)^+, the completely positive form of the first-order
// step rho - dt (a rho + rho a^+).
Mat2 kraus_drift(const Mat2& a, const Mat2& rho, double dt);

// One normalized step of the unconditioned master equation in the same
// Kraus form the observers use during dead windows.
Mat2 me_step(const SystemParams& p, const Mat2& rho, double dt);

}  // namespace qtraj
