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

namespace qtraj {

// Degenerate parametric oscillator below threshold, x quadrature monitored by
// a photoreceiver. k = (1 - chi)/2 is the decay rate of the x quadrature.
struct DpoParams {
  double chi = 0.5;
  double gamma = 1.0;
  double noise = 0.1;
  double eta = 1.0;

  double k() const noexcept { return 0.5 * (1.0 - chi); }
  double bandwidth() const;  // gamma / sqrt(N)
  void validate() const;
};

struct Covariances {
  double dx = 1.0;
  double dv = 1.0;
  double dxv = 0.0;
};

struct KalmanMoments {
  double mean_x = 0.0;
  double mean_v = 0.0;
  Covariances cov;
};

double unconditioned_x_variance(double chi);  // 1/(1 - chi)
double unconditioned_y_variance(double chi);  // 1/(1 + chi)

Covariances covariance_rates(const DpoParams& p, const Covariances& c);

// Throws NumericalError unless dx > 0, dv > 0 and dx dv >= dxv^2.
void check_covariances(const Covariances& c);

// One Euler step of the conditional means and covariances, driven by the
// voltage-record innovation dw.
KalmanMoments kalman_step(const KalmanMoments& m, const DpoParams& p, double dt, double dw);

// Deterministic covariance flow integrated for a duration (fourth-order
// Runge-Kutta with the given step).
Covariances integrate_covariances(const DpoParams& p, Covariances c, double duration, double h);

// Fixpoint of the covariance equations: integration to convergence followed
// by Newton polishing.
Covariances steady_covariances(const DpoParams& p);

// Steady variances of the small-N limit at fixed B = gamma/sqrt(N), in the
// rescaled form dv N^{1/2} and dxv N^{1/4}.
Covariances scaled_steady_covariances(double b, double k, double eta);

double gaussian_purity(double dx, double dy);

// Closed-form purity as a function of B, k and eta.
double purity_closed_form(double b, double k, double eta);

// Purity of the unconditioned steady state, 2 sqrt(k (1 - k)).
double dpo_me_purity(double k);

// Leading coefficients of the small-B and large-B expansions at eta = 1:
// p ~ p_me + c_small B^2 and p ~ 1 - c_large / B.
double small_bandwidth_coefficient(double k);
double large_bandwidth_coefficient(double k);

}  // namespace qtraj
