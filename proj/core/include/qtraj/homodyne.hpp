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

#include <cstdint>
#include <memory>
#include <vector>

#include "qtraj/generator.hpp"
#include "qtraj/master_equation.hpp"
#include "qtraj/noise.hpp"
#include "qtraj/trajectory.hpp"

namespace qtraj {

// Photoreceiver: RC bandwidth, electronic-to-vacuum noise ratio, photodiode
// efficiency and local-oscillator phase (0 measures x, -pi/2 measures y).
struct PrParams {
  double gamma = 1.5;
  double noise = 0.1;
  double eta = 0.98;
  double phi = 0.0;

  void validate() const;
};

enum class Quadrature { x, y };
double lo_phase(Quadrature q);

// Electronic noise ratio from a noise-equivalent power (W/sqrt(Hz)), local
// oscillator power (W) and wavelength (m).
double nep_to_noise(double nep, double power, double wavelength);

struct HomodyneOperators {
  Mat2 c;      // sqrt(gamma) sigma
  Mat2 c_phi;  // exp(-i phi) c
  Mat2 k;      // iH + c^+c/2
};

HomodyneOperators homodyne_operators(const SystemParams& sys, double phi);

// <c_phi + c_phi^+>
double quadrature_expectation(const Mat2& c_phi, const Mat2& rho);
double quadrature_expectation(const Mat2& c_phi, const Ket& psi);

// Perfect homodyne step on a normalized ket, driven by the vacuum-noise
// increment dw. Returns the measured record increment <x_phi> dt + dw.
double perfect_homodyne_step(Ket& psi, const HomodyneOperators& ops, double dt, double dw);

// Normalized photocurrent increment available inside the receiver:
// sqrt(eta) <x_phi> dt + sqrt(eta) dw_xi + sqrt(1 - eta) dw_zeta, with the
// expectation taken in the perfect observer's state.
double homodyne_current(double eta, double x_true, double dt, double dw_xi, double dw_zeta);

// Inefficient-detection update conditioned on a current increment. rho is
// replaced by its normalized successor.
void intermediate_homodyne_step(Mat2& rho, const HomodyneOperators& ops, double eta, double dt,
                                double current);

// Capacitor voltage of the device, driven by the same current increment.
double true_voltage_step(double v, double current, const PrParams& pr, double dt);

// sqrt(gamma) dW_J + gamma (v_true - <v>) dt
double correlated_innovation(double gamma, double dw_johnson, double v_true, double v_mean,
                             double dt);

struct GridOptions {
  std::size_t points = 100;
  double span_sigmas = 7.0;
  double edge_mass_limit = 1e-4;
};

// Uniform voltage grid centred on zero spanning +-span_sigmas unconditioned
// standard deviations sqrt(1/2N).
struct VoltageGrid {
  std::vector<double> v;
  double dv = 0.0;
  double sigma = 0.0;

  static VoltageGrid for_noise(double noise, const GridOptions& options = {});
  std::size_t size() const noexcept { return v.size(); }
};

// Stationary OU density sampled on the grid and normalized so that
// sum_j P_j dv = 1.
std::vector<double> ou_initial_distribution(const PrParams& pr, const VoltageGrid& grid);

// Voltage diffusion and damping only, in zero-flux finite-volume form.
SparseGenerator ou_generator(const PrParams& pr, const VoltageGrid& grid);
// Full linear part of the realistic filtering equation on the grid.
SparseGenerator homodyne_generator(const SystemParams& sys, const PrParams& pr,
                                   const VoltageGrid& grid);
// dt^2 K rho_j K^+ completion of the system part on every grid block.
SparseGenerator homodyne_completion(const SystemParams& sys, const VoltageGrid& grid);

class HomodyneGridModel {
 public:
  HomodyneGridModel(const SystemParams& sys, const PrParams& pr, double dt,
                    const GridOptions& options = {});

  const SystemParams& system() const noexcept { return sys_; }
  const PrParams& detector() const noexcept { return pr_; }
  const VoltageGrid& grid() const noexcept { return grid_; }
  const GridOptions& options() const noexcept { return options_; }
  const SparseGenerator& generator() const noexcept { return generator_; }
  const BlockOperator& step_operator() const noexcept { return step_; }
  const HomodyneOperators& operators() const noexcept { return ops_; }
  double dt() const noexcept { return dt_; }

 private:
  SystemParams sys_;
  PrParams pr_;
  double dt_;
  GridOptions options_;
  VoltageGrid grid_;
  HomodyneOperators ops_;
  SparseGenerator generator_;
  BlockOperator step_;
};

// Realistic observer: one unnormalized system block per grid voltage,
// renormalized every step.
class RealisticHomodyneObserver {
 public:
  RealisticHomodyneObserver(std::shared_ptr<const HomodyneGridModel> model,
                            const DensityOperator& initial);

  // innovation is sqrt(gamma) dW_J in standalone mode or the correlated form.
  void step(double innovation);

  double mean_voltage() const noexcept { return mean_; }
  double voltage_variance() const noexcept { return variance_; }
  std::vector<double> distribution() const;  // P(v_j)
  double edge_mass() const;
  DensityOperator state() const;  // sum_j rho_j dv
  Mat2 block(std::size_t j) const;

 private:
  void refresh_moments();

  std::shared_ptr<const HomodyneGridModel> model_;
  std::vector<double> x_;
  std::vector<double> scratch_;
  double mean_ = 0.0;
  double variance_ = 0.0;
};

struct HomodyneRunOptions {
  double dt = 1e-5;
  double sample_interval = 0.01;
  GridOptions grid;
  bool record_distribution = true;
};

// Perfect, intermediate and realistic homodyne observers plus the true
// capacitor voltage, advanced in lockstep from three Wiener streams.
class HomodyneTripleSimulator {
 public:
  HomodyneTripleSimulator(const SystemParams& sys, const PrParams& pr, double dt,
                          std::uint64_t seed, std::uint64_t stream = 0,
                          const GridOptions& grid = {});

  void step();
  TripleSample sample() const;

  std::int64_t steps() const noexcept { return step_; }
  double time() const noexcept { return static_cast<double>(step_) * dt_; }
  double true_voltage() const noexcept { return v_true_; }
  const Ket& perfect_ket() const noexcept { return psi_; }
  const Mat2& intermediate_matrix() const noexcept { return rho_i_; }
  const RealisticHomodyneObserver& realistic() const noexcept { return realistic_; }

 private:
  double dt_;
  std::shared_ptr<const HomodyneGridModel> model_;
  NoiseStream xi_;
  NoiseStream zeta_;
  NoiseStream johnson_;
  Ket psi_;
  Mat2 rho_i_;
  RealisticHomodyneObserver realistic_;
  double v_true_ = 0.0;
  std::int64_t step_ = 0;
};

TripleTrajectory run_homodyne_triple(const SystemParams& sys, const PrParams& pr, double duration,
                                     std::uint64_t seed, const HomodyneRunOptions& options = {});

}  // namespace qtraj
