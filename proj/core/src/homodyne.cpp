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

#include "qtraj/homodyne.hpp"

#include <algorithm>
#include <cmath>
#include <numbers>
#include <string>

#include "qtraj/apd.hpp"
#include "qtraj/errors.hpp"

namespace qtraj {

namespace {
constexpr std::uint64_t kXiStream = 11;
constexpr std::uint64_t kZetaStream = 12;
constexpr std::uint64_t kJohnsonStream = 13;
constexpr std::uint64_t kInitialVoltageStream = 14;

constexpr double kHbar = 1.054571817e-34;
constexpr double kSpeedOfLight = 299792458.0;
}  // namespace

void PrParams::validate() const {
  if (!(gamma > 0.0) || !std::isfinite(gamma)) {
    throw InvalidArgument("pr.gamma must be finite and > 0, got " + std::to_string(gamma));
  }
  if (!(noise > 0.0) || !std::isfinite(noise)) {
    throw InvalidArgument("pr.noise must be finite and > 0, got " + std::to_string(noise));
  }
  if (!(eta >= 0.0 && eta <= 1.0)) {
    throw InvalidArgument("pr.eta must lie in [0, 1], got " + std::to_string(eta));
  }
  if (!std::isfinite(phi)) throw InvalidArgument("pr.phi must be finite");
}

double lo_phase(Quadrature q) { return q == Quadrature::x ? 0.0 : -0.5 * std::numbers::pi; }

double nep_to_noise(double nep, double power, double wavelength) {
  if (!(nep >= 0.0) || !(power > 0.0) || !(wavelength > 0.0)) {
    throw InvalidArgument("NEP must be >= 0 and power, wavelength > 0");
  }
  double photon_energy = kHbar * 2.0 * std::numbers::pi * kSpeedOfLight / wavelength;
  return nep / std::sqrt(power * photon_energy);
}

HomodyneOperators homodyne_operators(const SystemParams& sys, double phi) {
  HomodyneOperators ops;
  ops.c = lowering_operator(sys);
  ops.c_phi = std::polar(1.0, -phi) * ops.c;
  ops.k = no_jump_operator(sys, 0.0);
  return ops;
}

double quadrature_expectation(const Mat2& c_phi, const Mat2& rho) {
  return 2.0 * (c_phi * rho).trace().real();
}

double quadrature_expectation(const Mat2& c_phi, const Ket& psi) {
  return 2.0 * psi.dot(c_phi * psi).real();
}

double perfect_homodyne_step(Ket& psi, const HomodyneOperators& ops, double dt, double dw) {
  double dy = quadrature_expectation(ops.c_phi, psi) * dt + dw;
  Mat2 m = Mat2::Identity() - dt * ops.k + dy * ops.c_phi;
  psi = m * psi;
  double n = psi.norm();
  if (!(n > 0.0) || !std::isfinite(n)) throw NumericalError("perfect homodyne state collapsed");
  psi /= n;
  return dy;
}

double homodyne_current(double eta, double x_true, double dt, double dw_xi, double dw_zeta) {
  double se = std::sqrt(eta);
  return se * x_true * dt + se * dw_xi + std::sqrt(1.0 - eta) * dw_zeta;
}

void intermediate_homodyne_step(Mat2& rho, const HomodyneOperators& ops, double eta, double dt,
                                double current) {
  Mat2 m = Mat2::Identity() - dt * ops.k + std::sqrt(eta) * current * ops.c_phi;
  Mat2 next = m * rho * m.adjoint() + (1.0 - eta) * dt * jump(ops.c, rho);
  double tr = next.trace().real();
  if (!(tr > 0.0) || !std::isfinite(tr)) {
    throw NumericalError("intermediate homodyne state lost its normalization");
  }
  rho = next / tr;
}

double true_voltage_step(double v, double current, const PrParams& pr, double dt) {
  return v - pr.gamma * v * dt - std::sqrt(pr.gamma / pr.noise) * current;
}

double correlated_innovation(double gamma, double dw_johnson, double v_true, double v_mean,
                             double dt) {
  return std::sqrt(gamma) * dw_johnson + gamma * (v_true - v_mean) * dt;
}

// ---------------------------------------------------------------------------

VoltageGrid VoltageGrid::for_noise(double noise, const GridOptions& options) {
  if (!(noise > 0.0)) throw InvalidArgument("noise ratio must be positive");
  if (options.points < 3) throw InvalidArgument("voltage grid needs at least 3 points");
  if (!(options.span_sigmas > 0.0)) throw InvalidArgument("grid span must be positive");
  VoltageGrid g;
  g.sigma = std::sqrt(0.5 / noise);
  double half = options.span_sigmas * g.sigma;
  g.dv = 2.0 * half / static_cast<double>(options.points - 1);
  g.v.resize(options.points);
  for (std::size_t j = 0; j < options.points; ++j) g.v[j] = -half + g.dv * static_cast<double>(j);
  return g;
}

std::vector<double> ou_initial_distribution(const PrParams& pr, const VoltageGrid& grid) {
  double var = 0.5 / pr.noise;
  std::vector<double> p(grid.size());
  double sum = 0.0;
  for (std::size_t j = 0; j < grid.size(); ++j) {
    p[j] = std::exp(-0.5 * grid.v[j] * grid.v[j] / var);
    sum += p[j];
  }
  for (double& x : p) x /= sum * grid.dv;
  return p;
}

namespace {
// Zero-flux finite-volume discretization of
//   (gamma/2N) d2/dv2 rho + gamma d/dv (v rho) + a d/dv (G rho)
// where G is the measurement superoperator and a its coupling. Interface
// fluxes are central averages, so interior rows reduce to central differences
// and the total trace is conserved exactly.
std::vector<LinearTerm> voltage_terms(const PrParams& pr, const VoltageGrid& grid,
                                      const SuperMatrix* coupling, double coupling_rate) {
  const SuperMatrix id = SuperMatrix::Identity();
  const std::size_t n = grid.size();
  const double diff = 0.5 * pr.gamma / pr.noise / (grid.dv * grid.dv);
  const double drift = 0.5 * pr.gamma / grid.dv;
  const double meas = 0.5 * coupling_rate / grid.dv;
  std::vector<LinearTerm> terms;
  auto flux = [&](std::size_t row, std::size_t left, std::size_t right, double sign) {
    // sign * (F(left) + F(right)) with F(j) = drift v_j + meas G; diffusion
    // flux sign * diff * (rho_right - rho_left)
    terms.push_back({row, left, sign * (drift * grid.v[left] * id) - sign * diff * id});
    terms.push_back({row, right, sign * (drift * grid.v[right] * id) + sign * diff * id});
    if (coupling != nullptr) {
      terms.push_back({row, left, sign * meas * *coupling});
      terms.push_back({row, right, sign * meas * *coupling});
    }
  };
  for (std::size_t j = 0; j < n; ++j) {
    if (j + 1 < n) flux(j, j, j + 1, +1.0);
    if (j > 0) flux(j, j - 1, j, -1.0);
  }
  return terms;
}
}  // namespace

SparseGenerator ou_generator(const PrParams& pr, const VoltageGrid& grid) {
  return assemble_generator(grid.size(), voltage_terms(pr, grid, nullptr, 0.0));
}

SparseGenerator homodyne_generator(const SystemParams& sys, const PrParams& pr,
                                   const VoltageGrid& grid) {
  HomodyneOperators ops = homodyne_operators(sys, pr.phi);
  SuperMatrix g = left_multiply(ops.c_phi) + right_multiply(ops.c_phi.adjoint());
  double rate = std::sqrt(pr.gamma * pr.eta / pr.noise);
  std::vector<LinearTerm> terms = voltage_terms(pr, grid, &g, rate);
  SuperMatrix l = liouvillian_matrix(sys);
  for (std::size_t j = 0; j < grid.size(); ++j) terms.push_back({j, j, l});
  return assemble_generator(grid.size(), terms);
}

SparseGenerator homodyne_completion(const SystemParams& sys, const VoltageGrid& grid) {
  Mat2 k = no_jump_operator(sys, 0.0);
  SuperMatrix s = sandwich(k, k.adjoint());
  std::vector<LinearTerm> terms;
  for (std::size_t j = 0; j < grid.size(); ++j) terms.push_back({j, j, s});
  return assemble_generator(grid.size(), terms);
}

HomodyneGridModel::HomodyneGridModel(const SystemParams& sys, const PrParams& pr, double dt,
                                     const GridOptions& options)
    : sys_(sys), pr_(pr), dt_(dt), options_(options) {
  sys.validate();
  pr.validate();
  if (!(dt > 0.0)) throw InvalidArgument("time step must be positive");
  grid_ = VoltageGrid::for_noise(pr.noise, options);
  ops_ = homodyne_operators(sys, pr.phi);
  generator_ = homodyne_generator(sys, pr, grid_);
  verify_trace_preserving(generator_, 1e-10);
  SparseGenerator completion = homodyne_completion(sys, grid_);
  step_ = BlockOperator::compile(grid_.size(), {{&generator_, dt}, {&completion, dt * dt}}, true);
}

RealisticHomodyneObserver::RealisticHomodyneObserver(
    std::shared_ptr<const HomodyneGridModel> model, const DensityOperator& initial)
    : model_(std::move(model)) {
  const VoltageGrid& grid = model_->grid();
  std::vector<double> p = ou_initial_distribution(model_->detector(), grid);
  x_.assign(4 * grid.size(), 0.0);
  scratch_.assign(4 * grid.size(), 0.0);
  for (std::size_t j = 0; j < grid.size(); ++j) pack_block(p[j] * initial.matrix(), &x_[4 * j]);
  refresh_moments();
}

void RealisticHomodyneObserver::step(double innovation) {
  const VoltageGrid& grid = model_->grid();
  const std::size_t n = grid.size();
  model_->step_operator().apply(x_.data(), scratch_.data());
  for (std::size_t j = 0; j < n; ++j) {
    double w = innovation * (grid.v[j] - mean_);
    const double* src = &x_[4 * j];
    double* dst = &scratch_[4 * j];
    dst[0] += w * src[0];
    dst[1] += w * src[1];
    dst[2] += w * src[2];
    dst[3] += w * src[3];
  }
  double total = 0.0;
  for (std::size_t j = 0; j < n; ++j) total += scratch_[4 * j] + scratch_[4 * j + 3];
  total *= grid.dv;
  if (!(total > 0.0) || !std::isfinite(total)) {
    throw NumericalError("realistic homodyne state lost its normalization");
  }
  double inv = 1.0 / total;
  for (double& v : scratch_) v *= inv;
  x_.swap(scratch_);
  refresh_moments();
  double edge = edge_mass();
  if (edge > model_->options().edge_mass_limit) {
    throw NumericalError("voltage distribution reached the grid edge (mass " +
                         std::to_string(edge) + "); widen the grid span");
  }
}

void RealisticHomodyneObserver::refresh_moments() {
  const VoltageGrid& grid = model_->grid();
  double m = 0.0;
  for (std::size_t j = 0; j < grid.size(); ++j) m += grid.v[j] * (x_[4 * j] + x_[4 * j + 3]);
  m *= grid.dv;
  double var = 0.0;
  for (std::size_t j = 0; j < grid.size(); ++j) {
    double d = grid.v[j] - m;
    var += d * d * (x_[4 * j] + x_[4 * j + 3]);
  }
  mean_ = m;
  variance_ = var * grid.dv;
}

std::vector<double> RealisticHomodyneObserver::distribution() const {
  std::vector<double> p(model_->grid().size());
  for (std::size_t j = 0; j < p.size(); ++j) p[j] = x_[4 * j] + x_[4 * j + 3];
  return p;
}

double RealisticHomodyneObserver::edge_mass() const {
  const std::size_t n = model_->grid().size();
  double lo = x_[0] + x_[3];
  double hi = x_[4 * (n - 1)] + x_[4 * (n - 1) + 3];
  return std::max(lo, hi) * model_->grid().dv;
}

Mat2 RealisticHomodyneObserver::block(std::size_t j) const {
  if (j >= model_->grid().size()) throw InvalidArgument("grid index out of range");
  return unpack_block(&x_[4 * j]);
}

DensityOperator RealisticHomodyneObserver::state() const {
  double s[4] = {0.0, 0.0, 0.0, 0.0};
  for (std::size_t j = 0; j < model_->grid().size(); ++j)
    for (int k = 0; k < 4; ++k) s[k] += x_[4 * j + k];
  return DensityOperator::normalize(unpack_block(s));
}

// ---------------------------------------------------------------------------

HomodyneTripleSimulator::HomodyneTripleSimulator(const SystemParams& sys, const PrParams& pr,
                                                 double dt, std::uint64_t seed,
                                                 std::uint64_t stream, const GridOptions& grid)
    : dt_(dt),
      model_(std::make_shared<const HomodyneGridModel>(sys, pr, dt, grid)),
      xi_(seed, stream, kXiStream),
      zeta_(seed, stream, kZetaStream),
      johnson_(seed, stream, kJohnsonStream),
      psi_(Ket::Zero()),
      rho_i_(DensityOperator::ground().matrix()),
      realistic_(model_, DensityOperator::ground()) {
  psi_(kGround) = 1.0;
  NoiseStream initial(seed, stream, kInitialVoltageStream);
  v_true_ = model_->grid().sigma * initial.gaussian();
}

void HomodyneTripleSimulator::step() {
  const PrParams& pr = model_->detector();
  const HomodyneOperators& ops = model_->operators();
  double dw_xi = xi_.wiener(dt_);
  double dw_zeta = zeta_.wiener(dt_);
  double dw_j = johnson_.wiener(dt_);

  double x_true = quadrature_expectation(ops.c_phi, psi_);
  perfect_homodyne_step(psi_, ops, dt_, dw_xi);
  double current = homodyne_current(pr.eta, x_true, dt_, dw_xi, dw_zeta);
  intermediate_homodyne_step(rho_i_, ops, pr.eta, dt_, current);
  realistic_.step(
      correlated_innovation(pr.gamma, dw_j, v_true_, realistic_.mean_voltage(), dt_));
  v_true_ = true_voltage_step(v_true_, current, pr, dt_);
  ++step_;
}

TripleSample HomodyneTripleSimulator::sample() const {
  TripleSample s;
  s.t = time();
  s.perfect = DensityOperator::from_ket(psi_);
  s.intermediate = DensityOperator::normalize(rho_i_);
  s.realistic = realistic_.state();
  check_physical(s.intermediate.matrix(), kPositivityTolerance, "intermediate homodyne state");
  check_physical(s.realistic.matrix(), kPositivityTolerance, "realistic homodyne state");
  s.detector = {realistic_.mean_voltage(), realistic_.voltage_variance(), v_true_};
  return s;
}

TripleTrajectory run_homodyne_triple(const SystemParams& sys, const PrParams& pr, double duration,
                                     std::uint64_t seed, const HomodyneRunOptions& options) {
  std::int64_t every = steps_for(options.sample_interval, options.dt);
  std::int64_t total = steps_for(duration, options.dt);
  if (every <= 0) throw InvalidArgument("sample interval must be at least one step");

  HomodyneTripleSimulator sim(sys, pr, options.dt, seed, 0, options.grid);
  TripleTrajectory traj;
  traj.kind = TrajectoryKind::homodyne;
  traj.voltage_grid = VoltageGrid::for_noise(pr.noise, options.grid).v;
  auto record = [&] {
    traj.samples.push_back(sim.sample());
    if (options.record_distribution) {
      traj.voltage_distribution.push_back(sim.realistic().distribution());
    }
  };
  record();
  while (sim.steps() < total) {
    sim.step();
    if (sim.steps() % every == 0) record();
  }
  return traj;
}

}  // namespace qtraj
