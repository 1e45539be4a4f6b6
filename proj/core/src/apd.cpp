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

#include "qtraj/apd.hpp"

#include <cmath>
#include <limits>
#include <string>

#include "qtraj/errors.hpp"
#include "qtraj/jump_clock.hpp"

namespace qtraj {

namespace {
constexpr std::uint64_t kThresholdStream = 1;
constexpr std::uint64_t kAcceptanceStream = 2;
constexpr std::uint64_t kResponseStream = 3;
constexpr std::uint64_t kDarkStream = 4;

Ket ground_ket() {
  Ket k = Ket::Zero();
  k(kGround) = 1.0;
  return k;
}

// Minimum weight of the charged-pair block, relative to the total, for an
// avalanche to be consistent with the realistic observer's own model.
constexpr double kAvalancheTolerance = 1e-14;
}  // namespace

ApdParams ApdParams::ideal() {
  return {1.0, std::numeric_limits<double>::infinity(), 0.0, 0.0};
}

bool ApdParams::instant_response() const { return std::isinf(gamma_r); }

void ApdParams::validate() const {
  if (!(eta >= 0.0 && eta <= 1.0)) {
    throw InvalidArgument("apd.eta must lie in [0, 1], got " + std::to_string(eta));
  }
  if (!(gamma_r > 0.0)) {
    throw InvalidArgument("apd.gamma_r must be > 0, got " + std::to_string(gamma_r));
  }
  if (!(tau_dd >= 0.0) || !std::isfinite(tau_dd)) {
    throw InvalidArgument("apd.tau_dd must be finite and >= 0, got " + std::to_string(tau_dd));
  }
  if (!(gamma_dk >= 0.0) || !std::isfinite(gamma_dk)) {
    throw InvalidArgument("apd.gamma_dk must be finite and >= 0, got " + std::to_string(gamma_dk));
  }
}

double draw_response_time(double r, const ApdParams& apd) {
  return draw_response_time(r, apd.gamma_r, apd.tau_dd);
}

std::int64_t steps_for(double interval, double dt) {
  if (!(dt > 0.0)) throw InvalidArgument("time step must be positive");
  if (!(interval >= 0.0) || !std::isfinite(interval)) {
    throw InvalidArgument("interval must be finite and non-negative");
  }
  double n = interval / dt;
  auto steps = static_cast<std::int64_t>(std::llround(n));
  if (std::abs(n - static_cast<double>(steps)) > 1e-6 * std::max(1.0, n)) {
    throw InvalidArgument("interval " + std::to_string(interval) +
                          " is not a multiple of the time step " + std::to_string(dt));
  }
  return steps;
}

CountingOperators counting_operators(const SystemParams& sys, const ApdParams& apd, cplx mu,
                                     double dt) {
  CountingOperators ops;
  ops.mu = mu;
  ops.c = lowering_operator(sys);
  ops.c_mu = ops.c + mu * Mat2::Identity();
  ops.a = no_jump_operator(sys, mu);
  ops.k = no_jump_operator(sys, 0.0);
  ops.step_perfect = Mat2::Identity() - dt * ops.a;
  ops.step_ready = Mat2::Identity() - dt * (ops.a + 0.5 * apd.gamma_dk * Mat2::Identity());
  ops.step_dead = Mat2::Identity() - dt * ops.k;
  return ops;
}

// ---------------------------------------------------------------------------

PerfectCountingObserver::PerfectCountingObserver(const Ket& initial, double threshold)
    : psi_(initial.normalized()), clock_(threshold) {}

bool PerfectCountingObserver::step(const CountingOperators& ops, double dt,
                                   NoiseStream& thresholds) {
  double rate = (ops.c_mu * psi_).squaredNorm();
  psi_ = ops.step_perfect * psi_;
  psi_.normalize();
  survival_ *= 1.0 - dt * rate;
  if (!clock_.fires(survival_)) return false;

  Ket jumped = ops.c_mu * psi_;
  double n = jumped.norm();
  if (!(n > 0.0)) throw DegenerateJump("perfect observer jumped from a dark state");
  psi_ = jumped / n;
  survival_ = 1.0;
  clock_.rearm(thresholds.uniform());
  return true;
}

// ---------------------------------------------------------------------------

IntermediateApdObserver::IntermediateApdObserver(const DensityOperator& initial)
    : rho_(initial.matrix()) {}

void IntermediateApdObserver::step(const CountingOperators& ops, double eta, double dt) {
  if (dead_) {
    rho_ = ops.step_dead * rho_ * ops.step_dead.adjoint() + dt * jump(ops.c, rho_);
  } else {
    rho_ = ops.step_ready * rho_ * ops.step_ready.adjoint() +
           (1.0 - eta) * dt * jump(ops.c_mu, rho_);
  }
  double tr = rho_.trace().real();
  if (!std::isfinite(tr) || !(tr > 0.0)) {
    throw NumericalError("intermediate observer lost its normalization");
  }
  if (tr < 1e-100 || tr > 1e100) rho_ /= tr;
}

void IntermediateApdObserver::charged_pair(const CountingOperators& ops, const ApdParams& apd) {
  if (dead_) throw RecordError("charged pair created while the detector is dead");
  Mat2 fed = apd.eta * jump(ops.c_mu, rho_) + apd.gamma_dk * rho_;
  double tr = fed.trace().real();
  if (!(tr > 0.0)) throw DegenerateJump("charged pair created from a state that cannot produce one");
  rho_ = fed / tr;
  dead_ = true;
}

void IntermediateApdObserver::reset() {
  if (!dead_) throw RecordError("detector reset while already ready");
  rho_ /= rho_.trace().real();
  dead_ = false;
}

// ---------------------------------------------------------------------------

SparseGenerator apd_generator(const SystemParams& sys, const ApdParams& apd, cplx mu) {
  const SuperMatrix id = SuperMatrix::Identity();
  SuperMatrix l = liouvillian_matrix(sys);
  SuperMatrix j = jump_matrix(lowering_operator(sys) + mu * Mat2::Identity());
  std::vector<LinearTerm> terms;
  terms.push_back({0, 0, l - apd.gamma_dk * id - apd.eta * j});
  if (!apd.instant_response()) {
    terms.push_back({1, 1, l - apd.gamma_r * id});
    terms.push_back({1, 0, apd.eta * j + apd.gamma_dk * id});
  }
  terms.push_back({2, 2, l});
  return assemble_generator(3, terms);
}

SparseGenerator apd_completion(const SystemParams& sys, const ApdParams& apd, cplx mu) {
  const Mat2 id = Mat2::Identity();
  Mat2 a0 = no_jump_operator(sys, mu) + 0.5 * apd.gamma_dk * id;
  Mat2 k = no_jump_operator(sys, 0.0);
  std::vector<LinearTerm> terms;
  terms.push_back({0, 0, sandwich(a0, a0.adjoint())});
  if (!apd.instant_response()) {
    Mat2 a1 = k + 0.5 * apd.gamma_r * id;
    terms.push_back({1, 1, sandwich(a1, a1.adjoint())});
  }
  terms.push_back({2, 2, sandwich(k, k.adjoint())});
  return assemble_generator(3, terms);
}

ApdSupersystemModel::ApdSupersystemModel(const SystemParams& sys, const ApdParams& apd, double dt,
                                         const std::vector<cplx>& lo_amplitudes)
    : apd_(apd), dt_(dt) {
  sys.validate();
  apd.validate();
  if (!(dt > 0.0)) throw InvalidArgument("time step must be positive");
  if (lo_amplitudes.empty()) throw InvalidArgument("at least one local-oscillator setting needed");
  for (cplx mu : lo_amplitudes) {
    ops_.push_back(counting_operators(sys, apd, mu, dt));
    generators_.push_back(apd_generator(sys, apd, mu));
    SparseGenerator completion = apd_completion(sys, apd, mu);
    steps_.push_back(BlockOperator::compile(3, {{&generators_.back(), dt}, {&completion, dt * dt}},
                                            true));
  }
}

RealisticApdObserver::RealisticApdObserver(std::shared_ptr<const ApdSupersystemModel> model,
                                           const DensityOperator& initial)
    : model_(std::move(model)) {
  pack_block(initial.matrix(), x_.data());
}

double RealisticApdObserver::total_trace() const {
  return x_[0] + x_[3] + x_[4] + x_[7] + x_[8] + x_[11];
}

void RealisticApdObserver::step(std::size_t lo) {
  model_->step_operator(lo).apply(x_.data(), scratch_.data());
  x_.swap(scratch_);
  double tr = total_trace();
  if (!std::isfinite(tr) || !(tr > 0.0)) {
    throw NumericalError("realistic counting observer lost its normalization");
  }
  if (tr < 1e-100 || tr > 1e100) normalize();
}

void RealisticApdObserver::normalize() {
  double tr = total_trace();
  if (!(tr > 0.0)) throw NumericalError("cannot normalize an empty supersystem state");
  for (double& v : x_) v /= tr;
}

void RealisticApdObserver::avalanche(std::size_t lo) {
  if (dead_) throw RecordError("avalanche while the detector is dead");
  const ApdParams& apd = model_->detector();
  if (apd.instant_response()) {
    const CountingOperators& ops = model_->operators(lo);
    Mat2 rho0 = unpack_block(&x_[0]);
    Mat2 fed = apd.eta * jump(ops.c_mu, rho0) + apd.gamma_dk * rho0;
    double tr = fed.trace().real();
    if (!(tr > 0.0)) throw RecordError("avalanche from a state that cannot create a charged pair");
    pack_block(fed / tr, &x_[8]);
  } else {
    double t1 = x_[4] + x_[7];
    if (!(t1 > kAvalancheTolerance * total_trace())) {
      throw RecordError("avalanche while the charged-pair block is empty");
    }
    for (int i = 0; i < 4; ++i) x_[8 + i] = x_[4 + i] / t1;
  }
  for (int i = 0; i < 8; ++i) x_[i] = 0.0;
  dead_ = true;
}

void RealisticApdObserver::reset() {
  if (!dead_) throw RecordError("detector reset while already ready");
  normalize();
  for (int i = 0; i < 4; ++i) {
    x_[i] = x_[8 + i];
    x_[8 + i] = 0.0;
  }
  dead_ = false;
}

Mat2 RealisticApdObserver::block(int s) const {
  if (s < 0 || s > 2) throw InvalidArgument("detector state index out of range");
  return unpack_block(&x_[4 * s]) / total_trace();
}

std::array<double, 3> RealisticApdObserver::detector_probabilities() const {
  double tr = total_trace();
  return {(x_[0] + x_[3]) / tr, (x_[4] + x_[7]) / tr, (x_[8] + x_[11]) / tr};
}

DensityOperator RealisticApdObserver::state() const {
  Mat2 sum = unpack_block(&x_[0]) + unpack_block(&x_[4]) + unpack_block(&x_[8]);
  return DensityOperator::normalize(sum);
}

// ---------------------------------------------------------------------------

ApdRecordCorrelator::ApdRecordCorrelator(const ApdParams& apd, double dt, std::uint64_t seed,
                                         std::uint64_t stream)
    : apd_(apd),
      dt_(dt),
      acceptance_(seed, stream, kAcceptanceStream),
      response_(seed, stream, kResponseStream),
      dark_(seed, stream, kDarkStream) {}

ApdStepEvents ApdRecordCorrelator::advance(std::int64_t step, bool photon, bool ready) {
  ApdStepEvents ev;
  ev.photon = photon;
  if (ready) {
    bool accepted = photon && acceptance_.uniform() <= apd_.eta;
    ev.dark = apd_.gamma_dk > 0.0 && dark_.bernoulli(apd_.gamma_dk * dt_);
    if (accepted || ev.dark) {
      if (avalanche_at_ || reset_at_) {
        throw RecordError("charged pair created while a detection is still pending");
      }
      ev.cpc = true;
      double tau_r = draw_response_time(response_.uniform(), apd_.gamma_r, 0.0);
      std::int64_t delay = apd_.instant_response()
                               ? 0
                               : static_cast<std::int64_t>(std::floor(tau_r / dt_));
      avalanche_at_ = step + delay;
      reset_at_ = *avalanche_at_ + static_cast<std::int64_t>(std::llround(apd_.tau_dd / dt_));
    }
    ev.dark = ev.dark && !accepted;
  }
  if (avalanche_at_ && *avalanche_at_ == step) {
    ev.avalanche = true;
    avalanche_at_.reset();
  }
  if (reset_at_ && *reset_at_ == step) {
    ev.reset = true;
    reset_at_.reset();
  }
  return ev;
}

// ---------------------------------------------------------------------------

namespace {
std::vector<cplx> lo_settings(const SystemParams& sys, CountingScheme scheme) {
  if (scheme == CountingScheme::direct) return {0.0};
  double a = adaptive_lo_amplitude(sys);
  return {a, -a};
}
}  // namespace

ApdTripleSimulator::ApdTripleSimulator(const SystemParams& sys, const ApdParams& apd,
                                       CountingScheme scheme, double dt, std::uint64_t seed,
                                       std::uint64_t stream)
    : scheme_(scheme),
      dt_(dt),
      model_(std::make_shared<const ApdSupersystemModel>(sys, apd, dt, lo_settings(sys, scheme))),
      thresholds_(seed, stream, kThresholdStream),
      records_(apd, dt, seed, stream),
      perfect_(ground_ket(), thresholds_.uniform()),
      intermediate_(DensityOperator::ground()),
      realistic_(model_, DensityOperator::ground()) {}

int ApdTripleSimulator::lo_sign() const noexcept {
  if (scheme_ == CountingScheme::direct) return 0;
  return lo_ == 0 ? 1 : -1;
}

void ApdTripleSimulator::step() {
  const CountingOperators& ops = model_->operators(lo_);
  const ApdParams& apd = model_->detector();
  bool jumped = perfect_.step(ops, dt_, thresholds_);
  bool ready = intermediate_.ready();
  intermediate_.step(ops, apd.eta, dt_);
  realistic_.step(lo_);
  ++step_;

  last_ = records_.advance(step_, jumped, ready);
  if (last_.cpc) intermediate_.charged_pair(ops, apd);
  if (last_.avalanche) {
    realistic_.avalanche(lo_);
    if (scheme_ == CountingScheme::adaptive) lo_ ^= 1u;
  }
  if (last_.reset) {
    intermediate_.reset();
    realistic_.reset();
  }
  flags_ |= (last_.photon ? event::photon : 0) | (last_.cpc ? event::cpc : 0) |
            (last_.avalanche ? event::avalanche : 0) | (last_.reset ? event::reset : 0) |
            (last_.dark ? event::dark : 0);
}

std::uint8_t ApdTripleSimulator::take_events() {
  std::uint8_t f = flags_;
  flags_ = 0;
  return f;
}

TripleSample ApdTripleSimulator::sample() const {
  TripleSample s;
  s.t = time();
  s.perfect = perfect_.state();
  s.intermediate = intermediate_.state();
  s.realistic = realistic_.state();
  check_physical(s.intermediate.matrix(), kPositivityTolerance, "intermediate counting state");
  check_physical(s.realistic.matrix(), kPositivityTolerance, "realistic counting state");
  s.detector = realistic_.detector_probabilities();
  s.lo_sign = lo_sign();
  s.dead = realistic_.dead();
  return s;
}

TripleTrajectory run_counting_triple(const SystemParams& sys, const ApdParams& apd,
                                     CountingScheme scheme, double duration, std::uint64_t seed,
                                     const ApdRunOptions& options) {
  std::int64_t every = steps_for(options.sample_interval, options.dt);
  std::int64_t total = steps_for(duration, options.dt);
  if (every <= 0) throw InvalidArgument("sample interval must be at least one step");

  ApdTripleSimulator sim(sys, apd, scheme, options.dt, seed);
  TripleTrajectory traj;
  traj.kind = TrajectoryKind::counting;
  traj.samples.reserve(static_cast<std::size_t>(total / every + 1));
  traj.samples.push_back(sim.sample());
  while (sim.steps() < total) {
    sim.step();
    if (sim.steps() % every == 0) {
      TripleSample s = sim.sample();
      s.events = sim.take_events();
      traj.samples.push_back(s);
    }
  }
  return traj;
}

TripleTrajectory run_direct_triple(const SystemParams& sys, const ApdParams& apd, double duration,
                                   std::uint64_t seed, const ApdRunOptions& options) {
  return run_counting_triple(sys, apd, CountingScheme::direct, duration, seed, options);
}

TripleTrajectory run_adaptive_triple(const SystemParams& sys, const ApdParams& apd,
                                     double duration, std::uint64_t seed,
                                     const ApdRunOptions& options) {
  return run_counting_triple(sys, apd, CountingScheme::adaptive, duration, seed, options);
}

}  // namespace qtraj
