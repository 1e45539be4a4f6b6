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

#include <array>
#include <cstdint>
#include <memory>
#include <optional>
#include <vector>

#include "qtraj/generator.hpp"
#include "qtraj/jump_clock.hpp"
#include "qtraj/master_equation.hpp"
#include "qtraj/noise.hpp"
#include "qtraj/trajectory.hpp"

namespace qtraj {

// Avalanche photodiode: efficiency, response rate of the charged-pair state,
// dead time after an avalanche and dark-count rate.
struct ApdParams {
  double eta = 0.8;
  double gamma_r = 7.0;
  double tau_dd = 2.0;
  double gamma_dk = 5e-6;

  // eta = 1, instant response, no dead time, no dark counts.
  static ApdParams ideal();

  bool instant_response() const;
  void validate() const;
};

double draw_response_time(double r, const ApdParams& apd);

// Operators for one local-oscillator setting, with the first-order step
// matrices precomputed for a fixed dt.
struct CountingOperators {
  cplx mu;
  Mat2 c;          // sqrt(gamma) sigma
  Mat2 c_mu;       // c + mu
  Mat2 a;          // no-jump generator for c + mu
  Mat2 k;          // no-jump generator without local oscillator
  Mat2 step_perfect;  // 1 - dt a
  Mat2 step_ready;    // 1 - dt (a + gamma_dk/2)
  Mat2 step_dead;     // 1 - dt k
};

CountingOperators counting_operators(const SystemParams& sys, const ApdParams& apd, cplx mu,
                                     double dt);

// Perfect photon counting on a state vector. The no-jump norm is integrated
// alongside the normalized ket and compared against a uniform threshold.
class PerfectCountingObserver {
 public:
  PerfectCountingObserver(const Ket& initial, double threshold);

  // Advances one step; returns true if a jump occurred at the end of it.
  bool step(const CountingOperators& ops, double dt, NoiseStream& thresholds);

  const Ket& ket() const noexcept { return psi_; }
  DensityOperator state() const { return DensityOperator::from_ket(psi_); }
  double survival() const noexcept { return survival_; }

 private:
  Ket psi_;
  double survival_ = 1.0;
  JumpClock clock_;
};

// Observer with access to the charged-pair creations: a ready state rho_0 and
// an effectively dead state rho_dd lasting tau_r + tau_dd.
class IntermediateApdObserver {
 public:
  explicit IntermediateApdObserver(const DensityOperator& initial);

  void step(const CountingOperators& ops, double eta, double dt);
  void charged_pair(const CountingOperators& ops, const ApdParams& apd);
  void reset();

  bool ready() const noexcept { return !dead_; }
  DensityOperator state() const { return DensityOperator::normalize(rho_); }

 private:
  Mat2 rho_;
  bool dead_ = false;
};

// Jump-free linear part of the three-state supersystem equations for a given
// local-oscillator amplitude. Block 0 is the ready detector, block 1 the
// charged pair awaiting avalanche, block 2 the dead detector.
SparseGenerator apd_generator(const SystemParams& sys, const ApdParams& apd, cplx mu);

// Second-order Kraus completion dt^2 A_s rho_s A_s^+ for each block.
SparseGenerator apd_completion(const SystemParams& sys, const ApdParams& apd, cplx mu);

// Immutable per-run data for the realistic observer: generators and compiled
// step operators for every local-oscillator setting in use.
class ApdSupersystemModel {
 public:
  ApdSupersystemModel(const SystemParams& sys, const ApdParams& apd, double dt,
                      const std::vector<cplx>& lo_amplitudes);

  std::size_t lo_count() const noexcept { return ops_.size(); }
  const CountingOperators& operators(std::size_t lo) const { return ops_.at(lo); }
  const SparseGenerator& generator(std::size_t lo) const { return generators_.at(lo); }
  const BlockOperator& step_operator(std::size_t lo) const { return steps_.at(lo); }
  const ApdParams& detector() const noexcept { return apd_; }
  double dt() const noexcept { return dt_; }

 private:
  ApdParams apd_;
  double dt_;
  std::vector<CountingOperators> ops_;
  std::vector<SparseGenerator> generators_;
  std::vector<BlockOperator> steps_;
};

// Observer with access to avalanche times only. The blocks are evolved
// unnormalized and rescaled at events and on demand.
class RealisticApdObserver {
 public:
  RealisticApdObserver(std::shared_ptr<const ApdSupersystemModel> model,
                       const DensityOperator& initial);

  void step(std::size_t lo);
  void avalanche(std::size_t lo);
  void reset();
  void normalize();

  bool dead() const noexcept { return dead_; }
  Mat2 block(int s) const;  // normalized
  std::array<double, 3> detector_probabilities() const;
  DensityOperator state() const;  // detector marginal

 private:
  double total_trace() const;

  std::shared_ptr<const ApdSupersystemModel> model_;
  std::array<double, 12> x_{};
  std::array<double, 12> scratch_{};
  bool dead_ = false;
};

struct ApdStepEvents {
  bool photon = false;
  bool cpc = false;
  bool dark = false;
  bool avalanche = false;
  bool reset = false;
};

// Derives the detector records from the perfect jumps. Event times are snapped
// to the step grid: an avalanche floor(tau_r/dt) steps after the charged pair
// and a reset round(tau_dd/dt) steps after the avalanche.
class ApdRecordCorrelator {
 public:
  ApdRecordCorrelator(const ApdParams& apd, double dt, std::uint64_t seed, std::uint64_t stream);

  // photon: perfect jump during this step; ready: detector readiness during
  // this step.
  ApdStepEvents advance(std::int64_t step, bool photon, bool ready);

  std::optional<std::int64_t> pending_avalanche() const noexcept { return avalanche_at_; }
  std::optional<std::int64_t> pending_reset() const noexcept { return reset_at_; }

 private:
  ApdParams apd_;
  double dt_;
  NoiseStream acceptance_;
  NoiseStream response_;
  NoiseStream dark_;
  std::optional<std::int64_t> avalanche_at_;
  std::optional<std::int64_t> reset_at_;
};

struct ApdRunOptions {
  double dt = 1e-4;
  double sample_interval = 0.01;
};

// The three observers of one counting run advanced in lockstep. For adaptive
// counting the local oscillator starts at +sqrt(gamma)/2 and flips for all
// observers at every realistic avalanche.
class ApdTripleSimulator {
 public:
  ApdTripleSimulator(const SystemParams& sys, const ApdParams& apd, CountingScheme scheme,
                     double dt, std::uint64_t seed, std::uint64_t stream = 0);

  void step();
  // Accumulated event flags since the last call.
  std::uint8_t take_events();
  TripleSample sample() const;

  std::int64_t steps() const noexcept { return step_; }
  double time() const noexcept { return static_cast<double>(step_) * dt_; }
  int lo_sign() const noexcept;
  const ApdStepEvents& last_events() const noexcept { return last_; }

  const PerfectCountingObserver& perfect() const noexcept { return perfect_; }
  const IntermediateApdObserver& intermediate() const noexcept { return intermediate_; }
  const RealisticApdObserver& realistic() const noexcept { return realistic_; }

 private:
  CountingScheme scheme_;
  double dt_;
  std::shared_ptr<const ApdSupersystemModel> model_;
  NoiseStream thresholds_;
  ApdRecordCorrelator records_;
  PerfectCountingObserver perfect_;
  IntermediateApdObserver intermediate_;
  RealisticApdObserver realistic_;
  std::size_t lo_ = 0;
  std::int64_t step_ = 0;
  ApdStepEvents last_;
  std::uint8_t flags_ = 0;
};

TripleTrajectory run_counting_triple(const SystemParams& sys, const ApdParams& apd,
                                     CountingScheme scheme, double duration, std::uint64_t seed,
                                     const ApdRunOptions& options = {});
TripleTrajectory run_direct_triple(const SystemParams& sys, const ApdParams& apd, double duration,
                                   std::uint64_t seed, const ApdRunOptions& options = {});
TripleTrajectory run_adaptive_triple(const SystemParams& sys, const ApdParams& apd,
                                     double duration, std::uint64_t seed,
                                     const ApdRunOptions& options = {});

// Number of steps for an interval, rejecting intervals that are not close to
// a multiple of dt.
std::int64_t steps_for(double interval, double dt);

}  // namespace qtraj
