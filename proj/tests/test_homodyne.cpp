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

#include <cmath>
#include <numbers>
#include <numeric>
#include <sstream>

#include <gtest/gtest.h>

#include "qtraj/analysis.hpp"
#include "qtraj/errors.hpp"
#include "qtraj/homodyne.hpp"
#include "qtraj/master_equation.hpp"

using namespace qtraj;

namespace {

double variance_of(const std::vector<double>& p, const VoltageGrid& g) {
  double m0 = 0, m1 = 0, m2 = 0;
  for (std::size_t j = 0; j < p.size(); ++j) {
    m0 += p[j] * g.dv;
    m1 += p[j] * g.v[j] * g.dv;
    m2 += p[j] * g.v[j] * g.v[j] * g.dv;
  }
  m1 /= m0;
  return m2 / m0 - m1 * m1;
}

std::vector<double> evolve_ou(const PrParams& pr, const VoltageGrid& g, std::vector<double> p,
                              double dt, int steps) {
  SparseGenerator ou = ou_generator(pr, g);
  SupersystemState s(4 * g.size(), cplx(0.0));
  for (std::size_t j = 0; j < g.size(); ++j) s[4 * j + 3] = p[j];  // ground-state blocks
  for (int i = 0; i < steps; ++i) s = euler_step(s, ou, dt);
  for (std::size_t j = 0; j < g.size(); ++j) p[j] = s[4 * j + 3].real();
  return p;
}

double conditioned_vacuum_variance(double noise) {
  // Atom undriven in its ground state: the receiver sees vacuum only.
  SystemParams sys{0.0, 1.0};
  PrParams pr;
  pr.noise = noise;
  HomodyneTripleSimulator sim(sys, pr, 1e-4, 21);
  while (sim.time() < 15.0) sim.step();
  double sum = 0;
  int n = 0;
  while (sim.time() < 25.0) {
    sim.step();
    sum += sim.realistic().voltage_variance();
    ++n;
  }
  return sum / n;
}

}  // namespace

TEST(PrParams, DefaultsAndValidation) {
  PrParams p;
  EXPECT_DOUBLE_EQ(p.gamma, 1.5);
  EXPECT_DOUBLE_EQ(p.noise, 0.1);
  EXPECT_DOUBLE_EQ(p.eta, 0.98);
  EXPECT_NO_THROW(p.validate());
  PrParams bad = p;
  bad.eta = 1.2;
  EXPECT_THROW(bad.validate(), InvalidArgument);
  bad = p;
  bad.noise = 0.0;
  EXPECT_THROW(bad.validate(), InvalidArgument);
  bad = p;
  bad.gamma = -1.0;
  EXPECT_THROW(bad.validate(), InvalidArgument);
  EXPECT_DOUBLE_EQ(lo_phase(Quadrature::x), 0.0);
  EXPECT_DOUBLE_EQ(lo_phase(Quadrature::y), -0.5 * std::numbers::pi);
}

TEST(NoiseConversion, NepToNoise) {
  // hbar omega at 780 nm is 2.5468e-19 J; sqrt(0.5 mW * that) = 1.1285e-11.
  double n = nep_to_noise(3e-12, 0.5e-3, 780e-9);
  double hw = 1.054571817e-34 * 2 * std::numbers::pi * 299792458.0 / 780e-9;
  EXPECT_NEAR(n, 3e-12 / std::sqrt(0.5e-3 * hw), 1e-12);
  EXPECT_NEAR(n, 0.2658, 1e-3);
  EXPECT_DOUBLE_EQ(nep_to_noise(0.0, 0.5e-3, 780e-9), 0.0);
  EXPECT_NEAR(nep_to_noise(3e-12, 2e-3, 780e-9), 0.5 * n, 1e-15);
  EXPECT_THROW(nep_to_noise(3e-12, 0.0, 780e-9), InvalidArgument);
}

TEST(VoltageGrid, SpanAndInitialDistribution) {
  PrParams pr;
  VoltageGrid g = VoltageGrid::for_noise(pr.noise);
  EXPECT_EQ(g.size(), 100u);
  EXPECT_NEAR(g.sigma, 2.236, 1e-3);
  EXPECT_NEAR(g.v.front(), -7 * g.sigma, 1e-12);
  EXPECT_NEAR(g.v.back(), 7 * g.sigma, 1e-12);
  std::vector<double> p = ou_initial_distribution(pr, g);
  double mass = std::accumulate(p.begin(), p.end(), 0.0) * g.dv;
  EXPECT_NEAR(mass, 1.0, 1e-6);
  EXPECT_NEAR(variance_of(p, g), 1.0 / (2 * pr.noise), 0.01 * 5.0);
}

TEST(VoltageGrid, OuGeneratorConservesMassAndKeepsStationaryVariance) {
  PrParams pr;
  VoltageGrid g = VoltageGrid::for_noise(pr.noise);
  SparseGenerator ou = ou_generator(pr, g);
  EXPECT_NO_THROW(verify_trace_preserving(ou, 1e-10));
  std::vector<double> p0 = ou_initial_distribution(pr, g);
  std::vector<double> p1 = evolve_ou(pr, g, p0, 1e-4, 10000);
  double v0 = variance_of(p0, g), v1 = variance_of(p1, g);
  EXPECT_LT(std::abs(v1 - v0) / v0, 0.01);
  EXPECT_NEAR(std::accumulate(p1.begin(), p1.end(), 0.0) * g.dv, 1.0, 1e-10);
}

TEST(VoltageGrid, OuRelaxesToUnconditionedVariance) {
  for (double noise : {0.1, 0.5}) {
    PrParams pr;
    pr.noise = noise;
    VoltageGrid g = VoltageGrid::for_noise(noise);
    std::vector<double> p(g.size(), 0.0);
    p[g.size() / 2] = 1.0 / g.dv;
    p = evolve_ou(pr, g, p, 1e-4, 100000);
    EXPECT_NEAR(variance_of(p, g), 1.0 / (2 * noise), 0.02 / (2 * noise));
  }
}

TEST(Generator, HomodyneGeneratorIsTracePreserving) {
  SystemParams sys{10.0, 1.0};
  for (double phi : {0.0, -0.5 * std::numbers::pi}) {
    PrParams pr;
    pr.phi = phi;
    VoltageGrid g = VoltageGrid::for_noise(pr.noise);
    SparseGenerator gen = homodyne_generator(sys, pr, g);
    for (const auto& s : gen.column_trace_sums()) EXPECT_LT(std::abs(s), 1e-10);
  }
}

TEST(PerfectHomodyne, YMeasurementKeepsXZero) {
  SystemParams sys{10.0, 1.0};
  HomodyneOperators ops = homodyne_operators(sys, lo_phase(Quadrature::y));
  NoiseStream w(1, 0, 0);
  Ket psi(0.0, 1.0);
  for (int i = 0; i < 100000; ++i) {
    perfect_homodyne_step(psi, ops, 1e-4, w.wiener(1e-4));
    if (i % 100 == 0) {
      DensityOperator r = DensityOperator::from_ket(psi);
      ASSERT_NEAR(r.bloch().x, 0.0, 1e-12);
      ASSERT_NEAR(r.purity(), 1.0, 1e-12);
    }
  }
}

TEST(PerfectHomodyne, XMeasurementDwellsNearEigenstates) {
  SystemParams sys{10.0, 1.0};
  HomodyneOperators ops = homodyne_operators(sys, lo_phase(Quadrature::x));
  NoiseStream w(2, 0, 0);
  Ket psi(0.0, 1.0);
  double abs_x = 0;
  int n = 0, sign_changes = 0;
  double last = 0;
  for (int i = 0; i < 5000000; ++i) {
    perfect_homodyne_step(psi, ops, 1e-5, w.wiener(1e-5));
    if (i % 1000 == 0 && i > 100000) {
      double x = DensityOperator::from_ket(psi).bloch().x;
      abs_x += std::abs(x);
      ++n;
      if (x * last < 0 && std::abs(x) > 0.5) ++sign_changes;
      if (std::abs(x) > 0.5) last = x;
    }
  }
  EXPECT_GT(abs_x / n, 0.6);
  // Switching on the scale of a few decay times over 50 time units.
  EXPECT_GT(sign_changes, 3);
  EXPECT_LT(sign_changes, 100);
}

TEST(IntermediateHomodyne, EfficiencyLimits) {
  SystemParams sys{10.0, 1.0};
  HomodyneOperators ops = homodyne_operators(sys, 0.0);
  NoiseStream w(3, 0, 0);
  Ket psi(0.0, 1.0);
  Mat2 rho = DensityOperator::ground().matrix();
  Mat2 me = rho, rho0 = rho;
  const double dt = 1e-4;
  for (int i = 0; i < 20000; ++i) {
    double x = quadrature_expectation(ops.c_phi, psi);
    double dw = w.wiener(dt);
    perfect_homodyne_step(psi, ops, dt, dw);
    intermediate_homodyne_step(rho, ops, 1.0, dt, homodyne_current(1.0, x, dt, dw, 0.3));
    intermediate_homodyne_step(rho0, ops, 0.0, dt, homodyne_current(0.0, x, dt, dw, 0.3));
    me = me_step(sys, me, dt);
  }
  EXPECT_LT((rho - DensityOperator::from_ket(psi).matrix()).cwiseAbs().maxCoeff(), 1e-9);
  EXPECT_LT((rho0 - me).cwiseAbs().maxCoeff(), 1e-12);
}

TEST(TrueVoltage, DeterministicFixpoint) {
  PrParams pr;
  const double drive = 0.7, dt = 1e-4;
  double v = 0;
  for (int i = 0; i < 200000; ++i) v = true_voltage_step(v, std::sqrt(pr.eta) * drive * dt, pr, dt);
  EXPECT_NEAR(v, -std::sqrt(pr.eta / (pr.gamma * pr.noise)) * drive, 1e-9);
}

TEST(TrueVoltage, VacuumVariance) {
  PrParams pr;
  NoiseStream a(4, 0, 0), b(4, 0, 1);
  const double dt = 2e-3;
  double v = 0, s = 0, s2 = 0;
  long n = 0;
  for (long i = 0; i < 20000000; ++i) {
    v = true_voltage_step(v, homodyne_current(pr.eta, 0.0, dt, a.wiener(dt), b.wiener(dt)), pr,
                          dt);
    if (i > 10000 && i % 10 == 0) {
      s += v;
      s2 += v * v;
      ++n;
    }
  }
  double var = s2 / n - (s / n) * (s / n);
  // Euler discretization shifts the variance by a factor 1/(1 - gamma dt/2).
  EXPECT_NEAR(var * (1 - 0.5 * pr.gamma * dt), 1.0 / (2 * pr.noise), 0.02 * 5.0);
}

TEST(Realistic, ConditionedVacuumVariance) {
  for (double noise : {0.05, 0.5}) {
    double expect = std::sqrt(1.0 + 1.0 / noise) - 1.0;
    EXPECT_NEAR(conditioned_vacuum_variance(noise), expect, 0.02 * expect) << noise;
  }
  EXPECT_NEAR(5.0 / (std::sqrt(11.0) - 1.0), 2.16, 0.005);
}

TEST(Realistic, GridEdgeAborts) {
  SystemParams sys{10.0, 1.0};
  PrParams pr;
  GridOptions narrow;
  narrow.span_sigmas = 1.5;
  HomodyneTripleSimulator sim(sys, pr, 1e-4, 5, 0, narrow);
  EXPECT_THROW(
      {
        for (int i = 0; i < 100000; ++i) sim.step();
      },
      NumericalError);
}

TEST(Triple, YMeasurementKeepsAllXZero) {
  SystemParams sys{10.0, 1.0};
  PrParams pr;
  pr.phi = lo_phase(Quadrature::y);
  TripleTrajectory t = run_homodyne_triple(sys, pr, 10.0, 6);
  for (const auto& s : t.samples) {
    EXPECT_NEAR(s.perfect.bloch().x, 0.0, 1e-12);
    EXPECT_NEAR(s.intermediate.bloch().x, 0.0, 1e-12);
    EXPECT_NEAR(s.realistic.bloch().x, 0.0, 1e-12);
  }
}

TEST(Triple, XMeasurementFeatures) {
  SystemParams sys{10.0, 1.0};
  PrParams pr;
  HomodyneRunOptions opt;
  opt.dt = 1e-5;
  TripleTrajectory t = run_homodyne_triple(sys, pr, 30.0, 7, opt);
  double max_p = 0, max_r = 0, gap_i = 0, gap_r = 0;
  std::vector<double> vm, xs;
  for (const auto& s : t.samples) {
    EXPECT_TRUE(support_contains(s.realistic, s.intermediate));
    EXPECT_TRUE(support_contains(s.intermediate, s.perfect));
    if (s.t < 2.0) continue;  // all observers start in the ground state
    BlochVector p = s.perfect.bloch(), i = s.intermediate.bloch(), r = s.realistic.bloch();
    max_p = std::max({max_p, std::abs(p.y), std::abs(p.z)});
    max_r = std::max({max_r, std::abs(r.y), std::abs(r.z)});
    gap_i += std::pow(p.x - i.x, 2) + std::pow(p.y - i.y, 2) + std::pow(p.z - i.z, 2);
    gap_r += std::pow(p.x - r.x, 2) + std::pow(p.y - r.y, 2) + std::pow(p.z - r.z, 2);
    vm.push_back(s.detector[0]);
    xs.push_back(p.x);
  }
  EXPECT_LT(max_r, max_p);
  EXPECT_LT(gap_i, 0.2 * gap_r);
  // The mean voltage follows -x.
  double mv = std::accumulate(vm.begin(), vm.end(), 0.0) / vm.size();
  double mx = std::accumulate(xs.begin(), xs.end(), 0.0) / xs.size();
  double cov = 0, sv = 0, sx = 0;
  for (std::size_t k = 0; k < vm.size(); ++k) {
    cov += (vm[k] - mv) * (xs[k] - mx);
    sv += (vm[k] - mv) * (vm[k] - mv);
    sx += (xs[k] - mx) * (xs[k] - mx);
  }
  EXPECT_LT(cov / std::sqrt(sv * sx), -0.3);
  ASSERT_EQ(t.voltage_distribution.size(), t.samples.size());
  ASSERT_EQ(t.voltage_grid.size(), 100u);
}

TEST(Triple, PurityOrdering) {
  SchemeConfig cfg;
  cfg.scheme = DetectionScheme::homodyne_x;
  cfg.system.omega = 10.0;
  cfg.dt = 1e-4;
  EnsembleOptions opt;
  opt.samples = 200;
  opt.batch = 10;
  opt.transient = 5.0;
  opt.spacing = 1.0;
  std::vector<double> est;
  std::vector<double> se;
  for (Observer o : {Observer::perfect, Observer::intermediate, Observer::realistic}) {
    opt.observer = o;
    PurityEstimate e = ensemble_average_purity(cfg, opt, 8);
    est.push_back(e.mean);
    se.push_back(e.se);
  }
  double pme = me_steady_purity(cfg.system);
  EXPECT_NEAR(est[0], 1.0, 1e-9);
  EXPECT_GT(est[0] - est[1], 3 * se[1]);
  EXPECT_GT(est[1] - est[2], 3 * std::hypot(se[1], se[2]));
  EXPECT_GT(est[2] - pme, 3 * se[2]);
}

TEST(Triple, PurityFallsWithReceiverNoise) {
  SchemeConfig cfg;
  cfg.scheme = DetectionScheme::homodyne_x;
  cfg.system.omega = 10.0;
  cfg.dt = 1e-4;
  EnsembleOptions opt;
  opt.samples = 150;
  opt.batch = 10;
  opt.transient = 5.0;
  double last = 1.0, last_se = 0.0;
  for (double noise : {0.1, 1.0, 10.0}) {
    cfg.pr.noise = noise;
    PurityEstimate e = ensemble_average_purity(cfg, opt, 9);
    EXPECT_LT(e.mean, last + 2 * std::hypot(e.se, last_se)) << noise;
    EXPECT_GE(e.mean, me_steady_purity(cfg.system) - 3 * e.se);
    last = e.mean;
    last_se = e.se;
  }
}

TEST(Triple, Deterministic) {
  SystemParams sys{10.0, 1.0};
  PrParams pr;
  std::ostringstream a, b;
  write_trajectory_csv(a, run_homodyne_triple(sys, pr, 2.0, 10));
  write_trajectory_csv(b, run_homodyne_triple(sys, pr, 2.0, 10));
  EXPECT_EQ(a.str(), b.str());
}
