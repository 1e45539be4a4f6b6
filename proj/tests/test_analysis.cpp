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
#include <numeric>
#include <sstream>
#include <string>
#include <vector>

#include <gtest/gtest.h>

#include "qtraj/analysis.hpp"
#include "qtraj/errors.hpp"
#include "qtraj/noise.hpp"

using namespace qtraj;

namespace {

SchemeConfig counting(DetectionScheme s, double omega) {
  SchemeConfig c;
  c.scheme = s;
  c.system.omega = omega;
  return c;
}

std::vector<std::string> split(const std::string& line) {
  std::vector<std::string> out;
  std::stringstream ss(line);
  std::string cell;
  while (std::getline(ss, cell, ',')) out.push_back(cell);
  return out;
}

}  // namespace

TEST(Names, RoundTrip) {
  for (auto s : {DetectionScheme::apd_direct, DetectionScheme::apd_adaptive,
                 DetectionScheme::homodyne_x, DetectionScheme::homodyne_y})
    EXPECT_EQ(parse_scheme(scheme_name(s)), s);
  for (auto o : {Observer::perfect, Observer::intermediate, Observer::realistic})
    EXPECT_EQ(parse_observer(observer_name(o)), o);
  EXPECT_THROW(parse_scheme("pr-z"), InvalidArgument);
  EXPECT_THROW(parse_observer("omniscient"), InvalidArgument);
  EXPECT_TRUE(is_counting(DetectionScheme::apd_adaptive));
  EXPECT_FALSE(is_counting(DetectionScheme::homodyne_x));
}

TEST(Config, EffectiveStep) {
  SchemeConfig c;
  EXPECT_DOUBLE_EQ(c.effective_dt(), 1e-4);
  c.scheme = DetectionScheme::homodyne_y;
  EXPECT_DOUBLE_EQ(c.effective_dt(), 1e-5);
  c.dt = 3e-5;
  EXPECT_DOUBLE_EQ(c.effective_dt(), 3e-5);
}

TEST(BatchMeans, HandComputed) {
  std::vector<double> x(11);
  std::iota(x.begin(), x.end(), 1.0);
  // Batches of two over 1..10: means 1.5, 3.5, ..., 9.5 with sample variance 10.
  BatchStats st = batch_means(x, 2);
  EXPECT_EQ(st.batches, 5u);
  EXPECT_DOUBLE_EQ(st.mean, 6.0);
  EXPECT_NEAR(st.se, std::sqrt(2.0), 1e-14);
}

TEST(BatchMeans, InsufficientSamples) {
  std::vector<double> x{1.0, 2.0, 3.0};
  EXPECT_THROW(batch_means(x, 2), InvalidArgument);
  EXPECT_THROW(batch_means(x, 0), InvalidArgument);
}

TEST(Autocorrelation, ArOneProcess) {
  NoiseStream w(5, 0, 0);
  std::vector<double> x(200000);
  double v = 0.0;
  for (auto& e : x) e = v = 0.6 * v + w.gaussian();
  EXPECT_NEAR(lag1_autocorrelation(x), 0.6, 0.01);
  std::vector<double> alt{1, -1, 1, -1, 1, -1, 1, -1};
  EXPECT_LT(lag1_autocorrelation(alt), -0.8);
}

TEST(Ensemble, PerfectObserverIsPure) {
  EnsembleOptions o;
  o.samples = 200;
  o.observer = Observer::perfect;
  for (auto s : {DetectionScheme::apd_direct, DetectionScheme::apd_adaptive}) {
    PurityEstimate e = ensemble_average_purity(counting(s, 10.0), o, 3);
    EXPECT_NEAR(e.mean, 1.0, 1e-9);
    EXPECT_EQ(e.samples, 200u);
  }
  SchemeConfig h;
  h.scheme = DetectionScheme::homodyne_y;
  o.samples = 20;
  o.transient = 2.0;
  o.batch = 5;
  EXPECT_NEAR(ensemble_average_purity(h, o, 3).mean, 1.0, 1e-9);
}

TEST(Ensemble, NoInformationGivesMasterEquationPurity) {
  for (Observer obs : {Observer::intermediate, Observer::realistic}) {
    SchemeConfig c = counting(DetectionScheme::apd_direct, 3.0);
    c.apd.eta = 0.0;
    c.apd.gamma_dk = 0.0;
    EnsembleOptions o;
    o.transient = 60.0;
    o.samples = 200;
    o.observer = obs;
    PurityEstimate e = ensemble_average_purity(c, o, 9);
    double pme = me_steady_purity(c.system);
    // Euler bias of the stationary map is O(dt) = 1e-4 on top of the sampling error.
    EXPECT_NEAR(e.mean, pme, 2.0 * e.se + 2e-4) << observer_name(obs);
  }
}

TEST(Ensemble, StandardErrorScaling) {
  SchemeConfig c = counting(DetectionScheme::apd_direct, 5.0);
  EnsembleOptions o;
  o.samples = 2000;
  o.trajectories = 2;
  PurityEstimate a = ensemble_average_purity(c, o, 21);
  o.samples = 4000;
  PurityEstimate b = ensemble_average_purity(c, o, 22);
  EXPECT_NEAR(b.se / a.se, 1.0 / std::sqrt(2.0), 0.3 / std::sqrt(2.0));
}

TEST(Ensemble, SamplesAreNearlyIndependent) {
  SchemeConfig c = counting(DetectionScheme::apd_direct, 10.0);
  EnsembleOptions o;
  auto x = sample_purities(c, o, 1000, 4, 0);
  ASSERT_EQ(x.size(), 1000u);
  EXPECT_LT(lag1_autocorrelation(x), 0.5);
  for (double p : x) {
    EXPECT_GE(p, 0.5 - 1e-9);
    EXPECT_LE(p, 1.0 + 1e-9);
  }
}

TEST(Ensemble, AdaptiveBeatsDirectAtStrongDriving) {
  EnsembleOptions o;
  o.samples = 1000;
  o.trajectories = 2;
  PurityEstimate d = ensemble_average_purity(counting(DetectionScheme::apd_direct, 10.0), o, 31);
  PurityEstimate a = ensemble_average_purity(counting(DetectionScheme::apd_adaptive, 10.0), o, 32);
  EXPECT_GT(a.mean - d.mean, 3.0 * std::hypot(a.se, d.se));
}

TEST(Ensemble, Determinism) {
  SchemeConfig c = counting(DetectionScheme::apd_adaptive, 2.0);
  EnsembleOptions o;
  o.samples = 100;
  o.trajectories = 4;
  PurityEstimate a = ensemble_average_purity(c, o, 77);
  PurityEstimate b = ensemble_average_purity(c, o, 77);
  EXPECT_EQ(a.mean, b.mean);
  EXPECT_EQ(a.se, b.se);
}

TEST(Sweep, OmegaSweepPoints) {
  EnsembleOptions o;
  o.samples = 300;
  std::vector<double> omegas{1.0, 10.0};
  auto pts = purity_vs_omega_sweep(counting(DetectionScheme::apd_direct, 1.0), omegas, o, 5);
  ASSERT_EQ(pts.size(), 2u);
  for (std::size_t i = 0; i < pts.size(); ++i) {
    const auto& p = pts[i];
    EXPECT_EQ(p.omega, omegas[i]);
    EXPECT_EQ(p.variable, omegas[i]);
    EXPECT_NEAR(p.p_me, me_steady_purity(SystemParams{omegas[i], 1.0}), 1e-15);
    EXPECT_NEAR(p.scaled, scaled_purity(p.purity, p.p_me), 1e-15);
    EXPECT_NEAR(p.scaled_se, p.se / (1.0 - p.p_me), 1e-15);
    EXPECT_GT(p.se, 0.0);
    EXPECT_GE(p.scaled, -3.0 * p.scaled_se);
    EXPECT_LE(p.scaled, 1.0);
    EXPECT_EQ(p.samples, 300u);
  }
  std::vector<double> bad{1.0, 0.0};
  EXPECT_THROW(purity_vs_omega_sweep(counting(DetectionScheme::apd_direct, 1.0), bad, o, 5),
               InvalidArgument);
}

TEST(Sweep, NoiseForBandwidth) {
  for (double g : {0.5, 3.0, 40.0}) {
    double n = noise_for_bandwidth(20.0, g);
    EXPECT_NEAR(g * std::sqrt((1 - n) / n), 20.0, 1e-12);
  }
  EXPECT_THROW(noise_for_bandwidth(0.0, 1.0), InvalidArgument);
  EXPECT_THROW(noise_for_bandwidth(1.0, -1.0), InvalidArgument);
}

TEST(Sweep, EffectiveBandwidthNeedsHomodyne) {
  std::vector<double> g{1.0};
  EXPECT_THROW(effective_bandwidth_sweep(20.0, g, SchemeConfig{}, EnsembleOptions{}, 1),
               InvalidArgument);
}

TEST(Sweep, CsvLayout) {
  PuritySweepPoint p;
  p.scheme = DetectionScheme::homodyne_x;
  p.variable = 0.1;
  p.omega = 30.0;
  p.gamma = 0.1;
  p.noise = 2.4937655860349125e-05;
  p.purity = 0.9;
  p.se = 1e-3;
  p.p_me = 0.5;
  p.scaled = 0.8;
  p.scaled_se = 2e-3;
  p.samples = 12;
  std::ostringstream os;
  write_sweep_csv(os, {p}, {"# run: test"});
  std::istringstream is(os.str());
  std::string line;
  std::getline(is, line);
  EXPECT_EQ(line, "# run: test");
  std::getline(is, line);
  EXPECT_EQ(split(line), sweep_columns());
  std::getline(is, line);
  auto cells = split(line);
  ASSERT_EQ(cells.size(), sweep_columns().size());
  EXPECT_EQ(cells[0], "pr-x");
  EXPECT_EQ(std::stod(cells[4]), p.noise);
  EXPECT_EQ(cells[10], "12");
}
