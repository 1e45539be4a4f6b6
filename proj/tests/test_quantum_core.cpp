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
#include <random>

#include <gtest/gtest.h>

#include "oracles.hpp"
#include "qtraj/errors.hpp"
#include "qtraj/master_equation.hpp"
#include "qtraj/superoperators.hpp"
#include "qtraj/two_level.hpp"

using namespace qtraj;

namespace {

Mat2 random_state(std::mt19937_64& rng) {
  std::normal_distribution<double> n;
  Mat2 a;
  for (int i = 0; i < 2; ++i)
    for (int j = 0; j < 2; ++j) a(i, j) = cplx(n(rng), n(rng));
  Mat2 r = a * a.adjoint();
  return r / r.trace();
}

double dist(const Mat2& a, const Mat2& b) { return (a - b).cwiseAbs().maxCoeff(); }

}  // namespace

TEST(Bloch, GroundAndMixed) {
  Mat2 g = DensityOperator::from_bloch({0, 0, -1}).matrix();
  EXPECT_LT(dist(g, Mat2(Eigen::Vector2cd(0, 1).asDiagonal())), 1e-15);
  EXPECT_LT(dist(DensityOperator::from_bloch({0, 0, 0}).matrix(), 0.5 * Mat2::Identity()), 1e-15);
  EXPECT_LT(dist(DensityOperator::ground().matrix(), g), 1e-15);
  EXPECT_NEAR(DensityOperator::excited().bloch().z, 1.0, 1e-15);
}

TEST(Bloch, RoundTrip) {
  std::mt19937_64 rng(1);
  for (int i = 0; i < 200; ++i) {
    Mat2 r = random_state(rng);
    BlochVector b = to_bloch(r);
    EXPECT_LT(dist(to_density(b).matrix(), r), 1e-12);
    BlochVector b2 = to_density(b).bloch();
    EXPECT_NEAR(b2.x, b.x, 1e-12);
    EXPECT_NEAR(b2.y, b.y, 1e-12);
    EXPECT_NEAR(b2.z, b.z, 1e-12);
  }
}

TEST(Bloch, PauliConvention) {
  // Tr[rho sigma_i] recovers each component.
  BlochVector b{0.3, -0.2, 0.5};
  Mat2 r = to_density(b).matrix();
  EXPECT_NEAR((r * pauli::x()).trace().real(), 0.3, 1e-15);
  EXPECT_NEAR((r * pauli::y()).trace().real(), -0.2, 1e-15);
  EXPECT_NEAR((r * pauli::z()).trace().real(), 0.5, 1e-15);
  // sigma = |g><e|
  EXPECT_EQ(pauli::lowering()(kGround, kExcited), cplx(1.0));
  EXPECT_EQ(pauli::lowering()(kExcited, kGround), cplx(0.0));
}

TEST(Bloch, InverseRejectsBadInput) {
  Mat2 m = Mat2::Identity();
  EXPECT_THROW(to_bloch(m), InvalidArgument);  // trace 2
  Mat2 nh = 0.5 * Mat2::Identity();
  nh(0, 1) = 0.1;
  EXPECT_THROW(to_bloch(nh), InvalidArgument);
  EXPECT_THROW(DensityOperator::from_matrix(nh), InvalidArgument);
  EXPECT_THROW(DensityOperator::from_bloch({1, 1, 0}), InvalidArgument);
}

TEST(Purity, Examples) {
  EXPECT_DOUBLE_EQ(purity(BlochVector{0, 0, -1}), 1.0);
  EXPECT_DOUBLE_EQ(purity(BlochVector{0, 0, 0}), 0.5);
  EXPECT_NEAR(purity(BlochVector{0, 2.0 / 3, -1.0 / 3}), 7.0 / 9, 1e-15);
  std::mt19937_64 rng(2);
  for (int i = 0; i < 200; ++i) {
    DensityOperator r = DensityOperator::from_matrix(random_state(rng));
    double tr = (r.matrix() * r.matrix()).trace().real();
    EXPECT_NEAR(r.purity(), tr, 1e-12);
    EXPECT_GE(r.purity(), 0.5 - 1e-12);
    EXPECT_LE(r.purity(), 1.0 + 1e-9);
  }
}

TEST(Superoperators, DefinitionsAgainstExplicitForms) {
  std::mt19937_64 rng(3);
  std::normal_distribution<double> n;
  for (int i = 0; i < 50; ++i) {
    Mat2 a;
    for (int r = 0; r < 2; ++r)
      for (int c = 0; c < 2; ++c) a(r, c) = cplx(n(rng), n(rng));
    Mat2 rho = random_state(rng);
    Mat2 ad = a.adjoint();
    Mat2 d = a * rho * ad - 0.5 * (ad * a * rho + rho * ad * a);
    EXPECT_LT(dist(apply_superoperator(SuperopKind::dissipator, a, rho), d), 1e-12);
    Mat2 h = a * rho + rho * ad;
    h -= h.trace() * rho;
    EXPECT_LT(dist(apply_superoperator(SuperopKind::innovation, a, rho), h), 1e-12);
    Mat2 j = a * rho * ad;
    EXPECT_LT(dist(apply_superoperator(SuperopKind::jump, a, rho), j), 1e-12);
    EXPECT_LT(dist(apply_superoperator(SuperopKind::jump_update, a, rho), j / j.trace() - rho),
              1e-12);
    EXPECT_LT(std::abs(d.trace()), 1e-12);
    EXPECT_LT(std::abs(apply_superoperator(SuperopKind::innovation, a, rho).trace()), 1e-12);
  }
}

TEST(Superoperators, GroundStateIsDark) {
  Mat2 g = DensityOperator::ground().matrix();
  EXPECT_LT(dissipator(pauli::lowering(), g).cwiseAbs().maxCoeff(), 1e-15);
  EXPECT_THROW(jump_update(pauli::lowering(), g), DegenerateJump);
}

TEST(Superoperators, JumpResetsToGround) {
  std::mt19937_64 rng(4);
  for (int i = 0; i < 20; ++i) {
    Mat2 rho = random_state(rng);
    Mat2 g = jump_update(pauli::lowering(), rho);
    EXPECT_LT(dist(g, DensityOperator::ground().matrix() - rho), 1e-12);
  }
}

TEST(Superoperators, MatrixFormsMatchKronecker) {
  std::mt19937_64 rng(5);
  std::normal_distribution<double> n;
  Mat2 a, b;
  for (int r = 0; r < 2; ++r)
    for (int c = 0; c < 2; ++c) {
      a(r, c) = cplx(n(rng), n(rng));
      b(r, c) = cplx(n(rng), n(rng));
    }
  Eigen::Matrix4cd k = Eigen::kroneckerProduct(b.transpose(), a).eval();
  EXPECT_LT((sandwich(a, b) - k).cwiseAbs().maxCoeff(), 1e-14);
  Mat2 x = random_state(rng);
  EXPECT_LT(dist(unvec(sandwich(a, b) * vec(x)), a * x * b), 1e-14);
  EXPECT_LT(dist(unvec(dissipator_matrix(a) * vec(x)), dissipator(a, x)), 1e-13);
  EXPECT_LT(dist(unvec(jump_matrix(a) * vec(x)), jump(a, x)), 1e-13);
  EXPECT_LT(dist(unvec(commutator_matrix(a) * vec(x)), cplx(0, -1) * (a * x - x * a)), 1e-13);
  EXPECT_EQ((oracle::vec(x) - vec(x)).cwiseAbs().maxCoeff(), 0.0);
}

TEST(MasterEquation, LiouvillianMatrixMatchesOracle) {
  for (double w : {0.0, 0.5, 1.0, 10.0}) {
    SystemParams p{w, 1.0};
    EXPECT_LT((liouvillian_matrix(p) - oracle::lindblad(w, 1.0)).cwiseAbs().maxCoeff(), 1e-13);
  }
}

TEST(MasterEquation, SteadyStateExamples) {
  SystemParams p0{0.0, 1.0};
  BlochVector b0 = me_steady_state(p0).bloch();
  EXPECT_NEAR(b0.z, -1.0, 1e-15);
  EXPECT_DOUBLE_EQ(me_steady_purity(p0), 1.0);

  SystemParams p1{1.0, 1.0};
  BlochVector b1 = me_steady_state(p1).bloch();
  EXPECT_NEAR(b1.x, 0.0, 1e-15);
  EXPECT_NEAR(b1.y, 2.0 / 3, 1e-14);
  EXPECT_NEAR(b1.z, -1.0 / 3, 1e-14);
  EXPECT_NEAR(me_steady_purity(p1), 7.0 / 9, 1e-14);

  SystemParams p10{10.0, 1.0};
  EXPECT_NEAR(me_steady_purity(p10), 1.0 - 2.0 * std::pow(100.0 / 201.0, 2), 1e-14);
  EXPECT_NEAR(me_steady_purity(SystemParams{1e4, 1.0}), 0.5, 1e-7);
}

TEST(MasterEquation, SteadyStateAgreesWithBlochOracleAndIsFixpoint) {
  for (double w : {0.3, 1.0, 2.5, 10.0, 30.0}) {
    SystemParams p{w, 1.0};
    DensityOperator ss = me_steady_state(p);
    Eigen::Vector3d r = oracle::bloch_steady(w, 1.0);
    BlochVector b = ss.bloch();
    EXPECT_NEAR(b.x, r(0), 1e-12);
    EXPECT_NEAR(b.y, r(1), 1e-12);
    EXPECT_NEAR(b.z, r(2), 1e-12);
    EXPECT_NEAR(me_steady_purity(p), oracle::bloch_purity(r), 1e-12);
    EXPECT_LT(liouvillian(p, ss.matrix()).cwiseAbs().maxCoeff(), 1e-10);
  }
}

TEST(MasterEquation, LongIntegrationConverges) {
  // Exact propagation for 50 decay times from several initial states.
  SystemParams p{2.0, 1.0};
  Mat2 ss = me_steady_state(p).matrix();
  for (BlochVector b : {BlochVector{0, 0, 1}, BlochVector{1, 0, 0}, BlochVector{0, -0.6, 0.8}}) {
    Mat2 r = oracle::me_propagate(2.0, 1.0, to_density(b).matrix(), 50.0);
    EXPECT_LT(dist(r, ss), 1e-6);
  }
}

TEST(MasterEquation, KrausStepTracksExactPropagator) {
  // The normalized Kraus step is first order; halving dt halves the error.
  SystemParams p{10.0, 1.0};
  Mat2 rho0 = DensityOperator::excited().matrix();
  auto err = [&](double dt) {
    Mat2 r = rho0;
    int n = static_cast<int>(std::lround(0.5 / dt));
    for (int i = 0; i < n; ++i) r = me_step(p, r, dt);
    return dist(r, oracle::me_propagate(10.0, 1.0, rho0, 0.5));
  };
  double e1 = err(2e-4), e2 = err(1e-4);
  EXPECT_LT(e1, 1e-3);
  EXPECT_NEAR(e1 / e2, 2.0, 0.3);
}

TEST(ScaledPurity, Examples) {
  EXPECT_DOUBLE_EQ(scaled_purity(1.0, 0.6), 1.0);
  EXPECT_DOUBLE_EQ(scaled_purity(0.6, 0.6), 0.0);
  EXPECT_NEAR(scaled_purity(0.9, 0.8), 0.5, 1e-14);
  EXPECT_THROW(scaled_purity(1.0, 1.0), InvalidArgument);
}

TEST(PhotonFlux, Examples) {
  EXPECT_NEAR(photon_flux(CountingScheme::direct, {10.0, 1.0}), 100.0 / 201.0, 1e-15);
  EXPECT_NEAR(photon_flux(CountingScheme::direct, {10.0, 1.0}), 0.4975, 1e-4);
  EXPECT_NEAR(photon_flux(CountingScheme::direct, {1e5, 1.0}), 0.5, 1e-9);
  for (double w : {0.5, 1.0, 10.0}) {
    EXPECT_DOUBLE_EQ(photon_flux(CountingScheme::adaptive, {w, 1.0}), 0.25);
  }
  // Direct flux is gamma times the excited population of the steady state.
  Mat2 ss = me_steady_state({3.0, 1.0}).matrix();
  EXPECT_NEAR(photon_flux(CountingScheme::direct, {3.0, 1.0}), ss(kExcited, kExcited).real(),
              1e-14);
}

TEST(Support, Examples) {
  DensityOperator mixed = DensityOperator::maximally_mixed();
  Ket plus(1.0 / std::sqrt(2.0), 1.0 / std::sqrt(2.0));
  DensityOperator p = DensityOperator::from_ket(plus);
  EXPECT_TRUE(support_contains(mixed, p));
  EXPECT_FALSE(support_contains(DensityOperator::ground(), DensityOperator::excited()));
  EXPECT_TRUE(support_contains(DensityOperator::ground(), DensityOperator::ground()));
  EXPECT_FALSE(support_contains(DensityOperator::ground(), p));
  BlochVector almost{0, 0, -0.98};
  EXPECT_TRUE(support_contains(to_density(almost), p));
  // A pure state never contains a different pure state.
  Ket tilted(std::cos(0.01), std::sin(0.01));
  EXPECT_FALSE(support_contains(DensityOperator::from_ket(tilted), p));
}

TEST(Positivity, CheckPhysical) {
  Mat2 bad;
  bad << 1.1, 0, 0, -0.1;
  EXPECT_THROW(check_physical(bad), NumericalError);
  Mat2 nan = Mat2::Identity() * std::nan("");
  EXPECT_THROW(check_physical(nan), NumericalError);
  EXPECT_NO_THROW(check_physical(DensityOperator::ground().matrix()));
}
