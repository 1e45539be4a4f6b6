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

#include "qtraj/dpo.hpp"

#include <algorithm>
#include <cmath>
#include <string>
#include <vector>

#include <Eigen/Dense>
#include <boost/math/tools/roots.hpp>

#include "qtraj/errors.hpp"

namespace qtraj {

double DpoParams::bandwidth() const { return gamma / std::sqrt(noise); }

void DpoParams::validate() const {
  if (!(std::abs(chi) < 1.0)) throw InvalidArgument("dpo.chi must satisfy |chi| < 1");
  if (!(gamma > 0.0) || !std::isfinite(gamma)) throw InvalidArgument("dpo.gamma must be > 0");
  if (!(noise > 0.0) || !std::isfinite(noise)) throw InvalidArgument("dpo.noise must be > 0");
  if (!(eta >= 0.0 && eta <= 1.0)) throw InvalidArgument("dpo.eta must lie in [0, 1]");
}

double unconditioned_x_variance(double chi) { return 1.0 / (1.0 - chi); }
double unconditioned_y_variance(double chi) { return 1.0 / (1.0 + chi); }

Covariances covariance_rates(const DpoParams& p, const Covariances& c) {
  const double k = p.k();
  const double g = p.gamma;
  const double a = std::sqrt(p.gamma * p.eta / p.noise);
  return {-2.0 * k * c.dx + 1.0 - g * c.dxv * c.dxv,
          g / p.noise - 2.0 * a * c.dxv - 2.0 * g * c.dv - g * c.dv * c.dv,
          -((k + g) * c.dxv + a * (c.dx - 1.0) + g * c.dv * c.dxv)};
}

void check_covariances(const Covariances& c) {
  if (!std::isfinite(c.dx) || !std::isfinite(c.dv) || !std::isfinite(c.dxv)) {
    throw NumericalError("covariances are not finite");
  }
  double det = c.dx * c.dv - c.dxv * c.dxv;
  if (!(c.dx > 0.0) || !(c.dv > 0.0) || det < -1e-12 * c.dx * c.dv) {
    throw NumericalError("covariance matrix lost positivity (dx=" + std::to_string(c.dx) +
                         ", dv=" + std::to_string(c.dv) + ", dxv=" + std::to_string(c.dxv) + ")");
  }
}

KalmanMoments kalman_step(const KalmanMoments& m, const DpoParams& p, double dt, double dw) {
  if (!(dt > 0.0)) throw InvalidArgument("time step must be positive");
  const double sg = std::sqrt(p.gamma);
  const double a = std::sqrt(p.gamma * p.eta / p.noise);
  Covariances r = covariance_rates(p, m.cov);
  KalmanMoments out;
  out.mean_x = m.mean_x - p.k() * m.mean_x * dt + sg * dw * m.cov.dxv;
  out.mean_v = m.mean_v - (p.gamma * m.mean_v + a * m.mean_x) * dt + sg * dw * m.cov.dv;
  out.cov = {m.cov.dx + r.dx * dt, m.cov.dv + r.dv * dt, m.cov.dxv + r.dxv * dt};
  check_covariances(out.cov);
  return out;
}

namespace {
Covariances axpy(const Covariances& c, double h, const Covariances& r) {
  return {c.dx + h * r.dx, c.dv + h * r.dv, c.dxv + h * r.dxv};
}

Covariances rk4(const DpoParams& p, const Covariances& c, double h) {
  Covariances k1 = covariance_rates(p, c);
  Covariances k2 = covariance_rates(p, axpy(c, 0.5 * h, k1));
  Covariances k3 = covariance_rates(p, axpy(c, 0.5 * h, k2));
  Covariances k4 = covariance_rates(p, axpy(c, h, k3));
  return {c.dx + h / 6.0 * (k1.dx + 2 * k2.dx + 2 * k3.dx + k4.dx),
          c.dv + h / 6.0 * (k1.dv + 2 * k2.dv + 2 * k3.dv + k4.dv),
          c.dxv + h / 6.0 * (k1.dxv + 2 * k2.dxv + 2 * k3.dxv + k4.dxv)};
}

double stiffness(const DpoParams& p, const Covariances& c) {
  const double a = std::sqrt(p.gamma * p.eta / p.noise);
  return 2.0 * p.k() + 2.0 * p.gamma * (1.0 + std::abs(c.dv)) + p.gamma * std::abs(c.dxv) + a +
         1.0;
}
}  // namespace

Covariances integrate_covariances(const DpoParams& p, Covariances c, double duration, double h) {
  if (!(h > 0.0)) throw InvalidArgument("integration step must be positive");
  double t = 0.0;
  while (t < duration) {
    double step = std::min(h, duration - t);
    c = rk4(p, c, step);
    t += step;
  }
  check_covariances(c);
  return c;
}

Covariances steady_covariances(const DpoParams& p) {
  p.validate();
  const double k = p.k();
  const double g = p.gamma;
  const double a = std::sqrt(p.gamma * p.eta / p.noise);

  Covariances c{0.5 / k, 0.5 / p.noise, 0.0};
  const double horizon = 200.0 / std::min({k, p.gamma, 1.0});
  double t = 0.0;
  while (t < horizon) {
    double h = 0.1 / stiffness(p, c);
    c = rk4(p, c, h);
    t += h;
    Covariances r = covariance_rates(p, c);
    double rel = std::max({std::abs(r.dx) / std::max(1.0, c.dx), std::abs(r.dv) / std::max(1.0, c.dv),
                           std::abs(r.dxv) / std::max(1.0, std::abs(c.dxv))});
    if (rel < 1e-9) break;
  }
  check_covariances(c);

  for (int it = 0; it < 50; ++it) {
    Covariances r = covariance_rates(p, c);
    Eigen::Matrix3d jac;
    jac << -2.0 * k, 0.0, -2.0 * g * c.dxv,
           0.0, -2.0 * g - 2.0 * g * c.dv, -2.0 * a,
           -a, -g * c.dxv, -(k + g + g * c.dv);
    Eigen::Vector3d delta = jac.partialPivLu().solve(Eigen::Vector3d(r.dx, r.dv, r.dxv));
    c = {c.dx - delta(0), c.dv - delta(1), c.dxv - delta(2)};
    if (delta.cwiseAbs().maxCoeff() < 1e-15 * std::max({1.0, c.dx, c.dv})) break;
  }
  check_covariances(c);
  Covariances r = covariance_rates(p, c);
  double scale = std::max({1.0, g / p.noise, a * std::abs(c.dxv)});
  if (std::max({std::abs(r.dx), std::abs(r.dv), std::abs(r.dxv)}) > 1e-9 * scale) {
    throw NumericalError("steady covariances did not converge");
  }
  if (c.dx * unconditioned_y_variance(p.chi) < 1.0 - 1e-9) {
    throw NumericalError("steady covariances violate the uncertainty relation");
  }
  return c;
}

Covariances scaled_steady_covariances(double b, double k, double eta) {
  if (!(b > 0.0) || !std::isfinite(b)) throw InvalidArgument("bandwidth must be positive");
  if (!(k > 0.0 && k < 1.0)) throw InvalidArgument("k must lie in (0, 1)");
  if (!(eta > 0.0 && eta <= 1.0)) throw InvalidArgument("eta must lie in (0, 1]");

  // Eliminate dx and dv in favour of s = scaled dxv.
  auto dx_of = [=](double s) { return (1.0 - b * s * s) / (2.0 * k); };
  auto dv_of = [=](double s) { return std::sqrt(1.0 - 2.0 * std::sqrt(eta / b) * s); };
  auto f = [=](double s) {
    return -k * s - std::sqrt(b * eta) * (dx_of(s) - 1.0) - b * s * dv_of(s);
  };
  const double lo = -1.0 / std::sqrt(b);
  const double hi = std::min(1.0 / std::sqrt(b), 0.5 * std::sqrt(b / eta));

  // Geometric scan towards s = 0 from both ends so that roots of any scale
  // are bracketed.
  std::vector<double> pts;
  for (double q = 1.0; q > 1e-14; q *= 0.95) pts.push_back(lo * q);
  pts.push_back(0.0);
  std::vector<double> upper;
  for (double q = 1.0; q > 1e-14; q *= 0.95) upper.push_back(hi * q);
  pts.insert(pts.end(), upper.rbegin(), upper.rend());
  pts.front() = lo * (1.0 - 1e-12);
  pts.back() = hi * (1.0 - 1e-12);

  const double dy = 1.0 / (2.0 * (1.0 - k));
  std::vector<Covariances> physical;
  auto consider = [&](double s) {
    Covariances c{dx_of(s), dv_of(s), s};
    if (!(c.dx > 0.0 && c.dv > 0.0 && c.dx * dy >= 1.0 - 1e-9)) return;
    // For k > 1/2 a second root can satisfy the bounds; it is a saddle of the
    // scaled flow and is never reached.
    const double sbe = std::sqrt(b * eta);
    Eigen::Matrix3d jac;
    jac << -2.0 * k, 0.0, -2.0 * b * s,
           0.0, -2.0 * b * c.dv, -2.0 * sbe,
           -sbe, -b * s, -k - b * c.dv;
    if (jac.eigenvalues().real().maxCoeff() < 0.0) physical.push_back(c);
  };
  boost::math::tools::eps_tolerance<double> tol(52);
  for (std::size_t i = 0; i + 1 < pts.size(); ++i) {
    double fa = f(pts[i]);
    double fb = f(pts[i + 1]);
    if (fa == 0.0) {
      consider(pts[i]);
      continue;
    }
    if (fa * fb < 0.0) {
      std::uintmax_t iters = 200;
      auto r = boost::math::tools::toms748_solve(f, pts[i], pts[i + 1], fa, fb, tol, iters);
      consider(0.5 * (r.first + r.second));
    }
  }
  if (physical.empty()) throw NumericalError("scaled covariance equations have no physical root");
  if (physical.size() > 1) {
    throw NumericalError("scaled covariance equations have " + std::to_string(physical.size()) +
                         " physical roots");
  }
  return physical.front();
}

double gaussian_purity(double dx, double dy) {
  double prod = dx * dy;
  if (!(prod >= 1.0 - 1e-9)) {
    throw InvalidArgument("variances violate the uncertainty relation (dx dy = " +
                          std::to_string(prod) + ")");
  }
  return 1.0 / std::sqrt(prod);
}

double purity_closed_form(double b, double k, double eta) {
  if (!(b > 0.0) || !std::isfinite(b)) throw InvalidArgument("bandwidth must be positive");
  if (!(k > 0.0 && k < 1.0)) throw InvalidArgument("k must lie in (0, 1)");
  if (!(eta > 0.0 && eta <= 1.0)) throw InvalidArgument("eta must lie in (0, 1]");
  // Without squeezing the state stays the vacuum; the general expression only
  // reaches 1 up to rounding.
  if (k == 0.5) return 1.0;
  const double r = std::sqrt(k * k + eta * (1.0 - 2.0 * k));
  const double s = k * std::sqrt((2.0 * b * r + k * k + b * b) / (eta * b * b * b));
  const double den = s * std::sqrt(eta * b * b * b) * (b * r + k * k) - std::pow(k, 4) -
                     b * b * k * k * (1.0 - eta / k + 2.0 * r / b);
  const double num = 2.0 * k * eta * (1.0 - k) * b * b;
  if (!(den > 0.0) || !std::isfinite(den)) {
    throw NumericalError("closed-form purity left the physical branch");
  }
  return std::sqrt(num / den);
}

double dpo_me_purity(double k) { return 2.0 * std::sqrt(k * (1.0 - k)); }

double small_bandwidth_coefficient(double k) {
  double d = 1.0 - 2.0 * k;
  return 0.25 * d * d * (1.0 + k) * (1.0 + k) / (std::pow(k, 3.5) * std::pow(1.0 - k, 1.5));
}

double large_bandwidth_coefficient(double k) {
  double d = 1.0 - 2.0 * k;
  return 0.25 * d * d / (1.0 - k);
}

}  // namespace qtraj
