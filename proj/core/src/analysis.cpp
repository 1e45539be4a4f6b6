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

#include "qtraj/analysis.hpp"

#include <cmath>
#include <ostream>
#include <string>

#include "qtraj/errors.hpp"
#include "qtraj/parallel.hpp"

namespace qtraj {

std::string_view scheme_name(DetectionScheme s) {
  switch (s) {
    case DetectionScheme::apd_direct:
      return "apd-direct";
    case DetectionScheme::apd_adaptive:
      return "apd-adaptive";
    case DetectionScheme::homodyne_x:
      return "pr-x";
    case DetectionScheme::homodyne_y:
      return "pr-y";
  }
  return "unknown";
}

DetectionScheme parse_scheme(std::string_view name) {
  for (auto s : {DetectionScheme::apd_direct, DetectionScheme::apd_adaptive,
                 DetectionScheme::homodyne_x, DetectionScheme::homodyne_y}) {
    if (scheme_name(s) == name) return s;
  }
  throw InvalidArgument("unknown detection scheme '" + std::string(name) +
                        "' (expected apd-direct, apd-adaptive, pr-x or pr-y)");
}

bool is_counting(DetectionScheme s) {
  return s == DetectionScheme::apd_direct || s == DetectionScheme::apd_adaptive;
}

std::string_view observer_name(Observer o) {
  switch (o) {
    case Observer::perfect:
      return "perfect";
    case Observer::intermediate:
      return "intermediate";
    case Observer::realistic:
      return "realistic";
  }
  return "unknown";
}

Observer parse_observer(std::string_view name) {
  for (auto o : {Observer::perfect, Observer::intermediate, Observer::realistic}) {
    if (observer_name(o) == name) return o;
  }
  throw InvalidArgument("unknown observer '" + std::string(name) + "'");
}

double SchemeConfig::effective_dt() const {
  if (dt > 0.0) return dt;
  return is_counting(scheme) ? 1e-4 : 1e-5;
}

BatchStats batch_means(std::span<const double> x, std::size_t batch) {
  if (batch == 0) throw InvalidArgument("batch size must be positive");
  std::size_t nb = x.size() / batch;
  if (nb < 2) {
    throw InvalidArgument("insufficient samples: " + std::to_string(x.size()) +
                          " samples give fewer than two batches of " + std::to_string(batch));
  }
  BatchStats st;
  double total = 0.0;
  for (double v : x) total += v;
  st.mean = total / static_cast<double>(x.size());
  std::vector<double> means(nb, 0.0);
  double mm = 0.0;
  for (std::size_t b = 0; b < nb; ++b) {
    for (std::size_t i = 0; i < batch; ++i) means[b] += x[b * batch + i];
    means[b] /= static_cast<double>(batch);
    mm += means[b];
  }
  mm /= static_cast<double>(nb);
  double ss = 0.0;
  for (double m : means) ss += (m - mm) * (m - mm);
  st.se = std::sqrt(ss / static_cast<double>(nb - 1) / static_cast<double>(nb));
  st.batches = nb;
  return st;
}

double lag1_autocorrelation(std::span<const double> x) {
  if (x.size() < 3) throw InvalidArgument("need at least three samples for an autocorrelation");
  double m = 0.0;
  for (double v : x) m += v;
  m /= static_cast<double>(x.size());
  double c0 = 0.0, c1 = 0.0;
  for (std::size_t i = 0; i < x.size(); ++i) {
    c0 += (x[i] - m) * (x[i] - m);
    if (i + 1 < x.size()) c1 += (x[i] - m) * (x[i + 1] - m);
  }
  return c0 > 0.0 ? c1 / c0 : 0.0;
}

namespace {
double observer_purity(const TripleSample& s, Observer o) {
  switch (o) {
    case Observer::perfect:
      return s.perfect.purity();
    case Observer::intermediate:
      return s.intermediate.purity();
    case Observer::realistic:
      return s.realistic.purity();
  }
  return 0.0;
}

template <class Sim>
std::vector<double> collect(Sim& sim, const EnsembleOptions& options, double dt,
                            std::size_t count) {
  std::int64_t transient = steps_for(options.transient, dt);
  std::int64_t spacing = steps_for(options.spacing, dt);
  if (spacing <= 0) throw InvalidArgument("sample spacing must be at least one step");
  std::vector<double> out;
  out.reserve(count);
  while (sim.steps() < transient) sim.step();
  while (out.size() < count) {
    for (std::int64_t i = 0; i < spacing; ++i) sim.step();
    out.push_back(observer_purity(sim.sample(), options.observer));
  }
  return out;
}
}  // namespace

std::vector<double> sample_purities(const SchemeConfig& config, const EnsembleOptions& options,
                                    std::size_t count, std::uint64_t seed, std::uint64_t stream) {
  const double dt = config.effective_dt();
  if (is_counting(config.scheme)) {
    CountingScheme cs = config.scheme == DetectionScheme::apd_direct ? CountingScheme::direct
                                                                     : CountingScheme::adaptive;
    ApdTripleSimulator sim(config.system, config.apd, cs, dt, seed, stream);
    return collect(sim, options, dt, count);
  }
  PrParams pr = config.pr;
  pr.phi = lo_phase(config.scheme == DetectionScheme::homodyne_x ? Quadrature::x : Quadrature::y);
  HomodyneTripleSimulator sim(config.system, pr, dt, seed, stream, config.grid);
  return collect(sim, options, dt, count);
}

namespace {
struct Job {
  std::size_t point;
  std::size_t trajectory;
  std::size_t count;
};

std::vector<Job> plan_jobs(std::size_t points, const EnsembleOptions& options) {
  if (options.trajectories == 0) throw InvalidArgument("need at least one trajectory");
  if (options.samples < options.trajectories) {
    throw InvalidArgument("fewer samples than trajectories");
  }
  std::vector<Job> jobs;
  for (std::size_t p = 0; p < points; ++p) {
    for (std::size_t t = 0; t < options.trajectories; ++t) {
      std::size_t count = options.samples / options.trajectories +
                          (t < options.samples % options.trajectories ? 1 : 0);
      jobs.push_back({p, t, count});
    }
  }
  return jobs;
}

// Batches never straddle two trajectories.
PurityEstimate reduce(const std::vector<std::vector<double>>& per_traj, std::size_t batch) {
  std::vector<double> all;
  std::vector<double> batched;
  for (const auto& v : per_traj) {
    all.insert(all.end(), v.begin(), v.end());
    std::size_t usable = v.size() / batch * batch;
    batched.insert(batched.end(), v.begin(), v.begin() + static_cast<std::ptrdiff_t>(usable));
  }
  BatchStats st = batch_means(batched, batch);
  double total = 0.0;
  for (double x : all) total += x;
  return {total / static_cast<double>(all.size()), st.se, all.size()};
}

std::vector<PurityEstimate> run_points(const std::vector<SchemeConfig>& configs,
                                       const EnsembleOptions& options, std::uint64_t seed) {
  std::vector<Job> jobs = plan_jobs(configs.size(), options);
  std::vector<std::vector<double>> results(jobs.size());
  parallel_for(jobs.size(), [&](std::size_t i) {
    const Job& j = jobs[i];
    results[i] = sample_purities(configs[j.point], options, j.count, seed, j.trajectory);
  });
  std::vector<PurityEstimate> out;
  for (std::size_t p = 0; p < configs.size(); ++p) {
    std::vector<std::vector<double>> per;
    for (std::size_t i = 0; i < jobs.size(); ++i)
      if (jobs[i].point == p) per.push_back(results[i]);
    out.push_back(reduce(per, options.batch));
  }
  return out;
}

PuritySweepPoint make_point(const SchemeConfig& c, double variable, const PurityEstimate& e) {
  PuritySweepPoint pt;
  pt.scheme = c.scheme;
  pt.variable = variable;
  pt.omega = c.system.omega;
  if (!is_counting(c.scheme)) {
    pt.gamma = c.pr.gamma;
    pt.noise = c.pr.noise;
  }
  pt.purity = e.mean;
  pt.se = e.se;
  pt.samples = e.samples;
  pt.p_me = me_steady_purity(c.system);
  pt.scaled = scaled_purity(e.mean, pt.p_me);
  pt.scaled_se = e.se / (1.0 - pt.p_me);
  return pt;
}
}  // namespace

PurityEstimate ensemble_average_purity(const SchemeConfig& config, const EnsembleOptions& options,
                                       std::uint64_t seed) {
  return run_points({config}, options, seed).front();
}

std::vector<PuritySweepPoint> purity_vs_omega_sweep(const SchemeConfig& base,
                                                    std::span<const double> omegas,
                                                    const EnsembleOptions& options,
                                                    std::uint64_t seed) {
  std::vector<SchemeConfig> configs;
  for (double w : omegas) {
    SchemeConfig c = base;
    c.system.omega = w;
    c.system.validate();
    if (!(w > 0.0)) throw InvalidArgument("purity sweeps need omega > 0");
    configs.push_back(c);
  }
  auto est = run_points(configs, options, seed);
  std::vector<PuritySweepPoint> out;
  for (std::size_t i = 0; i < configs.size(); ++i)
    out.push_back(make_point(configs[i], omegas[i], est[i]));
  return out;
}

double noise_for_bandwidth(double b, double gamma) {
  if (!(b > 0.0) || !(gamma > 0.0)) throw InvalidArgument("bandwidth and gamma must be positive");
  double n = gamma * gamma / (b * b + gamma * gamma);
  if (!(n < 1.0)) {
    throw InvalidArgument("gamma = " + std::to_string(gamma) +
                          " needs N >= 1, outside the small-N regime of the bandwidth law");
  }
  return n;
}

std::vector<PuritySweepPoint> effective_bandwidth_sweep(double b, std::span<const double> gammas,
                                                        const SchemeConfig& base,
                                                        const EnsembleOptions& options,
                                                        std::uint64_t seed) {
  if (is_counting(base.scheme)) {
    throw InvalidArgument("the effective-bandwidth sweep needs a homodyne scheme");
  }
  std::vector<SchemeConfig> configs;
  for (double g : gammas) {
    SchemeConfig c = base;
    c.pr.gamma = g;
    c.pr.noise = noise_for_bandwidth(b, g);
    c.pr.validate();
    configs.push_back(c);
  }
  auto est = run_points(configs, options, seed);
  std::vector<PuritySweepPoint> out;
  for (std::size_t i = 0; i < configs.size(); ++i)
    out.push_back(make_point(configs[i], gammas[i], est[i]));
  return out;
}

std::vector<std::string> sweep_columns() {
  return {"scheme", "variable", "omega",  "gamma",     "noise",  "purity",
          "se",     "p_me",     "scaled", "scaled_se", "samples"};
}

void write_sweep_csv(std::ostream& os, const std::vector<PuritySweepPoint>& points,
                     const std::vector<std::string>& header_comments) {
  for (const auto& c : header_comments) os << c << '\n';
  auto cols = sweep_columns();
  for (std::size_t i = 0; i < cols.size(); ++i) os << (i ? "," : "") << cols[i];
  os << '\n';
  for (const auto& p : points) {
    os << scheme_name(p.scheme) << ',' << format_double(p.variable) << ','
       << format_double(p.omega) << ',' << format_double(p.gamma) << ','
       << format_double(p.noise) << ',' << format_double(p.purity) << ','
       << format_double(p.se) << ',' << format_double(p.p_me) << ','
       << format_double(p.scaled) << ',' << format_double(p.scaled_se) << ',' << p.samples
       << '\n';
  }
}

}  // namespace qtraj
