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
#include <iosfwd>
#include <span>
#include <string>
#include <string_view>
#include <vector>

#include "qtraj/apd.hpp"
#include "qtraj/homodyne.hpp"
#include "qtraj/master_equation.hpp"

namespace qtraj {

enum class DetectionScheme { apd_direct, apd_adaptive, homodyne_x, homodyne_y };
enum class Observer { perfect, intermediate, realistic };

std::string_view scheme_name(DetectionScheme s);
DetectionScheme parse_scheme(std::string_view name);
bool is_counting(DetectionScheme s);
std::string_view observer_name(Observer o);
Observer parse_observer(std::string_view name);

struct SchemeConfig {
  DetectionScheme scheme = DetectionScheme::apd_direct;
  SystemParams system;
  ApdParams apd;
  PrParams pr;  // phi is set from the scheme
  double dt = 0.0;  // 0 selects 1e-4 for counting and 1e-5 for homodyne
  GridOptions grid;

  double effective_dt() const;
};

struct EnsembleOptions {
  double transient = 10.0;
  double spacing = 1.0;
  std::size_t samples = 1000;
  std::size_t trajectories = 1;
  std::size_t batch = 10;
  Observer observer = Observer::realistic;
};

struct BatchStats {
  double mean = 0.0;
  double se = 0.0;
  std::size_t batches = 0;
};

// Mean and batch-means standard error; the trailing partial batch is dropped
// from the error estimate only.
BatchStats batch_means(std::span<const double> x, std::size_t batch);
double lag1_autocorrelation(std::span<const double> x);

// Purities of one trajectory sampled every options.spacing after the
// transient.
std::vector<double> sample_purities(const SchemeConfig& config, const EnsembleOptions& options,
                                    std::size_t count, std::uint64_t seed, std::uint64_t stream);

struct PurityEstimate {
  double mean = 0.0;
  double se = 0.0;
  std::size_t samples = 0;
};

PurityEstimate ensemble_average_purity(const SchemeConfig& config, const EnsembleOptions& options,
                                       std::uint64_t seed);

struct PuritySweepPoint {
  DetectionScheme scheme = DetectionScheme::apd_direct;
  double variable = 0.0;
  double omega = 0.0;
  double gamma = 0.0;  // photoreceiver bandwidth, homodyne only
  double noise = 0.0;  // photoreceiver noise ratio, homodyne only
  double purity = 0.0;
  double se = 0.0;
  double p_me = 0.0;
  double scaled = 0.0;
  double scaled_se = 0.0;
  std::size_t samples = 0;
};

std::vector<PuritySweepPoint> purity_vs_omega_sweep(const SchemeConfig& base,
                                                    std::span<const double> omegas,
                                                    const EnsembleOptions& options,
                                                    std::uint64_t seed);

// N such that gamma sqrt((1 - N)/N) = b.
double noise_for_bandwidth(double b, double gamma);

// Homodyne purity at fixed effective bandwidth for a list of gamma values;
// omega, eta and the quadrature come from the base config.
std::vector<PuritySweepPoint> effective_bandwidth_sweep(double b, std::span<const double> gammas,
                                                        const SchemeConfig& base,
                                                        const EnsembleOptions& options,
                                                        std::uint64_t seed);

std::vector<std::string> sweep_columns();
void write_sweep_csv(std::ostream& os, const std::vector<PuritySweepPoint>& points,
                     const std::vector<std::string>& header_comments = {});

}  // namespace qtraj
