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
#include <set>
#include <string>
#include <string_view>
#include <variant>
#include <vector>

#include "qtraj/analysis.hpp"
#include "qtraj/apd.hpp"
#include "qtraj/errors.hpp"
#include "qtraj/homodyne.hpp"
#include "qtraj/master_equation.hpp"

namespace qtraj::cli {

class ConfigError : public Error {
 public:
  using Error::Error;
  const char* code() const noexcept override { return "config"; }
};

class IoError : public Error {
 public:
  using Error::Error;
  const char* code() const noexcept override { return "io"; }
};

// Parameters of the steady-state purity table for the parametric oscillator.
// The full covariance equations are solved at gamma = B sqrt(noise).
struct DpoTableParams {
  double chi = 0.5;
  double eta = 1.0;
  double noise = 1e-4;
  std::vector<double> bandwidths{0.01, 0.1, 1.0, 10.0, 100.0};

  void validate() const;
};

enum class Family { apd, pr, dpo };

struct RunConfig {
  // [run]
  std::string scheme = "apd-direct";  // apd-direct, apd-adaptive, pr-x, pr-y or dpo
  std::uint64_t seed = 1;
  double duration = 20.0;
  double dt = 0.0;  // 0 picks 1e-4 for counting and 1e-5 for homodyne
  double sample_interval = 0.01;
  std::string out_dir = ".";

  SystemParams system;
  std::variant<ApdParams, PrParams, DpoTableParams> detector;
  GridOptions grid;  // keys live in [pr]
  bool record_distribution = true;

  // [sweep]
  std::vector<double> omegas{1.0, 2.0, 5.0, 10.0, 20.0};
  std::vector<double> gammas{2.0, 5.0, 10.0, 20.0};
  double bandwidth = 20.0;
  std::size_t samples = 1000;
  std::size_t trajectories = 4;
  std::size_t batch = 10;
  double transient = 10.0;
  double spacing = 1.0;
  Observer observer = Observer::realistic;

  Family family() const;
  const ApdParams& apd() const;
  PrParams pr() const;  // phi set from the scheme
  const DpoTableParams& dpo() const;
  SchemeConfig scheme_config() const;
  EnsembleOptions ensemble_options() const;
  double effective_dt() const;

  void validate() const;
};

Family family_of(std::string_view scheme);

struct ParsedConfig {
  RunConfig config;
  std::set<std::string> explicit_keys;  // "section.key"
};

// INI text with sections [run], [system], [apd] | [pr] | [dpo], [sweep].
// At most one detector section may appear; it must match the scheme. With no
// scheme and no detector section the scheme defaults to `fallback`.
ParsedConfig parse_config(const std::string& text, Family fallback = Family::apd);
ParsedConfig load_config(const std::string& path, Family fallback = Family::apd);

// Canonical INI form with every field written out.
std::string to_ini(const RunConfig& c);
bool operator==(const RunConfig& a, const RunConfig& b);

inline constexpr std::string_view kEchoBegin = "# ---- begin config ----";
inline constexpr std::string_view kEchoEnd = "# ---- end config ----";

// Comment block for CSV headers: a title line, the seed and the full config.
std::vector<std::string> header_lines(const RunConfig& c, std::string_view command);
// Reads the config back out of a file produced with header_lines.
RunConfig parse_header(const std::string& csv_text);

// One line per field: value and whether it was set, defaulted or defaulted to
// a published parameter value.
std::string validation_report(const ParsedConfig& parsed);

}  // namespace qtraj::cli
