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

#include "commands.hpp"

#include <cmath>
#include <filesystem>
#include <fstream>
#include <functional>
#include <optional>
#include <ostream>

#include <CLI11.hpp>

#include "qtraj/analysis.hpp"
#include "qtraj/apd.hpp"
#include "qtraj/homodyne.hpp"
#include "qtraj/trajectory.hpp"

namespace qtraj::cli {

namespace {

std::string write_file(const RunConfig& c, const std::string& name,
                       const std::function<void(std::ostream&)>& body) {
  std::filesystem::path dir(c.out_dir);
  std::error_code ec;
  std::filesystem::create_directories(dir, ec);
  if (ec) throw IoError("cannot create output directory " + c.out_dir + ": " + ec.message());
  std::filesystem::path path = dir / name;
  std::ofstream os(path, std::ios::binary | std::ios::trunc);
  if (!os) throw IoError("cannot open " + path.string() + " for writing");
  body(os);
  os.flush();
  if (!os) throw IoError("failed writing " + path.string());
  return path.string();
}

void require_family(const RunConfig& c, std::initializer_list<Family> allowed,
                    std::string_view command) {
  for (Family f : allowed)
    if (c.family() == f) return;
  throw ConfigError(std::string(command) + " does not support scheme " + c.scheme);
}

}  // namespace

std::vector<DpoTableRow> dpo_table(const DpoTableParams& p) {
  p.validate();
  const double k = 0.5 * (1.0 - p.chi);
  std::vector<DpoTableRow> rows;
  for (double b : p.bandwidths) {
    DpoTableRow r;
    r.b = b;
    r.chi = p.chi;
    r.eta = p.eta;
    r.noise = p.noise;
    r.gamma = b * std::sqrt(p.noise);
    r.scaled = scaled_steady_covariances(b, k, p.eta);
    r.dy = unconditioned_y_variance(p.chi);
    r.purity = purity_closed_form(b, k, p.eta);
    r.purity_covariance = gaussian_purity(r.scaled.dx, r.dy);
    Covariances full = steady_covariances(DpoParams{p.chi, r.gamma, p.noise, p.eta});
    r.purity_full = gaussian_purity(full.dx, r.dy);
    r.p_me = dpo_me_purity(k);
    rows.push_back(r);
  }
  return rows;
}

std::vector<std::string> dpo_columns() {
  return {"b",  "chi", "eta", "noise",  "gamma",             "dx",          "dv",
          "dxv", "dy", "purity", "purity_covariance", "purity_full", "p_me"};
}

void write_dpo_csv(std::ostream& os, const std::vector<DpoTableRow>& rows,
                   const std::vector<std::string>& header_comments) {
  for (const auto& c : header_comments) os << c << '\n';
  auto cols = dpo_columns();
  for (std::size_t i = 0; i < cols.size(); ++i) os << (i ? "," : "") << cols[i];
  os << '\n';
  for (const auto& r : rows) {
    const double v[] = {r.b,  r.chi,      r.eta,    r.noise,   r.gamma,
                        r.scaled.dx, r.scaled.dv, r.scaled.dxv, r.dy, r.purity,
                        r.purity_covariance, r.purity_full, r.p_me};
    for (std::size_t i = 0; i < std::size(v); ++i) os << (i ? "," : "") << format_double(v[i]);
    os << '\n';
  }
}

std::vector<std::string> run_trajectory(const RunConfig& c) {
  require_family(c, {Family::apd, Family::pr}, "trajectory");
  auto header = header_lines(c, "trajectory");
  std::vector<std::string> written;
  TripleTrajectory traj;
  if (c.family() == Family::apd) {
    ApdRunOptions o{c.effective_dt(), c.sample_interval};
    traj = c.scheme == "apd-direct" ? run_direct_triple(c.system, c.apd(), c.duration, c.seed, o)
                                    : run_adaptive_triple(c.system, c.apd(), c.duration, c.seed, o);
  } else {
    HomodyneRunOptions o{c.effective_dt(), c.sample_interval, c.grid, c.record_distribution};
    traj = run_homodyne_triple(c.system, c.pr(), c.duration, c.seed, o);
  }
  written.push_back(write_file(c, "trajectory.csv",
                               [&](std::ostream& os) { write_trajectory_csv(os, traj, header); }));
  if (c.family() == Family::pr && c.record_distribution) {
    written.push_back(write_file(
        c, "voltage.csv", [&](std::ostream& os) { write_voltage_csv(os, traj, header); }));
  }
  return written;
}

std::vector<std::string> run_purity_sweep(const RunConfig& c) {
  require_family(c, {Family::apd, Family::pr}, "purity-sweep");
  auto pts = purity_vs_omega_sweep(c.scheme_config(), c.omegas, c.ensemble_options(), c.seed);
  auto header = header_lines(c, "purity-sweep");
  return {write_file(c, "purity_sweep.csv",
                     [&](std::ostream& os) { write_sweep_csv(os, pts, header); })};
}

std::vector<std::string> run_effective_bandwidth(const RunConfig& c) {
  require_family(c, {Family::pr}, "effective-bandwidth");
  auto pts = effective_bandwidth_sweep(c.bandwidth, c.gammas, c.scheme_config(),
                                       c.ensemble_options(), c.seed);
  auto header = header_lines(c, "effective-bandwidth");
  return {write_file(c, "effective_bandwidth.csv",
                     [&](std::ostream& os) { write_sweep_csv(os, pts, header); })};
}

std::vector<std::string> run_dpo_table(const RunConfig& c) {
  require_family(c, {Family::dpo}, "dpo-table");
  auto rows = dpo_table(c.dpo());
  auto header = header_lines(c, "dpo-table");
  return {write_file(c, "dpo_table.csv",
                     [&](std::ostream& os) { write_dpo_csv(os, rows, header); })};
}

namespace {

int exit_code_for(const Error& e) {
  if (dynamic_cast<const ConfigError*>(&e) || dynamic_cast<const InvalidArgument*>(&e)) return 2;
  if (dynamic_cast<const NumericalError*>(&e) || dynamic_cast<const RecordError*>(&e)) return 3;
  if (dynamic_cast<const IoError*>(&e)) return 4;
  return 1;
}

std::string one_line(std::string s) {
  for (char& ch : s)
    if (ch == '\n' || ch == '\r') ch = ' ';
  return s;
}

void print_error(std::ostream& err, std::string_view code, const std::string& message) {
  err << "error: code=" << code << " message=" << one_line(message) << '\n';
}

}  // namespace

int run_cli(int argc, char** argv, std::ostream& out, std::ostream& err) {
  CLI::App app{"Quantum trajectories of a two-level atom observed through realistic detectors",
               "qtraj-cli"};
  app.fallthrough();
  app.require_subcommand(1);

  std::string config_path;
  std::optional<std::uint64_t> seed;
  std::optional<std::string> out_dir;
  std::optional<std::size_t> samples;
  std::optional<double> dt;
  app.add_option("--config", config_path, "INI config file")->check(CLI::ExistingFile);
  app.add_option("--seed", seed, "override run.seed");
  app.add_option("--out-dir", out_dir, "override run.out_dir");
  app.add_option("--samples", samples, "override sweep.samples");
  app.add_option("--dt", dt, "override run.dt");

  struct Command {
    const char* name;
    const char* help;
    Family fallback;
    std::vector<std::string> (*run)(const RunConfig&);
  };
  const Command commands[] = {
      {"trajectory", "one triple trajectory (perfect, intermediate, realistic observers)",
       Family::apd, run_trajectory},
      {"purity-sweep", "steady-state conditional purity against driving strength", Family::apd,
       run_purity_sweep},
      {"effective-bandwidth", "homodyne purity at fixed effective bandwidth", Family::pr,
       run_effective_bandwidth},
      {"dpo-table", "parametric oscillator steady-state purity table", Family::dpo, run_dpo_table},
      {"validate", "check a config and report defaulted fields", Family::apd, nullptr},
  };
  std::vector<CLI::App*> subs;
  for (const auto& cmd : commands) subs.push_back(app.add_subcommand(cmd.name, cmd.help));

  try {
    app.parse(argc, argv);
  } catch (const CLI::CallForHelp& e) {
    return app.exit(e, out, err);
  } catch (const CLI::CallForAllHelp& e) {
    return app.exit(e, out, err);
  } catch (const CLI::ParseError& e) {
    print_error(err, "usage", e.what());
    return 2;
  }

  std::size_t which = 0;
  while (!subs[which]->parsed()) ++which;
  const Command& cmd = commands[which];

  try {
    ParsedConfig parsed = config_path.empty() ? parse_config("", cmd.fallback)
                                              : load_config(config_path, cmd.fallback);
    RunConfig& c = parsed.config;
    if (seed) {
      c.seed = *seed;
      parsed.explicit_keys.insert("run.seed");
    }
    if (out_dir) {
      c.out_dir = *out_dir;
      parsed.explicit_keys.insert("run.out_dir");
    }
    if (samples) {
      c.samples = *samples;
      parsed.explicit_keys.insert("sweep.samples");
    }
    if (dt) {
      c.dt = *dt;
      parsed.explicit_keys.insert("run.dt");
    }
    c.validate();
    if (!cmd.run) {
      out << validation_report(parsed);
      return 0;
    }
    for (const auto& path : cmd.run(c)) out << "wrote " << path << '\n';
    return 0;
  } catch (const Error& e) {
    print_error(err, e.code(), e.what());
    return exit_code_for(e);
  } catch (const std::exception& e) {
    print_error(err, "internal", e.what());
    return 1;
  }
}

}  // namespace qtraj::cli
