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

#include "config.hpp"

#include <algorithm>
#include <charconv>
#include <cmath>
#include <fstream>
#include <functional>
#include <sstream>

#include <boost/property_tree/ini_parser.hpp>
#include <boost/property_tree/ptree.hpp>

#include "qtraj/trajectory.hpp"

namespace qtraj::cli {

namespace {

std::string trim(std::string_view s) {
  auto b = s.find_first_not_of(" \t\r");
  if (b == std::string_view::npos) return {};
  auto e = s.find_last_not_of(" \t\r");
  return std::string(s.substr(b, e - b + 1));
}

double to_double(const std::string& key, const std::string& text) {
  std::string s = trim(text);
  double v = 0.0;
  auto res = std::from_chars(s.data(), s.data() + s.size(), v);
  if (res.ec != std::errc() || res.ptr != s.data() + s.size() || !std::isfinite(v)) {
    throw ConfigError(key + ": expected a finite number, got '" + text + "'");
  }
  return v;
}

std::uint64_t to_uint(const std::string& key, const std::string& text) {
  std::string s = trim(text);
  std::uint64_t v = 0;
  auto res = std::from_chars(s.data(), s.data() + s.size(), v);
  if (res.ec != std::errc() || res.ptr != s.data() + s.size()) {
    throw ConfigError(key + ": expected a non-negative integer, got '" + text + "'");
  }
  return v;
}

bool to_bool(const std::string& key, const std::string& text) {
  std::string s = trim(text);
  if (s == "true" || s == "1" || s == "yes") return true;
  if (s == "false" || s == "0" || s == "no") return false;
  throw ConfigError(key + ": expected true or false, got '" + text + "'");
}

std::vector<double> to_list(const std::string& key, const std::string& text) {
  std::vector<double> out;
  std::stringstream ss(text);
  std::string item;
  while (std::getline(ss, item, ',')) out.push_back(to_double(key, item));
  if (out.empty()) throw ConfigError(key + ": expected a comma-separated list of numbers");
  return out;
}

std::string from_list(const std::vector<double>& v) {
  std::string s;
  for (std::size_t i = 0; i < v.size(); ++i) s += (i ? "," : "") + format_double(v[i]);
  return s;
}

struct Field {
  std::string section;
  std::string key;
  bool published = false;  // default equals the published parameter set
  std::function<std::string(const RunConfig&)> get;
  std::function<void(RunConfig&, const std::string&)> set;

  std::string name() const { return section + "." + key; }
};

template <class T>
T& as(RunConfig& c) {
  return std::get<T>(c.detector);
}
template <class T>
const T& as(const RunConfig& c) {
  return std::get<T>(c.detector);
}

#define QTRAJ_DOUBLE(sec, k, pub, expr)                                              \
  Field {                                                                           \
    sec, #k, pub, [](const RunConfig& c) { return format_double(expr); },           \
        [](RunConfig& c, const std::string& s) { expr = to_double(sec "." #k, s); } \
  }
#define QTRAJ_UINT(sec, k, pub, expr)                                                      \
  Field {                                                                                 \
    sec, #k, pub, [](const RunConfig& c) { return std::to_string(expr); },                \
        [](RunConfig& c, const std::string& s) {                                          \
          expr = static_cast<std::decay_t<decltype(expr)>>(to_uint(sec "." #k, s));       \
        }                                                                                 \
  }

std::vector<Field> fields_for(Family f) {
  std::vector<Field> out = {
      Field{"run", "scheme", false, [](const RunConfig& c) { return c.scheme; },
            [](RunConfig&, const std::string&) {}},
      QTRAJ_UINT("run", seed, false, c.seed),
      QTRAJ_DOUBLE("run", duration, false, c.duration),
      QTRAJ_DOUBLE("run", dt, false, c.dt),
      QTRAJ_DOUBLE("run", sample_interval, false, c.sample_interval),
      Field{"run", "out_dir", false, [](const RunConfig& c) { return c.out_dir; },
            [](RunConfig& c, const std::string& s) { c.out_dir = trim(s); }},
      QTRAJ_DOUBLE("system", omega, true, c.system.omega),
      QTRAJ_DOUBLE("system", gamma, false, c.system.gamma),
  };
  switch (f) {
    case Family::apd:
      out.push_back(QTRAJ_DOUBLE("apd", eta, true, as<ApdParams>(c).eta));
      out.push_back(QTRAJ_DOUBLE("apd", gamma_r, true, as<ApdParams>(c).gamma_r));
      out.push_back(QTRAJ_DOUBLE("apd", tau_dd, true, as<ApdParams>(c).tau_dd));
      out.push_back(QTRAJ_DOUBLE("apd", gamma_dk, true, as<ApdParams>(c).gamma_dk));
      break;
    case Family::pr:
      out.push_back(QTRAJ_DOUBLE("pr", gamma, true, as<PrParams>(c).gamma));
      out.push_back(QTRAJ_DOUBLE("pr", noise, true, as<PrParams>(c).noise));
      out.push_back(QTRAJ_DOUBLE("pr", eta, true, as<PrParams>(c).eta));
      out.push_back(QTRAJ_UINT("pr", grid_points, false, c.grid.points));
      out.push_back(QTRAJ_DOUBLE("pr", grid_span, false, c.grid.span_sigmas));
      out.push_back(QTRAJ_DOUBLE("pr", edge_mass_limit, false, c.grid.edge_mass_limit));
      out.push_back(Field{
          "pr", "record_distribution", false,
          [](const RunConfig& c) { return std::string(c.record_distribution ? "true" : "false"); },
          [](RunConfig& c, const std::string& s) {
            c.record_distribution = to_bool("pr.record_distribution", s);
          }});
      break;
    case Family::dpo:
      out.push_back(QTRAJ_DOUBLE("dpo", chi, false, as<DpoTableParams>(c).chi));
      out.push_back(QTRAJ_DOUBLE("dpo", eta, false, as<DpoTableParams>(c).eta));
      out.push_back(QTRAJ_DOUBLE("dpo", noise, false, as<DpoTableParams>(c).noise));
      out.push_back(Field{
          "dpo", "bandwidths", false,
          [](const RunConfig& c) { return from_list(as<DpoTableParams>(c).bandwidths); },
          [](RunConfig& c, const std::string& s) {
            as<DpoTableParams>(c).bandwidths = to_list("dpo.bandwidths", s);
          }});
      break;
  }
  out.push_back(Field{"sweep", "omegas", false,
                      [](const RunConfig& c) { return from_list(c.omegas); },
                      [](RunConfig& c, const std::string& s) { c.omegas = to_list("sweep.omegas", s); }});
  out.push_back(Field{"sweep", "gammas", false,
                      [](const RunConfig& c) { return from_list(c.gammas); },
                      [](RunConfig& c, const std::string& s) { c.gammas = to_list("sweep.gammas", s); }});
  out.push_back(QTRAJ_DOUBLE("sweep", bandwidth, true, c.bandwidth));
  out.push_back(QTRAJ_UINT("sweep", samples, true, c.samples));
  out.push_back(QTRAJ_UINT("sweep", trajectories, false, c.trajectories));
  out.push_back(QTRAJ_UINT("sweep", batch, false, c.batch));
  out.push_back(QTRAJ_DOUBLE("sweep", transient, false, c.transient));
  out.push_back(QTRAJ_DOUBLE("sweep", spacing, true, c.spacing));
  out.push_back(Field{"sweep", "observer", false,
                      [](const RunConfig& c) { return std::string(observer_name(c.observer)); },
                      [](RunConfig& c, const std::string& s) {
                        try {
                          c.observer = parse_observer(trim(s));
                        } catch (const InvalidArgument& e) {
                          throw ConfigError(std::string("sweep.observer: ") + e.what());
                        }
                      }});
  return out;
}

#undef QTRAJ_DOUBLE
#undef QTRAJ_UINT

const char* family_section(Family f) {
  switch (f) {
    case Family::apd: return "apd";
    case Family::pr: return "pr";
    case Family::dpo: return "dpo";
  }
  return "";
}

std::string default_scheme(Family f) {
  switch (f) {
    case Family::apd: return "apd-direct";
    case Family::pr: return "pr-x";
    case Family::dpo: return "dpo";
  }
  return "";
}

void reset_detector(RunConfig& c) {
  switch (family_of(c.scheme)) {
    case Family::apd: c.detector = ApdParams{}; break;
    case Family::pr: c.detector = PrParams{}; break;
    case Family::dpo: c.detector = DpoTableParams{}; break;
  }
}

void require(bool ok, const std::string& message) {
  if (!ok) throw ConfigError(message);
}

}  // namespace

void DpoTableParams::validate() const {
  require(std::abs(chi) < 1.0, "dpo.chi must satisfy |chi| < 1");
  require(eta > 0.0 && eta <= 1.0, "dpo.eta must lie in (0, 1]");
  require(noise > 0.0 && noise < 1.0, "dpo.noise must lie in (0, 1)");
  for (double b : bandwidths) require(b > 0.0, "dpo.bandwidths must all be > 0");
}

Family family_of(std::string_view scheme) {
  if (scheme == "apd-direct" || scheme == "apd-adaptive") return Family::apd;
  if (scheme == "pr-x" || scheme == "pr-y") return Family::pr;
  if (scheme == "dpo") return Family::dpo;
  throw ConfigError("run.scheme: unknown scheme '" + std::string(scheme) +
                    "' (expected apd-direct, apd-adaptive, pr-x, pr-y or dpo)");
}

Family RunConfig::family() const { return family_of(scheme); }

const ApdParams& RunConfig::apd() const {
  if (family() != Family::apd) throw ConfigError("scheme " + scheme + " has no [apd] detector");
  return std::get<ApdParams>(detector);
}

PrParams RunConfig::pr() const {
  if (family() != Family::pr) throw ConfigError("scheme " + scheme + " has no [pr] detector");
  PrParams p = std::get<PrParams>(detector);
  p.phi = lo_phase(scheme == "pr-x" ? Quadrature::x : Quadrature::y);
  return p;
}

const DpoTableParams& RunConfig::dpo() const {
  if (family() != Family::dpo) throw ConfigError("scheme " + scheme + " has no [dpo] section");
  return std::get<DpoTableParams>(detector);
}

SchemeConfig RunConfig::scheme_config() const {
  SchemeConfig s;
  s.scheme = parse_scheme(scheme);
  s.system = system;
  if (family() == Family::apd) s.apd = apd();
  if (family() == Family::pr) s.pr = pr();
  s.dt = dt;
  s.grid = grid;
  return s;
}

EnsembleOptions RunConfig::ensemble_options() const {
  EnsembleOptions o;
  o.transient = transient;
  o.spacing = spacing;
  o.samples = samples;
  o.trajectories = trajectories;
  o.batch = batch;
  o.observer = observer;
  return o;
}

double RunConfig::effective_dt() const {
  if (dt > 0.0) return dt;
  return family() == Family::pr ? 1e-5 : 1e-4;
}

void RunConfig::validate() const {
  Family f = family();
  try {
    system.validate();
    if (f == Family::apd) apd().validate();
    if (f == Family::pr) pr().validate();
  } catch (const InvalidArgument& e) {
    throw ConfigError(e.what());
  }
  if (f == Family::pr) {
    require(pr().noise < 1.0,
            "pr.noise = " + format_double(pr().noise) +
                " must be < 1: the effective bandwidth gamma sqrt((1 - N)/N) only applies for "
                "small N");
    require(grid.points >= 8, "pr.grid_points must be at least 8");
    require(grid.span_sigmas > 0.0, "pr.grid_span must be > 0");
    require(grid.edge_mass_limit > 0.0 && grid.edge_mass_limit < 1.0,
            "pr.edge_mass_limit must lie in (0, 1)");
  }
  if (f == Family::dpo) dpo().validate();
  require(duration > 0.0, "run.duration must be > 0");
  require(dt >= 0.0, "run.dt must be >= 0 (0 selects the scheme default)");
  require(sample_interval >= effective_dt(), "run.sample_interval must be at least one step");
  for (double w : omegas) require(w > 0.0, "sweep.omegas must all be > 0");
  for (double g : gammas) require(g > 0.0, "sweep.gammas must all be > 0");
  require(bandwidth > 0.0, "sweep.bandwidth must be > 0");
  require(trajectories >= 1, "sweep.trajectories must be >= 1");
  require(batch >= 1, "sweep.batch must be >= 1");
  require(samples >= 2 * batch * trajectories,
          "sweep.samples must give every trajectory at least two batches (samples >= 2 * batch * "
          "trajectories)");
  require(transient >= 0.0, "sweep.transient must be >= 0");
  require(spacing >= effective_dt(), "sweep.spacing must be at least one step");
}

ParsedConfig parse_config(const std::string& text, Family fallback) {
  // '#' comments are accepted as well as ';'. Blank them out, keeping line
  // numbers for parser messages.
  std::string cleaned;
  {
    std::istringstream is(text);
    std::string line;
    while (std::getline(is, line)) {
      std::string t = trim(line);
      cleaned += (!t.empty() && t[0] == '#') ? "" : line;
      cleaned += '\n';
    }
  }
  boost::property_tree::ptree tree;
  try {
    std::istringstream is(cleaned);
    boost::property_tree::ini_parser::read_ini(is, tree);
  } catch (const boost::property_tree::ini_parser_error& e) {
    throw ConfigError("malformed config at line " + std::to_string(e.line()) + ": " + e.message());
  }

  // The INI reader drops sections without keys, so headers are collected from
  // the text itself.
  const std::set<std::string> known = {"run", "system", "apd", "pr", "dpo", "sweep"};
  std::vector<std::string> detector_sections;
  {
    std::istringstream is(cleaned);
    std::string line;
    while (std::getline(is, line)) {
      std::string t = trim(line);
      if (t.size() < 2 || t.front() != '[' || t.back() != ']') continue;
      std::string name = trim(std::string_view(t).substr(1, t.size() - 2));
      if (!known.count(name)) throw ConfigError("unknown section [" + name + "]");
      if (name == "apd" || name == "pr" || name == "dpo") detector_sections.push_back(name);
    }
  }
  for (const auto& [name, sec] : tree) {
    if (sec.empty() && !sec.data().empty()) {
      throw ConfigError("key '" + name + "' appears outside a section");
    }
  }
  if (detector_sections.size() > 1) {
    throw ConfigError("exactly one detector section is allowed, found [" + detector_sections[0] +
                      "] and [" + detector_sections[1] + "]");
  }

  ParsedConfig out;
  RunConfig& c = out.config;
  if (auto s = tree.get_optional<std::string>("run.scheme")) {
    c.scheme = trim(*s);
    family_of(c.scheme);
    out.explicit_keys.insert("run.scheme");
  } else if (!detector_sections.empty()) {
    c.scheme = default_scheme(detector_sections[0] == "apd"  ? Family::apd
                              : detector_sections[0] == "pr" ? Family::pr
                                                             : Family::dpo);
  } else {
    c.scheme = default_scheme(fallback);
  }
  if (!detector_sections.empty() && detector_sections[0] != family_section(c.family())) {
    throw ConfigError("section [" + detector_sections[0] + "] does not apply to scheme " +
                      c.scheme);
  }
  reset_detector(c);

  auto fields = fields_for(c.family());
  for (const auto& [sname, sec] : tree) {
    for (const auto& [key, value] : sec) {
      std::string full = sname + "." + key;
      auto it = std::find_if(fields.begin(), fields.end(),
                             [&](const Field& f) { return f.name() == full; });
      if (it == fields.end()) throw ConfigError("unknown key " + full);
      it->set(c, value.data());
      out.explicit_keys.insert(full);
    }
  }
  c.validate();
  return out;
}

ParsedConfig load_config(const std::string& path, Family fallback) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw IoError("cannot open config file " + path);
  std::ostringstream ss;
  ss << in.rdbuf();
  return parse_config(ss.str(), fallback);
}

std::string to_ini(const RunConfig& c) {
  std::string out;
  std::string section;
  for (const auto& f : fields_for(c.family())) {
    if (f.section != section) {
      if (!section.empty()) out += '\n';
      section = f.section;
      out += "[" + section + "]\n";
    }
    out += f.key + " = " + f.get(c) + "\n";
  }
  return out;
}

bool operator==(const RunConfig& a, const RunConfig& b) { return to_ini(a) == to_ini(b); }

std::vector<std::string> header_lines(const RunConfig& c, std::string_view command) {
  std::vector<std::string> out;
  out.push_back("# qtraj-cli " + std::string(command));
  out.push_back("# seed = " + std::to_string(c.seed));
  out.emplace_back(kEchoBegin);
  std::istringstream is(to_ini(c));
  std::string line;
  while (std::getline(is, line)) out.push_back(line.empty() ? "#" : "# " + line);
  out.emplace_back(kEchoEnd);
  return out;
}

RunConfig parse_header(const std::string& csv_text) {
  std::istringstream is(csv_text);
  std::string line;
  bool inside = false;
  bool closed = false;
  std::string ini;
  while (std::getline(is, line)) {
    if (line == kEchoBegin) {
      inside = true;
      continue;
    }
    if (line == kEchoEnd) {
      closed = inside;
      break;
    }
    if (!inside) continue;
    if (line.empty() || line[0] != '#') throw ConfigError("config echo interrupted");
    ini += line.size() > 2 ? line.substr(2) : std::string();
    ini += '\n';
  }
  if (!closed) throw ConfigError("no config echo found");
  return parse_config(ini).config;
}

std::string validation_report(const ParsedConfig& parsed) {
  const RunConfig& c = parsed.config;
  std::string out = "config ok: scheme " + c.scheme + "\n";
  std::size_t defaulted = 0, published = 0;
  for (const auto& f : fields_for(c.family())) {
    std::string tag;
    if (parsed.explicit_keys.count(f.name())) {
      tag = "set";
    } else {
      ++defaulted;
      tag = "default";
      if (f.published) {
        ++published;
        tag += ", published value";
      }
    }
    out += f.name() + " = " + f.get(c) + "  [" + tag + "]\n";
  }
  out += std::to_string(defaulted) + " defaulted fields, " + std::to_string(published) +
         " of them published values\n";
  return out;
}

}  // namespace qtraj::cli
