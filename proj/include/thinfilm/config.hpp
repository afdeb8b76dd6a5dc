#pragma once

//! Scenario configuration: flat key = value text in named sections, fully
//! validated before any compute. Unknown sections or keys are rejected with
//! the offending line number.

#include <cctype>
#include <cstdio>
#include <fstream>
#include <map>
#include <set>
#include <sstream>
#include <string>
#include <vector>

#include "thinfilm/errors.hpp"
#include "thinfilm/initial_data.hpp"
#include "thinfilm/solver.hpp"

namespace thinfilm {

struct ScenarioConfig {
  double L = 0.0;
  int n = 0;
  PhysicalParams params;
  InitialDatumSpec init_f, init_g;
  bool regularize_initial = true;
  StepperConfig stepper;

  std::vector<std::string> checks;  // balance, bounds, local_energy, support
  bool has_gap = false;
  double gap_a = 0.0, gap_r0 = 0.0;
  bool has_waiting = false;
  double waiting_x0 = 0.0;
  int cell_tol = 1;
  double criterion_rmax = 0.5;
  int criterion_levels = 6;
  bool has_fit = false;
  double fit_t1 = 1.0, fit_t2 = 100.0, fit_b0 = 0.0, fit_time_offset = 0.0;
  bool has_fit_band = false;
  double fit_band_lo = 0.0, fit_band_hi = 0.0;

  std::string prefix = "run";
  bool write_snapshots = true;
};

namespace detail {

struct RawConfig {
  struct Entry {
    std::string value;
    int line = 0;
    bool used = false;
  };
  std::map<std::string, std::map<std::string, Entry>> sections;
  std::map<std::string, int> section_lines;
};

inline std::string strip(const std::string& s) {
  std::size_t a = s.find_first_not_of(" \t\r");
  if (a == std::string::npos) return "";
  std::size_t b = s.find_last_not_of(" \t\r");
  return s.substr(a, b - a + 1);
}

inline RawConfig parse_raw_config(const std::string& text) {
  RawConfig raw;
  std::istringstream in(text);
  std::string line, section;
  int lineno = 0;
  while (std::getline(in, line)) {
    ++lineno;
    std::string s = strip(line);
    if (s.empty() || s[0] == '#') continue;
    if (s.front() == '[') {
      if (s.back() != ']') throw ConfigError(lineno, "unterminated section header");
      section = strip(s.substr(1, s.size() - 2));
      if (section.empty()) throw ConfigError(lineno, "empty section name");
      raw.section_lines.emplace(section, lineno);
      raw.sections[section];
      continue;
    }
    std::size_t eq = s.find('=');
    if (eq == std::string::npos) throw ConfigError(lineno, "expected key = value");
    if (section.empty()) throw ConfigError(lineno, "key outside any section");
    std::string key = strip(s.substr(0, eq));
    std::string value = strip(s.substr(eq + 1));
    if (key.empty()) throw ConfigError(lineno, "empty key");
    auto [it, inserted] = raw.sections[section].emplace(key, RawConfig::Entry{value, lineno});
    (void)it;
    if (!inserted) throw ConfigError(lineno, "duplicate key '" + key + "'");
  }
  return raw;
}

class ConfigReader {
 public:
  explicit ConfigReader(RawConfig& raw) : raw_(raw) {}

  bool has(const std::string& sec, const std::string& key) const {
    auto s = raw_.sections.find(sec);
    return s != raw_.sections.end() && s->second.count(key) > 0;
  }
  RawConfig::Entry& entry(const std::string& sec, const std::string& key) {
    auto s = raw_.sections.find(sec);
    if (s == raw_.sections.end()) throw ConfigError(0, "missing section [" + sec + "]");
    auto k = s->second.find(key);
    if (k == s->second.end()) {
      auto line = raw_.section_lines.find(sec);
      throw ConfigError(line == raw_.section_lines.end() ? 0 : line->second,
                        "missing required key '" + key + "' in [" + sec + "]");
    }
    k->second.used = true;
    return k->second;
  }
  std::string str(const std::string& sec, const std::string& key) { return entry(sec, key).value; }
  std::string str_or(const std::string& sec, const std::string& key, const std::string& def) {
    return has(sec, key) ? str(sec, key) : def;
  }
  double num(const std::string& sec, const std::string& key) {
    auto& e = entry(sec, key);
    try {
      std::size_t pos = 0;
      double v = std::stod(e.value, &pos);
      if (pos != e.value.size()) throw std::invalid_argument("");
      return v;
    } catch (const std::exception&) {
      throw ConfigError(e.line, "expected a number for '" + key + "'");
    }
  }
  double num_or(const std::string& sec, const std::string& key, double def) {
    return has(sec, key) ? num(sec, key) : def;
  }
  long integer(const std::string& sec, const std::string& key) {
    auto& e = entry(sec, key);
    try {
      std::size_t pos = 0;
      long v = std::stol(e.value, &pos);
      if (pos != e.value.size()) throw std::invalid_argument("");
      return v;
    } catch (const std::exception&) {
      throw ConfigError(e.line, "expected an integer for '" + key + "'");
    }
  }
  long integer_or(const std::string& sec, const std::string& key, long def) {
    return has(sec, key) ? integer(sec, key) : def;
  }
  bool flag(const std::string& sec, const std::string& key, bool def) {
    if (!has(sec, key)) return def;
    auto& e = entry(sec, key);
    if (e.value == "true") return true;
    if (e.value == "false") return false;
    throw ConfigError(e.line, "expected true or false for '" + key + "'");
  }
  std::vector<double> num_list(const std::string& sec, const std::string& key) {
    auto& e = entry(sec, key);
    std::vector<double> out;
    std::istringstream in(e.value);
    std::string item;
    while (std::getline(in, item, ',')) {
      item = strip(item);
      if (item.empty()) throw ConfigError(e.line, "empty item in list '" + key + "'");
      try {
        std::size_t pos = 0;
        out.push_back(std::stod(item, &pos));
        if (pos != item.size()) throw std::invalid_argument("");
      } catch (const std::exception&) {
        throw ConfigError(e.line, "bad number in list '" + key + "'");
      }
    }
    return out;
  }
  std::vector<std::string> str_list(const std::string& sec, const std::string& key) {
    auto& e = entry(sec, key);
    std::vector<std::string> out;
    std::istringstream in(e.value);
    std::string item;
    while (std::getline(in, item, ',')) out.push_back(strip(item));
    return out;
  }

  void reject_unused() const {
    for (const auto& [sec, keys] : raw_.sections)
      for (const auto& [key, e] : keys)
        if (!e.used) throw ConfigError(e.line, "unknown key '" + key + "' in [" + sec + "]");
  }

 private:
  RawConfig& raw_;
};

inline InitialDatumSpec parse_datum(ConfigReader& r, const std::string& sec, int section_line) {
  InitialDatumSpec spec;
  const std::string kind = r.str_or(sec, "kind", "zero");
  using Kind = InitialDatumSpec::Kind;
  if (kind == "zero") {
    spec.kind = Kind::zero;
  } else if (kind == "box" || kind == "bump") {
    spec.kind = kind == "box" ? Kind::box : Kind::bump;
    spec.center = r.num_or(sec, "center", 0.0);
    spec.half_width = r.num(sec, "half_width");
    spec.height = r.num(sec, "height");
  } else if (kind == "power_contact") {
    spec.kind = Kind::power_contact;
    spec.x0 = r.num_or(sec, "x0", 0.0);
    spec.alpha = r.num(sec, "alpha");
    spec.scale = r.num_or(sec, "scale", 1.0);
    spec.height = r.num(sec, "height");
    spec.plateau = r.num_or(sec, "plateau", 0.0);
    const std::string side = r.str_or(sec, "side", "right");
    if (side == "right")
      spec.side = +1;
    else if (side == "left")
      spec.side = -1;
    else
      throw ConfigError(r.entry(sec, "side").line, "side must be left or right");
  } else if (kind == "two_bump") {
    spec.kind = Kind::two_bump;
    spec.gap_center = r.num_or(sec, "gap_center", 0.0);
    spec.gap_radius = r.num(sec, "gap_radius");
    spec.width = r.num(sec, "width");
    spec.height = r.num(sec, "height");
  } else if (kind == "samples") {
    spec.kind = Kind::samples;
    spec.samples = r.num_list(sec, "values");
  } else {
    throw ConfigError(r.has(sec, "kind") ? r.entry(sec, "kind").line : section_line,
                      "unknown datum kind '" + kind + "'");
  }
  return spec;
}

}  // namespace detail

inline ScenarioConfig parse_scenario_config_text(const std::string& text) {
  detail::RawConfig raw = detail::parse_raw_config(text);
  const std::set<std::string> known_sections = {"grid",      "physics",    "initial_f",
                                                "initial_g", "stepper",    "diagnostics",
                                                "output"};
  for (const auto& [sec, line] : raw.section_lines)
    if (!known_sections.count(sec)) throw ConfigError(line, "unknown section [" + sec + "]");

  detail::ConfigReader r(raw);
  ScenarioConfig cfg;

  cfg.L = r.num("grid", "L");
  cfg.n = static_cast<int>(r.integer("grid", "n"));

  cfg.params.R = r.num_or("physics", "R", 1.0);
  cfg.params.R_mu = r.num_or("physics", "R_mu", 1.0);
  cfg.params.eps = r.num_or("physics", "eps", 0.0);

  auto section_line = [&](const std::string& sec) {
    auto it = raw.section_lines.find(sec);
    return it == raw.section_lines.end() ? 0 : it->second;
  };
  if (raw.sections.count("initial_f"))
    cfg.init_f = detail::parse_datum(r, "initial_f", section_line("initial_f"));
  if (raw.sections.count("initial_g"))
    cfg.init_g = detail::parse_datum(r, "initial_g", section_line("initial_g"));

  const std::string mode = r.str_or("stepper", "mode", "limit");
  if (mode == "limit")
    cfg.stepper.mode = Mode::limit;
  else if (mode == "regularized")
    cfg.stepper.mode = Mode::regularized;
  else
    throw ConfigError(r.entry("stepper", "mode").line, "mode must be limit or regularized");
  cfg.stepper.t_end = r.num("stepper", "t_end");
  cfg.stepper.cfl_safety = r.num_or("stepper", "cfl_safety", 0.2);
  cfg.stepper.diagnostics_stride =
      static_cast<int>(r.integer_or("stepper", "diagnostics_stride", 1));
  if (r.has("stepper", "snapshot_times"))
    cfg.stepper.snapshot_times = r.num_list("stepper", "snapshot_times");
  cfg.stepper.max_steps = r.integer_or("stepper", "max_steps", -1);
  cfg.stepper.dt_override = r.num_or("stepper", "dt_override", 0.0);
  cfg.regularize_initial =
      r.flag("stepper", "regularize_initial", cfg.stepper.mode == Mode::regularized);

  if (r.has("diagnostics", "checks")) cfg.checks = r.str_list("diagnostics", "checks");
  for (const std::string& c : cfg.checks)
    if (c != "balance" && c != "bounds" && c != "local_energy" && c != "support")
      throw ConfigError(r.entry("diagnostics", "checks").line, "unknown check '" + c + "'");

  if (r.has("diagnostics", "weights")) {
    for (const std::string& w : r.str_list("diagnostics", "weights")) {
      if (w == "unit") {
        cfg.stepper.energy_weights.push_back(unit_weight());
        continue;
      }
      double a = 0.0, rr = 0.0;
      if (std::sscanf(w.c_str(), "hat:%lf:%lf", &a, &rr) == 2) {
        cfg.stepper.energy_weights.push_back(hat_weight(a, rr));
        continue;
      }
      throw ConfigError(r.entry("diagnostics", "weights").line,
                        "weight must be 'unit' or 'hat:a:r'");
    }
  }
  if (r.has("diagnostics", "gap")) {
    const std::string g = r.str("diagnostics", "gap");
    if (std::sscanf(g.c_str(), "%lf:%lf", &cfg.gap_a, &cfg.gap_r0) != 2)
      throw ConfigError(r.entry("diagnostics", "gap").line, "gap must be 'a:r0'");
    cfg.has_gap = true;
    cfg.stepper.probe_windows.push_back(
        {cfg.gap_a - 0.5 * cfg.gap_r0, cfg.gap_a + 0.5 * cfg.gap_r0});
  }
  if (r.has("diagnostics", "waiting_point")) {
    cfg.waiting_x0 = r.num("diagnostics", "waiting_point");
    cfg.has_waiting = true;
  }
  cfg.cell_tol = static_cast<int>(r.integer_or("diagnostics", "cell_tol", 1));
  cfg.criterion_rmax = r.num_or("diagnostics", "criterion_rmax", 0.5);
  cfg.criterion_levels = static_cast<int>(r.integer_or("diagnostics", "criterion_levels", 6));
  cfg.stepper.support_delta = r.num_or("diagnostics", "support_delta", -1.0);
  cfg.stepper.support_delta_component =
      r.num_or("diagnostics", "support_delta_component", -1.0);
  if (r.has("diagnostics", "fit_window")) {
    const std::string w = r.str("diagnostics", "fit_window");
    if (std::sscanf(w.c_str(), "%lf:%lf", &cfg.fit_t1, &cfg.fit_t2) != 2)
      throw ConfigError(r.entry("diagnostics", "fit_window").line, "fit_window must be 't1:t2'");
    cfg.has_fit = true;
    cfg.fit_b0 = r.num_or("diagnostics", "fit_b0", 0.0);
    cfg.fit_time_offset = r.num_or("diagnostics", "fit_time_offset", 0.0);
    if (r.has("diagnostics", "fit_band")) {
      const std::string b = r.str("diagnostics", "fit_band");
      if (std::sscanf(b.c_str(), "%lf:%lf", &cfg.fit_band_lo, &cfg.fit_band_hi) != 2)
        throw ConfigError(r.entry("diagnostics", "fit_band").line, "fit_band must be 'lo:hi'");
      cfg.has_fit_band = true;
    }
  }
  if (r.has("diagnostics", "stop_edge")) {
    const std::string s = r.str("diagnostics", "stop_edge");
    double x0 = 0.0;
    int cells = 0;
    if (std::sscanf(s.c_str(), "%lf:%d", &x0, &cells) != 2)
      throw ConfigError(r.entry("diagnostics", "stop_edge").line, "stop_edge must be 'x0:cells'");
    cfg.stepper.early_stop.on_edge = true;
    cfg.stepper.early_stop.x0 = x0;
    cfg.stepper.early_stop.cells = cells;
  }
  if (r.has("diagnostics", "stop_probe_delta")) {
    cfg.stepper.early_stop.on_probe = true;
    cfg.stepper.early_stop.probe_delta = r.num("diagnostics", "stop_probe_delta");
  }

  cfg.prefix = r.str_or("output", "prefix", "run");
  cfg.write_snapshots = r.flag("output", "snapshots", true);

  r.reject_unused();

  // pre-run validation beyond types
  try {
    validate(cfg.params);
    build_grid(cfg.L, cfg.n);
  } catch (const std::invalid_argument& e) {
    throw ConfigError(section_line("grid") ? section_line("grid") : 1, e.what());
  }
  if (cfg.stepper.mode == Mode::regularized && !(cfg.params.eps > 0.0))
    throw ConfigError(section_line("stepper"), "regularized mode requires eps > 0");
  if (cfg.stepper.mode == Mode::limit && cfg.params.eps != 0.0)
    throw ConfigError(section_line("stepper"), "limit mode requires eps = 0");
  if (!(cfg.stepper.t_end > 0.0))
    throw ConfigError(section_line("stepper"), "t_end must be positive");
  return cfg;
}

inline ScenarioConfig parse_scenario_config_file(const std::string& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw ParamError("cannot open config file: " + path);
  std::ostringstream ss;
  ss << in.rdbuf();
  return parse_scenario_config_text(ss.str());
}

}  // namespace thinfilm
