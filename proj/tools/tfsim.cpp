// Command-line front end: scenario simulation, the verification suite,
// parameter sweeps, and support-growth fits.
//
// Exit codes: 0 all selected gates pass, 1 a gate failed, 2 invalid
// configuration or arguments.

#include <cstdlib>
#include <filesystem>
#include <future>
#include <iostream>
#include <mutex>
#include <string>
#include <thread>
#include <vector>

#include <CLI11.hpp>

#include "thinfilm/config.hpp"
#include "thinfilm/io.hpp"
#include "thinfilm/scenario.hpp"
#include "thinfilm/verify.hpp"

namespace fs = std::filesystem;
using namespace thinfilm;

namespace {

std::string read_file(const std::string& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw ParamError("cannot open config file: " + path);
  std::ostringstream ss;
  ss << in.rdbuf();
  return ss.str();
}

// Replaces (or inserts) `key = value` inside [section] of a config text.
std::string override_config_text(const std::string& text, const std::string& section,
                                 const std::string& key, const std::string& value) {
  std::istringstream in(text);
  std::ostringstream out;
  std::string line, current;
  bool replaced = false, in_section = false;
  auto strip = [](const std::string& s) {
    std::size_t a = s.find_first_not_of(" \t\r");
    if (a == std::string::npos) return std::string();
    std::size_t b = s.find_last_not_of(" \t\r");
    return s.substr(a, b - a + 1);
  };
  while (std::getline(in, line)) {
    std::string s = strip(line);
    if (!s.empty() && s.front() == '[' && s.back() == ']') {
      if (in_section && !replaced) {
        out << key << " = " << value << "\n";
        replaced = true;
      }
      current = strip(s.substr(1, s.size() - 2));
      in_section = current == section;
      out << line << "\n";
      continue;
    }
    if (in_section && !s.empty() && s[0] != '#') {
      std::size_t eq = s.find('=');
      if (eq != std::string::npos && strip(s.substr(0, eq)) == key) {
        out << key << " = " << value << "\n";
        replaced = true;
        continue;
      }
    }
    out << line << "\n";
  }
  if (!replaced) {
    if (in_section)
      out << key << " = " << value << "\n";
    else
      out << "[" << section << "]\n" << key << " = " << value << "\n";
  }
  return out.str();
}

int worker_count(std::size_t jobs) {
  if (const char* env = std::getenv("TFSIM_WORKERS")) {
    const int w = std::atoi(env);
    if (w >= 1) return static_cast<int>(std::min<std::size_t>(w, jobs));
  }
  const unsigned hw = std::thread::hardware_concurrency();
  return static_cast<int>(std::min<std::size_t>(hw ? hw : 1, jobs));
}

int run_simulate(const std::string& config_path, const std::string& out_dir,
                 unsigned long seed) {
  ScenarioConfig cfg = parse_scenario_config_file(config_path);
  ScenarioResult res = run_scenario(cfg, seed);
  write_scenario_artifacts(cfg, res, out_dir);
  std::cout << (res.status == 0 ? "all gates passed" : "GATE FAILURE") << "; summary at "
            << (fs::path(out_dir) / (cfg.prefix + "_summary.json")).string() << "\n";
  return res.status;
}

int run_verify(const std::string& level, const std::string& scenario_dir,
               const std::string& out_dir, unsigned long seed) {
  SuiteResult res = verify_suite(level, scenario_dir, seed);
  fs::create_directories(out_dir);
  write_text_file(fs::path(out_dir) / ("verify_" + level + "_summary.json"),
                  res.summary.dump(1) + "\n");
  for (const GateResult& g : res.gates)
    std::cout << (g.pass ? "PASS " : "FAIL ") << g.id << "  value=" << g17(g.value)
              << " bound=" << g17(g.bound) << " margin=" << g17(g.margin) << "\n";
  std::cout << (res.all_pass ? "verification suite passed" : "VERIFICATION FAILURE") << "\n";
  return res.all_pass ? 0 : 1;
}

int run_sweep(const std::string& config_path, const std::string& key,
              const std::vector<std::string>& values, const std::string& out_dir,
              unsigned long seed) {
  const std::size_t dot = key.find('.');
  if (dot == std::string::npos) throw ParamError("sweep key must look like section.key");
  const std::string section = key.substr(0, dot), name = key.substr(dot + 1);
  const std::string base = read_file(config_path);

  struct Job {
    ScenarioConfig cfg;
    std::string value;
  };
  std::vector<Job> jobs;
  for (const std::string& v : values) {
    Job j;
    j.cfg = parse_scenario_config_text(override_config_text(base, section, name, v));
    j.cfg.prefix += "_" + std::to_string(jobs.size());
    j.value = v;
    jobs.push_back(std::move(j));
  }

  std::vector<ScenarioResult> results(jobs.size());
  const int workers = worker_count(jobs.size());
  std::size_t next = 0;
  std::mutex mtx;
  auto drain = [&]() {
    for (;;) {
      std::size_t k;
      {
        std::lock_guard<std::mutex> lock(mtx);
        if (next >= jobs.size()) return;
        k = next++;
      }
      results[k] = run_scenario(jobs[k].cfg, seed);
    }
  };
  std::vector<std::future<void>> pool;
  for (int w = 1; w < workers; ++w) pool.push_back(std::async(std::launch::async, drain));
  drain();
  for (auto& f : pool) f.get();

  json sweep;
  sweep["key"] = key;
  sweep["seed"] = seed;
  json runs = json::array();
  int status = 0;
  for (std::size_t k = 0; k < jobs.size(); ++k) {
    const fs::path dir = fs::path(out_dir) / (name + "_" + jobs[k].value);
    write_scenario_artifacts(jobs[k].cfg, results[k], dir);
    json r;
    r["value"] = jobs[k].value;
    r["status"] = results[k].status;
    r["dir"] = dir.string();
    r["summary"] = results[k].summary;
    runs.push_back(r);
    status = std::max(status, results[k].status);
  }
  sweep["runs"] = runs;
  fs::create_directories(out_dir);
  write_text_file(fs::path(out_dir) / "sweep_summary.json", sweep.dump(1) + "\n");
  std::cout << "sweep complete: " << jobs.size() << " runs, status " << status << "\n";
  return status;
}

int run_fit(const std::string& config_path, const std::string& out_dir, unsigned long seed) {
  ScenarioConfig cfg = parse_scenario_config_file(config_path);
  if (!cfg.has_fit) throw ConfigError(1, "fit requires [diagnostics] fit_window");
  ScenarioResult res = run_scenario(cfg, seed);
  fs::create_directories(out_dir);
  write_text_file(fs::path(out_dir) / (cfg.prefix + "_trace.csv"), trace_csv(res.trajectory));
  json fit = res.summary["diagnostics"]["fit"];
  fit["seed"] = seed;
  write_text_file(fs::path(out_dir) / (cfg.prefix + "_fit.json"), fit.dump(1) + "\n");
  std::cout << "exponent_right = " << g17(fit["exponent_right"].get<double>()) << "\n";
  return res.status;
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"thin-film two-phase flow simulator and verification suite"};
  app.require_subcommand(1);

  std::string config_path, out_dir = "out", level = "fast", scenario_dir = "scenarios";
  std::string sweep_key;
  std::vector<std::string> sweep_values;
  unsigned long seed = 1234;

  CLI::App* simulate = app.add_subcommand("simulate", "run one scenario and write artifacts");
  simulate->add_option("--config", config_path, "scenario config file")->required();
  simulate->add_option("--out", out_dir, "output directory");
  simulate->add_option("--seed", seed, "seed recorded in artifacts");

  CLI::App* verify = app.add_subcommand("verify", "run the verification suite");
  verify->add_option("--level", level, "fast or full");
  verify->add_option("--scenarios", scenario_dir, "directory with the bundled scenarios");
  verify->add_option("--out", out_dir, "output directory");
  verify->add_option("--seed", seed, "seed for the property tests");

  CLI::App* sweep = app.add_subcommand("sweep", "run a scenario over a list of values");
  sweep->add_option("--config", config_path, "base scenario config")->required();
  sweep->add_option("--key", sweep_key, "section.key to override")->required();
  sweep->add_option("--values", sweep_values, "comma-separated values")
      ->required()
      ->delimiter(',');
  sweep->add_option("--out", out_dir, "output directory");
  sweep->add_option("--seed", seed, "seed recorded in artifacts");

  CLI::App* fit = app.add_subcommand("fit", "run a scenario and fit the support growth");
  fit->add_option("--config", config_path, "scenario config with fit settings")->required();
  fit->add_option("--out", out_dir, "output directory");
  fit->add_option("--seed", seed, "seed recorded in artifacts");

  CLI11_PARSE(app, argc, argv);

  try {
    if (simulate->parsed()) return run_simulate(config_path, out_dir, seed);
    if (verify->parsed()) return run_verify(level, scenario_dir, out_dir, seed);
    if (sweep->parsed()) return run_sweep(config_path, sweep_key, sweep_values, out_dir, seed);
    if (fit->parsed()) return run_fit(config_path, out_dir, seed);
  } catch (const ConfigError& e) {
    std::cerr << "config error: " << e.what() << "\n";
    return 2;
  } catch (const ParamError& e) {
    std::cerr << "parameter error: " << e.what() << "\n";
    return 2;
  } catch (const GeometryError& e) {
    std::cerr << "geometry error: " << e.what() << "\n";
    return 2;
  } catch (const std::exception& e) {
    std::cerr << "error: " << e.what() << "\n";
    return 1;
  }
  return 2;
}
