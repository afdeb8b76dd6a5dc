#pragma once

//! Scenario orchestration: build the grid and data from a config, run the
//! solver, evaluate the selected verification gates, and write the artifact
//! files (ledger/trace/probe CSVs, snapshots, JSON summary). All artifacts
//! are reproducible byte-for-byte from the config and seed.

#include <filesystem>
#include <string>
#include <vector>

#include "thinfilm/balance.hpp"
#include "thinfilm/config.hpp"
#include "thinfilm/io.hpp"
#include "thinfilm/oracle.hpp"
#include "thinfilm/support.hpp"

namespace thinfilm {

struct ScenarioResult {
  int status = 0;  // 0: gates pass, 1: a gate failed
  json summary;
  Trajectory trajectory;
};

namespace detail {

inline bool has_check(const ScenarioConfig& cfg, const std::string& name) {
  for (const std::string& c : cfg.checks)
    if (c == name) return true;
  return false;
}

}  // namespace detail

inline ScenarioResult run_scenario(const ScenarioConfig& cfg, unsigned long seed = 0) {
  Grid grid = build_grid(cfg.L, cfg.n);
  FieldPair raw{make_initial_field(cfg.init_f, grid), make_initial_field(cfg.init_g, grid)};
  FieldPair init = raw;
  if (cfg.stepper.mode == Mode::regularized && cfg.regularize_initial)
    init = regularize_initial_datum(raw, cfg.params, grid);

  ScenarioResult res;
  res.trajectory = run(init, cfg.params, grid, cfg.stepper);
  const Trajectory& traj = res.trajectory;

  json gates = json::array();
  bool all_pass = true;
  auto add_gate = [&](const std::string& name, bool pass, double value, double bound,
                      double margin) {
    gates.push_back(gate_json(name, pass, value, bound, margin));
    all_pass = all_pass && pass;
  };

  if (detail::has_check(cfg, "balance")) {
    BalanceReport rep = balance_check(traj, cfg.params);
    add_gate("balance.mass", rep.mass_pass, rep.mass_worst_drift, 1e-10,
             1e-10 - rep.mass_worst_drift);
    add_gate("balance.entropy", rep.entropy_pass, rep.tol - rep.entropy_worst_margin, rep.tol,
             rep.entropy_worst_margin);
    add_gate("balance.energy", rep.energy_pass, rep.tol - rep.energy_worst_margin, rep.tol,
             rep.energy_worst_margin);
  }
  if (detail::has_check(cfg, "bounds")) {
    BoundsReport rep = bounds_check(traj, cfg.params);
    add_gate("bounds.moment", rep.moment_pass, -rep.moment_worst_margin, 0.0,
             rep.moment_worst_margin);
    add_gate("bounds.decay", rep.decay_pass, -rep.decay_worst_margin, 0.0,
             rep.decay_worst_margin);
  }
  if (detail::has_check(cfg, "local_energy")) {
    int idx = 0;
    for (const Weight& w : cfg.stepper.energy_weights) {
      LocalEnergyReport rep = local_energy_ledger(traj, cfg.params, w);
      const std::string tag =
          w.kind == Weight::Kind::unit
              ? std::string("unit")
              : "hat_" + std::to_string(idx);
      add_gate("local_energy." + tag + ".weighted", rep.weighted_pass, rep.lhs,
               rep.rhs * 1.05 + 1e-10, rep.rhs * 1.05 + 1e-10 - rep.lhs);
      add_gate("local_energy." + tag + ".wform", rep.wform_pass, rep.lhs_w,
               rep.rhs_w * 1.05 + 1e-10, rep.rhs_w * 1.05 + 1e-10 - rep.lhs_w);
      add_gate("local_energy." + tag + ".cauchy_schwarz", rep.cauchy_schwarz_pass,
               rep.u1 * rep.u1, rep.u0 * rep.u2, rep.u0 * rep.u2 - rep.u1 * rep.u1);
      ++idx;
    }
    add_gate("local_energy.slope_bound", traj.haendel_violations == 0,
             static_cast<double>(traj.haendel_violations), 0.0,
             1.0 - traj.haendel_worst_ratio);
  }

  json info;
  if (cfg.has_gap) {
    const double delta = traj.trace_sum.delta;
    const double t_enter = gap_persistence(traj, cfg.gap_a, cfg.gap_r0, delta);
    info["gap"] = {{"a", cfg.gap_a},
                   {"r0", cfg.gap_r0},
                   {"delta", delta},
                   {"t_enter", std::isinf(t_enter) ? json("inf") : json(t_enter)}};
  }
  if (cfg.has_waiting) {
    WaitingTime wt = waiting_time(traj, cfg.waiting_x0, traj.trace_sum.delta, cfg.cell_tol);
    CriterionScan scan = waiting_criterion(traj.snapshots.front(), cfg.params, grid,
                                           cfg.waiting_x0, cfg.criterion_rmax,
                                           cfg.criterion_levels);
    info["waiting"] = {{"x0", cfg.waiting_x0},
                       {"t_wait", wt.t_wait},
                       {"censored", wt.censored},
                       {"side", wt.side == 0 ? "left" : "right"},
                       {"criterion_bounded", scan.bounded},
                       {"criterion_finest_Q", scan.finest_Q},
                       {"criterion_growth_ratio", scan.growth_ratio},
                       {"criterion_r", scan.r},
                       {"criterion_Q", scan.Q}};
  }
  if (cfg.has_fit) {
    SupportTrace tr = traj.trace_sum;
    for (double& t : tr.t) t += cfg.fit_time_offset;
    GrowthFit fit = fit_growth_exponent(tr, cfg.fit_b0, {cfg.fit_t1, cfg.fit_t2});
    info["fit"] = {{"waiting_regime", fit.waiting_regime},
                   {"exponent_right", fit.exponent_right},
                   {"exponent_left", fit.exponent_left},
                   {"amplitude_right", fit.amplitude_right},
                   {"amplitude_left", fit.amplitude_left},
                   {"residual", fit.residual}};
    if (cfg.has_fit_band && !fit.waiting_regime) {
      const bool in_band =
          fit.exponent_right >= cfg.fit_band_lo && fit.exponent_right <= cfg.fit_band_hi &&
          fit.exponent_left >= cfg.fit_band_lo && fit.exponent_left <= cfg.fit_band_hi;
      add_gate("support.fit_band", in_band, fit.exponent_right, cfg.fit_band_hi,
               std::min(cfg.fit_band_hi - fit.exponent_right,
                        fit.exponent_right - cfg.fit_band_lo));
    } else if (cfg.has_fit_band) {
      add_gate("support.fit_band", false, 0.0, cfg.fit_band_hi, -1.0);
    }
  }

  res.summary["seed"] = seed;
  res.summary["prefix"] = cfg.prefix;
  res.summary["mode"] = cfg.stepper.mode == Mode::regularized ? "regularized" : "limit";
  res.summary["steps"] = traj.steps;
  res.summary["final_time"] = traj.final_time;
  res.summary["clipped_mass_f"] = traj.clipped_mass_f;
  res.summary["clipped_mass_g"] = traj.clipped_mass_g;
  res.summary["support_delta"] = traj.trace_sum.delta;
  res.summary["gates"] = gates;
  if (!info.is_null()) res.summary["diagnostics"] = info;
  res.status = all_pass ? 0 : 1;
  return res;
}

inline void write_scenario_artifacts(const ScenarioConfig& cfg, const ScenarioResult& res,
                                     const std::filesystem::path& out_dir) {
  namespace fs = std::filesystem;
  fs::create_directories(out_dir);
  const Trajectory& traj = res.trajectory;
  write_text_file(out_dir / (cfg.prefix + "_ledger.csv"), ledger_csv(traj));
  write_text_file(out_dir / (cfg.prefix + "_trace.csv"), trace_csv(traj));
  if (!traj.probes.empty())
    write_text_file(out_dir / (cfg.prefix + "_probes.csv"), probes_csv(traj));
  if (cfg.write_snapshots) {
    fs::create_directories(out_dir / "snapshots");
    std::string index = "k,t,file\n";
    for (std::size_t k = 0; k < traj.snapshots.size(); ++k) {
      char name[64];
      std::snprintf(name, sizeof(name), "%s_snap_%04zu.csv", cfg.prefix.c_str(), k);
      write_text_file(out_dir / "snapshots" / name, snapshot_csv(traj.snapshots[k], traj.grid));
      index += std::to_string(k) + ',' + g17(traj.snapshot_times[k]) + ',' + name + '\n';
    }
    write_text_file(out_dir / "snapshots" / (cfg.prefix + "_index.csv"), index);
  }
  write_text_file(out_dir / (cfg.prefix + "_summary.json"), res.summary.dump(1) + "\n");
}

}  // namespace thinfilm
