#pragma once

//! Trajectory-level balance and local-energy verification: mass constancy,
//! the entropy and energy dissipation inequalities, the weighted local
//! energy estimate, and its w-form with explicit constants.

#include <algorithm>
#include <cmath>
#include <string>

#include "thinfilm/errors.hpp"
#include "thinfilm/functionals.hpp"
#include "thinfilm/solver.hpp"

namespace thinfilm {

struct BalanceReport {
  bool mass_pass = false, entropy_pass = false, energy_pass = false;
  double mass_worst_drift = 0.0;     // relative, across both species
  double mass_worst_time = 0.0;
  double entropy_worst_margin = 0.0;  // min over samples of H(0)+tol - (H(t)+D(t))
  double entropy_worst_time = 0.0;
  double energy_worst_margin = 0.0;
  double energy_worst_time = 0.0;
  double tol = 0.0;

  bool pass() const { return mass_pass && entropy_pass && energy_pass; }
};

//! (a) per-species mass constant to 1e-10 relative, (b) H(T)+D_H(T) <= H(0)+tol,
//! (c) E(T)+D_E(T) <= E(0)+tol, with tol = max(1e-8, 0.02 E(0)).
inline BalanceReport balance_check(const Trajectory& traj, const PhysicalParams& params) {
  (void)params;
  if (traj.ledger.empty()) throw ParamError("balance_check: empty trajectory");
  const auto& rows = traj.ledger;
  BalanceReport rep;
  rep.tol = std::max(1e-8, 0.02 * rows.front().energy);

  const double mf0 = rows.front().mass_f, mg0 = rows.front().mass_g;
  const double mf_scale = std::max(std::abs(mf0), 1e-30);
  const double mg_scale = std::max(std::abs(mg0), 1e-30);
  rep.mass_pass = true;
  for (const LedgerRow& r : rows) {
    const double drift =
        std::max(std::abs(r.mass_f - mf0) / mf_scale, std::abs(r.mass_g - mg0) / mg_scale);
    if (drift > rep.mass_worst_drift) {
      rep.mass_worst_drift = drift;
      rep.mass_worst_time = r.t;
    }
  }
  if (rep.mass_worst_drift > 1e-10) rep.mass_pass = false;

  const double h0 = rows.front().entropy, e0 = rows.front().energy;
  rep.entropy_pass = rep.energy_pass = true;
  bool first = true;
  for (const LedgerRow& r : rows) {
    const double hm = h0 + rep.tol - (r.entropy + r.d_entropy);
    const double em = e0 + rep.tol - (r.energy + r.d_energy);
    if (first || hm < rep.entropy_worst_margin) {
      rep.entropy_worst_margin = hm;
      rep.entropy_worst_time = r.t;
    }
    if (first || em < rep.energy_worst_margin) {
      rep.energy_worst_margin = em;
      rep.energy_worst_time = r.t;
    }
    first = false;
  }
  if (rep.entropy_worst_margin < 0.0) rep.entropy_pass = false;
  if (rep.energy_worst_margin < 0.0) rep.energy_pass = false;
  return rep;
}

struct LocalEnergyReport {
  Weight weight;
  // weighted estimate: final weighted energy + weighted dissipation vs
  // initial weighted energy + 4x weighted source
  double lhs = 0.0, rhs = 0.0;
  bool weighted_pass = false;
  // w-form with the derived constants
  double lhs_w = 0.0, rhs_w = 0.0;
  double C1 = 0.0, C2 = 0.0;
  bool wform_pass = false;
  // diagnostics of the proof machinery
  double I_of_rT = 0.0;  // sup_t of the weighted energy
  double u0 = 0.0, u1 = 0.0, u2 = 0.0;
  bool cauchy_schwarz_pass = false;  // u1^2 <= u0 u2
  long haendel_violations = 0;
  double haendel_worst_ratio = 0.0;
  bool haendel_pass = false;

  bool pass() const { return weighted_pass && wform_pass && cauchy_schwarz_pass && haendel_pass; }
};

//! Verifies the local energy estimate accumulated by run() for one weight.
//! Both sides carry O(dx^2)+O(dt) discretization error; the 5% multiplicative
//! slack is validated by the grid-refinement acceptance test.
inline LocalEnergyReport local_energy_ledger(const Trajectory& traj, const PhysicalParams& params,
                                             const Weight& weight, double slack = 0.05) {
  if (weight.kind == Weight::Kind::hat &&
      (weight.a - weight.r < -traj.grid.half_width ||
       weight.a + weight.r > traj.grid.half_width))
    throw GeometryError("local_energy_ledger: weight support exceeds the domain");

  const WeightSeries* series = nullptr;
  for (const WeightSeries& s : traj.weight_series) {
    if (s.weight.kind != weight.kind) continue;
    if (weight.kind == Weight::Kind::unit ||
        (std::abs(s.weight.a - weight.a) < 1e-12 && std::abs(s.weight.r - weight.r) < 1e-12)) {
      series = &s;
      break;
    }
  }
  if (series == nullptr)
    throw ParamError("local_energy_ledger: weight was not accumulated during the run");
  if (series->weighted_energy.empty()) throw ParamError("local_energy_ledger: empty series");

  LocalEnergyReport rep;
  rep.weight = weight;
  const WLBConstants c = wlb_constants(params);
  rep.C1 = c.C1;
  rep.C2 = c.C2;

  const double e_init = series->weighted_energy.front();
  const double e_final = series->weighted_energy.back();
  rep.lhs = e_final + series->dissipation.back();
  rep.rhs = e_init + 4.0 * series->source.back();
  rep.weighted_pass = rep.lhs <= rep.rhs * (1.0 + slack) + 1e-10;

  rep.lhs_w = e_final + c.C1 * series->q2.back();
  rep.rhs_w = e_init + c.C2 * series->wsq_source.back();
  rep.wform_pass = rep.lhs_w <= rep.rhs_w * (1.0 + slack) + 1e-10;

  rep.I_of_rT = *std::max_element(series->weighted_energy.begin(), series->weighted_energy.end());
  rep.u0 = series->q0.back();
  rep.u1 = series->q1.back();
  rep.u2 = series->q2.back();
  // u1^2 <= u0 u2 for the cumulative triple at every sample time
  rep.cauchy_schwarz_pass = true;
  for (std::size_t k = 0; k < series->q0.size(); ++k)
    if (series->q1[k] * series->q1[k] >
        series->q0[k] * series->q2[k] * (1.0 + 1e-12) + 1e-300)
      rep.cauchy_schwarz_pass = false;

  rep.haendel_violations = traj.haendel_violations;
  rep.haendel_worst_ratio = traj.haendel_worst_ratio;
  rep.haendel_pass = traj.haendel_violations == 0;
  return rep;
}

}  // namespace thinfilm
