#include <catch2/catch_amalgamated.hpp>
#include <cmath>

#include "thinfilm/balance.hpp"
#include "thinfilm/initial_data.hpp"
#include "thinfilm/oracle.hpp"

using namespace thinfilm;

namespace {

// small coupled regularized run with all ledgers attached
Trajectory coupled_run(double t_end, int n = 256) {
  Grid grid = build_grid(4.0, n);
  PhysicalParams p{1.0, 1.0, 1e-3};
  InitialDatumSpec bf, bg;
  bf.kind = bg.kind = InitialDatumSpec::Kind::bump;
  bf.center = -0.5;
  bg.center = 0.5;
  bf.half_width = bg.half_width = 1.2;
  bf.height = bg.height = 1.0;
  FieldPair raw{make_initial_field(bf, grid), make_initial_field(bg, grid)};
  FieldPair init = regularize_initial_datum(raw, p, grid);

  StepperConfig cfg;
  cfg.mode = Mode::regularized;
  cfg.t_end = t_end;
  cfg.diagnostics_stride = 20;
  cfg.energy_weights = {unit_weight(), hat_weight(0.0, 2.0), hat_weight(-1.0, 1.5)};
  return run(init, p, grid, cfg);
}

}  // namespace

TEST_CASE("zero trajectory passes all balances with zero margins") {
  Grid grid = build_grid(2.0, 64);
  PhysicalParams p{1.0, 1.0, 0.0};
  FieldPair s{Field(grid.n, 0.0), Field(grid.n, 0.0)};
  StepperConfig cfg;
  cfg.t_end = 0.1;
  cfg.diagnostics_stride = 8;
  Trajectory traj = run(s, p, grid, cfg);
  BalanceReport rep = balance_check(traj, p);
  CHECK(rep.pass());
  CHECK(rep.mass_worst_drift == 0.0);
}

TEST_CASE("coupled bump collision satisfies the balances") {
  Trajectory traj = coupled_run(0.5);
  PhysicalParams p = traj.params;
  BalanceReport rep = balance_check(traj, p);
  CHECK(rep.mass_pass);
  CHECK(rep.entropy_pass);
  CHECK(rep.energy_pass);
  CHECK(rep.energy_worst_margin >= 0.0);

  // the ledger energy itself is non-increasing for this diffusive run
  for (std::size_t k = 1; k < traj.ledger.size(); ++k)
    CHECK(traj.ledger[k].energy <= traj.ledger[k - 1].energy + 1e-10);
}

TEST_CASE("time-integrated energy rate matches the energy drop on a resolved run") {
  Trajectory traj = coupled_run(1.0, 512);
  const double drop = traj.ledger.front().energy - traj.ledger.back().energy;
  const double dissipated = traj.ledger.back().d_energy;
  REQUIRE(drop > 1e-3);
  CHECK(dissipated == Catch::Approx(drop).epsilon(0.02));
}

TEST_CASE("fault injection: mass added mid-run fails (a) and is located") {
  Trajectory traj = coupled_run(0.2);
  const std::size_t mid = traj.ledger.size() / 2;
  const double t_mid = traj.ledger[mid].t;
  for (std::size_t k = mid; k < traj.ledger.size(); ++k) traj.ledger[k].mass_f *= 1.001;
  BalanceReport rep = balance_check(traj, traj.params);
  CHECK_FALSE(rep.mass_pass);
  CHECK(rep.mass_worst_time >= t_mid - 1e-12);
}

TEST_CASE("empty trajectory is rejected") {
  Trajectory traj;
  CHECK_THROWS_AS(balance_check(traj, PhysicalParams{}), ParamError);
}

TEST_CASE("local energy ledger with the unit weight mirrors the global balance") {
  Trajectory traj = coupled_run(0.3);
  PhysicalParams p = traj.params;
  LocalEnergyReport rep = local_energy_ledger(traj, p, unit_weight());
  CHECK(rep.weighted_pass);
  CHECK(rep.wform_pass);
  CHECK(rep.cauchy_schwarz_pass);
  CHECK(rep.haendel_pass);
  // zeta = 1 kills the source side
  CHECK(rep.rhs == Catch::Approx(traj.weight_series[0].weighted_energy.front()).epsilon(1e-12));
  // weighted energy is exactly twice the ledger energy
  CHECK(traj.weight_series[0].weighted_energy.front() ==
        Catch::Approx(2.0 * traj.ledger.front().energy).epsilon(1e-12));
}

TEST_CASE("hat weights pass and the u-triple obeys Cauchy-Schwarz") {
  Trajectory traj = coupled_run(0.3);
  PhysicalParams p = traj.params;
  for (const Weight& w : {hat_weight(0.0, 2.0), hat_weight(-1.0, 1.5)}) {
    LocalEnergyReport rep = local_energy_ledger(traj, p, w);
    CHECK(rep.weighted_pass);
    CHECK(rep.wform_pass);
    CHECK(rep.u1 * rep.u1 <= rep.u0 * rep.u2 * (1.0 + 1e-12) + 1e-300);
    CHECK(rep.I_of_rT >= 0.0);
  }
}

TEST_CASE("hat centered in an empty gap holds with slack") {
  Grid grid = build_grid(8.0, 512);
  PhysicalParams p{1.0, 1.0, 0.0};
  InitialDatumSpec s;
  s.kind = InitialDatumSpec::Kind::two_bump;
  s.gap_center = 0.0;
  s.gap_radius = 2.0;
  s.width = 1.5;
  s.height = 1.0;
  FieldPair init{make_initial_field(s, grid), Field(grid.n, 0.0)};
  StepperConfig cfg;
  cfg.t_end = 0.05;  // too short for the gap to fill
  cfg.diagnostics_stride = 20;
  cfg.energy_weights = {hat_weight(0.0, 1.0)};
  Trajectory traj = run(init, p, grid, cfg);
  LocalEnergyReport rep = local_energy_ledger(traj, p, hat_weight(0.0, 1.0));
  CHECK(rep.weighted_pass);
  CHECK(rep.lhs <= 1e-10);   // nothing under the weight
  CHECK(rep.rhs >= rep.lhs);
}

TEST_CASE("unknown weight is rejected") {
  Trajectory traj = coupled_run(0.05);
  CHECK_THROWS_AS(local_energy_ledger(traj, traj.params, hat_weight(1.0, 0.5)), ParamError);
  CHECK_THROWS_AS(local_energy_ledger(traj, traj.params, hat_weight(0.0, 100.0)), GeometryError);
}

TEST_CASE("decay bound on a centered bump") {
  Grid grid = build_grid(8.0, 256);
  PhysicalParams p{1.0, 1.0, 0.0};
  InitialDatumSpec s;
  s.kind = InitialDatumSpec::Kind::bump;
  s.center = 0.0;
  s.half_width = 1.0;
  s.height = 1.0;
  FieldPair init{make_initial_field(s, grid), make_initial_field(s, grid)};
  StepperConfig cfg;
  cfg.t_end = 10.0;
  cfg.diagnostics_stride = 100;
  Trajectory traj = run(init, p, grid, cfg);
  BoundsReport rep = bounds_check(traj, p);
  CHECK(rep.decay_pass);
  CHECK(rep.decay_worst_margin > 0.0);
}

TEST_CASE("moment barrier on well-separated bumps") {
  // the barrier needs the 2% slack on M2(0) to dominate the early-time
  // transient, so the bumps sit far from the origin
  Grid grid = build_grid(24.0, 384);
  PhysicalParams p{1.0, 1.0, 0.0};
  InitialDatumSpec s;
  s.kind = InitialDatumSpec::Kind::two_bump;
  s.gap_center = 0.0;
  s.gap_radius = 8.0;
  s.width = 2.0;
  s.height = 0.5;
  Field one = make_initial_field(s, grid);
  FieldPair init{one, one};
  StepperConfig cfg;
  cfg.t_end = 10.0;
  cfg.diagnostics_stride = 50;
  Trajectory traj = run(init, p, grid, cfg);
  BoundsReport rep = bounds_check(traj, p);
  CHECK(rep.moment_pass);
  CHECK(rep.decay_pass);
}
