#include <catch2/catch_amalgamated.hpp>
#include <cmath>

#include "thinfilm/oracle.hpp"

using namespace thinfilm;

TEST_CASE("source-type radius scales like t^{1/3}") {
  BarenblattProfile p = barenblatt_profile(2.0, 1.0);
  for (double t : {0.5, 1.0, 3.0}) {
    CHECK(p.radius(8.0 * t) == Catch::Approx(2.0 * p.radius(t)).epsilon(1e-13));
  }
  BarenblattProfile q = barenblatt_profile(0.7, 2.5);
  CHECK(q.radius(8.0) == Catch::Approx(2.0 * q.radius(1.0)).epsilon(1e-13));
}

TEST_CASE("mass calibration and invariance, PDE residual") {
  for (double mass_value : {0.5, 2.0}) {
    for (double D : {0.5, 1.0}) {
      OracleSelfCheck check = barenblatt_self_check(mass_value, D);
      CHECK(check.pass);
      CHECK(check.worst_mass_error < 1e-10);
      CHECK(check.worst_residual < 1e-6);
    }
  }
}

TEST_CASE("profile evaluation rejects bad arguments") {
  Grid grid = build_grid(8.0, 128);
  CHECK_THROWS_AS(barenblatt(0.0, 2.0, 1.0, grid), ParamError);
  CHECK_THROWS_AS(barenblatt(-1.0, 2.0, 1.0, grid), ParamError);
  CHECK_THROWS_AS(barenblatt(1.0, -2.0, 1.0, grid), ParamError);
  Grid tiny = build_grid(1.0, 64);
  CHECK_THROWS_AS(barenblatt(1.0, 50.0, 1.0, tiny), GeometryError);
}

TEST_CASE("one short step stays close to the closed form") {
  Grid grid = build_grid(8.0, 512);
  PhysicalParams p{1.0, 1.0, 0.0};  // D = (1+R)/2 = 1
  BarenblattProfile prof = barenblatt_profile(2.0, 1.0);
  FieldPair s{barenblatt(1.0, 2.0, 1.0, grid), Field(grid.n, 0.0)};
  double t = 1.0;
  while (t < 1.01) {
    double dt = std::min(stable_dt(s, p, grid, 0.2), 1.01 - t);
    s = step(s, p, grid, dt);
    t += dt;
  }
  Accumulator err;
  for (int i = 0; i < grid.n; ++i)
    err.add(std::abs(s.f[i] - prof.value(1.01, grid.centers[i])));
  const double l1 = err.value() * grid.dx;
  CHECK(l1 < 5.0 * grid.dx * grid.dx + 1e-4);
}

TEST_CASE("the two decoupled reductions coincide when 1+R = R_mu") {
  PhysicalParams p{1.0, 2.0, 0.0};
  std::vector<int> ladder = {128, 256};
  auto rows_f = decoupled_compare(p, 8.0, ladder, 0, 1.0, 0.2);
  auto rows_g = decoupled_compare(p, 8.0, ladder, 1, 1.0, 0.2);
  REQUIRE(rows_f.size() == rows_g.size());
  for (std::size_t k = 0; k < rows_f.size(); ++k) {
    CHECK(rows_f[k].l1_error == rows_g[k].l1_error);
    CHECK(rows_f[k].radius_error == rows_g[k].radius_error);
  }
}

TEST_CASE("coarse two-level convergence sanity") {
  PhysicalParams p{1.0, 1.0, 0.0};
  auto rows = decoupled_compare(p, 8.0, {128, 256}, 0, 2.0, 0.2);
  REQUIRE(rows.size() == 2u);
  CHECK(rows[1].l1_error < rows[0].l1_error);
  CHECK(rows[0].radius_error <= 2.0 * rows[0].dx);
  CHECK(rows[1].radius_error <= 2.0 * rows[1].dx);
}

TEST_CASE("bounds_check on zero data passes trivially") {
  Grid grid = build_grid(2.0, 64);
  PhysicalParams p{1.0, 1.0, 0.0};
  FieldPair s{Field(grid.n, 0.0), Field(grid.n, 0.0)};
  StepperConfig cfg;
  cfg.t_end = 0.1;
  cfg.diagnostics_stride = 8;
  Trajectory traj = run(s, p, grid, cfg);
  BoundsReport rep = bounds_check(traj, p);
  CHECK(rep.moment_pass);
  CHECK(rep.decay_pass);
}
