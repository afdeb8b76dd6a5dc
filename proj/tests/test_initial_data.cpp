#include <catch2/catch_amalgamated.hpp>
#include <random>

#include "thinfilm/initial_data.hpp"

using namespace thinfilm;

namespace {

InitialDatumSpec box_spec(double c, double hw, double h) {
  InitialDatumSpec s;
  s.kind = InitialDatumSpec::Kind::box;
  s.center = c;
  s.half_width = hw;
  s.height = h;
  return s;
}

}  // namespace

TEST_CASE("box mass matches the analytic mass within one cell") {
  Grid grid = build_grid(8.0, 1024);
  Field u = make_initial_field(box_spec(0.0, 1.0, 1.0), grid);
  CHECK(mass(u, grid) == Catch::Approx(2.0).margin(grid.dx));
  CHECK(is_admissible(u));
}

TEST_CASE("bump mass matches the analytic value of the quartic profile") {
  Grid grid = build_grid(8.0, 1024);
  InitialDatumSpec s;
  s.kind = InitialDatumSpec::Kind::bump;
  s.center = 0.5;
  s.half_width = 1.5;
  s.height = 0.8;
  Field u = make_initial_field(s, grid);
  // int h (1-s^2)^2 over one half-width is h*hw*16/15
  CHECK(mass(u, grid) == Catch::Approx(0.8 * 1.5 * 16.0 / 15.0).margin(grid.dx));
}

TEST_CASE("power_contact profile values") {
  Grid grid = build_grid(8.0, 2048);
  InitialDatumSpec s;
  s.kind = InitialDatumSpec::Kind::power_contact;
  s.x0 = 0.0;
  s.alpha = 2.0;
  s.scale = 1.0;
  s.height = 1.0;
  s.side = +1;
  s.plateau = 1.0;
  Field u = make_initial_field(s, grid);
  // value at x = 0.5 is 0.25; sample the nearest cell midpoint
  int idx = 0;
  for (int i = 0; i < grid.n; ++i)
    if (std::abs(grid.centers[i] - 0.5) < std::abs(grid.centers[idx] - 0.5)) idx = i;
  CHECK(u[idx] == Catch::Approx(0.25).margin(2.0 * grid.dx));
  // zero on the other side, plateau height past the ramp
  for (int i = 0; i < grid.n; ++i) {
    if (grid.centers[i] < 0.0) CHECK(u[i] == 0.0);
    if (grid.centers[i] > 1.0 && grid.centers[i] < 2.0) CHECK(u[i] == 1.0);
  }
}

TEST_CASE("two_bump vanishes on the gap") {
  Grid grid = build_grid(8.0, 512);
  InitialDatumSpec s;
  s.kind = InitialDatumSpec::Kind::two_bump;
  s.gap_center = 0.0;
  s.gap_radius = 1.0;
  s.width = 1.0;
  s.height = 1.0;
  Field u = make_initial_field(s, grid);
  for (int i = 0; i < grid.n; ++i) {
    if (std::abs(grid.centers[i]) < 1.0) CHECK(u[i] == 0.0);
  }
  CHECK(mass(u, grid) > 0.0);
}

TEST_CASE("support exceeding the domain is a geometry error") {
  Grid grid = build_grid(2.0, 64);
  CHECK_THROWS_AS(make_initial_field(box_spec(1.5, 1.0, 1.0), grid), GeometryError);
}

TEST_CASE("regularize_initial_datum handles the flat cases exactly") {
  Grid grid = build_grid(1.0, 64);
  PhysicalParams p{1.0, 1.0, 0.01};

  FieldPair zero{Field(grid.n, 0.0), Field(grid.n, 0.0)};
  FieldPair rz = regularize_initial_datum(zero, p, grid);
  for (double v : rz.f) CHECK(v == Catch::Approx(0.01).epsilon(1e-13));
  CHECK(mass(rz.f, grid) == Catch::Approx(0.02).epsilon(1e-12));

  FieldPair c{Field(grid.n, 0.7), Field(grid.n, 0.3)};
  FieldPair rc = regularize_initial_datum(c, p, grid);
  for (double v : rc.f) CHECK(v == Catch::Approx(0.71).epsilon(1e-13));
  for (double v : rc.g) CHECK(v == Catch::Approx(0.31).epsilon(1e-13));
}

TEST_CASE("regularize_initial_datum is mass-affine and respects the maximum principle") {
  Grid grid = build_grid(8.0, 1024);
  PhysicalParams p{1.0, 1.0, 1e-3};

  SECTION("box of mass 2") {
    FieldPair raw{make_initial_field(box_spec(0.0, 1.0, 1.0), grid), Field(grid.n, 0.0)};
    const double m0 = mass(raw.f, grid);
    FieldPair reg = regularize_initial_datum(raw, p, grid);
    const double expected = m0 + 1e-3 * 2.0 * 8.0;
    CHECK(mass(reg.f, grid) == Catch::Approx(expected).epsilon(1e-12));
    CHECK(min_value(reg.f) >= 1e-3 - 1e-15);
    CHECK(max_value(reg.f) <= 1.0 + 1e-3 + 1e-12);
  }

  SECTION("random fields") {
    std::mt19937 rng(31415);
    std::uniform_real_distribution<double> u(0.0, 2.0);
    for (int trial = 0; trial < 10; ++trial) {
      FieldPair raw{Field(grid.n), Field(grid.n)};
      for (int i = 0; i < grid.n; ++i) {
        raw.f[i] = u(rng);
        raw.g[i] = u(rng);
      }
      FieldPair reg = regularize_initial_datum(raw, p, grid);
      CHECK(mass(reg.f, grid) ==
            Catch::Approx(mass(raw.f, grid) + p.eps * 2.0 * grid.half_width).epsilon(1e-12));
      CHECK(min_value(reg.f) >= min_value(raw.f) + p.eps - 1e-12);
      CHECK(max_value(reg.f) <= max_value(raw.f) + p.eps + 1e-12);
    }
  }
}

TEST_CASE("regularize_initial_datum rejects eps = 0") {
  Grid grid = build_grid(1.0, 16);
  PhysicalParams p{1.0, 1.0, 0.0};
  FieldPair zero{Field(grid.n, 0.0), Field(grid.n, 0.0)};
  CHECK_THROWS_AS(regularize_initial_datum(zero, p, grid), ParamError);
}

TEST_CASE("constructors reject negative samples") {
  Grid grid = build_grid(1.0, 16);
  InitialDatumSpec s;
  s.kind = InitialDatumSpec::Kind::samples;
  s.samples.assign(grid.n, 0.5);
  s.samples[3] = -0.1;
  CHECK_THROWS_AS(make_initial_field(s, grid), AdmissibilityError);
}
