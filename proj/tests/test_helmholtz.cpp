#include <catch2/catch_amalgamated.hpp>
#include <numbers>
#include <random>

#include "thinfilm/field.hpp"
#include "thinfilm/helmholtz.hpp"

using namespace thinfilm;

TEST_CASE("constants are fixed points for any eps") {
  Grid grid = build_grid(2.0, 128);
  for (double eps : {1e-4, 1e-2, 0.3}) {
    auto ws = build_helmholtz_workspace(grid, eps);
    PhysicalParams p{1.0, 1.0, eps};
    Field u(grid.n, 3.25);
    Field F = helmholtz_inverse(u, p, ws);
    for (double v : F) CHECK(v == Catch::Approx(3.25).epsilon(1e-13));
  }
}

TEST_CASE("eps = 0 is the identity") {
  Grid grid = build_grid(1.0, 32);
  auto ws = build_helmholtz_workspace(grid, 0.0);
  PhysicalParams p{1.0, 1.0, 0.0};
  Field u(grid.n);
  for (int i = 0; i < grid.n; ++i) u[i] = std::sin(3.0 * grid.centers[i]);
  Field F = helmholtz_inverse(u, p, ws);
  for (int i = 0; i < grid.n; ++i) CHECK(F[i] == u[i]);
}

TEST_CASE("Neumann cosine eigenfunction") {
  const double L = 2.0, eps = 0.1;
  Grid grid = build_grid(L, 1024);
  auto ws = build_helmholtz_workspace(grid, eps);
  PhysicalParams p{1.0, 1.0, eps};
  const double pi = std::numbers::pi;
  Field u(grid.n);
  for (int i = 0; i < grid.n; ++i) u[i] = std::cos(pi * grid.centers[i] / L);
  Field F = helmholtz_inverse(u, p, ws);
  const double lam = 1.0 / (1.0 + eps * eps * pi * pi / (L * L));
  for (int i = 0; i < grid.n; ++i)
    CHECK(F[i] == Catch::Approx(lam * u[i]).margin(5.0 * grid.dx * grid.dx));
}

TEST_CASE("residual, mass preservation, and monotonicity on random inputs") {
  std::mt19937 rng(777);
  std::uniform_real_distribution<double> unif(0.0, 1.0);
  for (int trial = 0; trial < 30; ++trial) {
    const int n = 8 * (1 + static_cast<int>(unif(rng) * 200));
    const double L = 0.5 + 7.5 * unif(rng);
    const double eps = std::pow(10.0, -4.0 + 3.5 * unif(rng));  // up to ~0.3
    Grid grid = build_grid(L, n);
    auto ws = build_helmholtz_workspace(grid, eps);
    PhysicalParams p{1.0, 1.0, eps};

    Field u(grid.n);
    for (double& v : u) v = unif(rng);
    Field F = helmholtz_inverse(u, p, ws);

    Field Au = apply_helmholtz_operator(F, ws);
    double resid = 0.0, umax = 0.0;
    for (int i = 0; i < grid.n; ++i) {
      resid = std::max(resid, std::abs(Au[i] - u[i]));
      umax = std::max(umax, std::abs(u[i]));
    }
    CHECK(resid <= 1e-12 * umax);

    CHECK(mass(F, grid) == Catch::Approx(mass(u, grid)).epsilon(1e-12));
    CHECK(min_value(F) >= 0.0);
    CHECK(min_value(F) >= min_value(u) - 1e-12);
    CHECK(max_value(F) <= max_value(u) + 1e-12);
  }
}

TEST_CASE("workspace bands have unit row sums and diagonal dominance") {
  Grid grid = build_grid(4.0, 64);
  auto ws = build_helmholtz_workspace(grid, 0.05);
  for (int i = 0; i < ws.n; ++i) {
    CHECK(ws.diag[i] + ws.lower[i] + ws.upper[i] == Catch::Approx(1.0).epsilon(1e-15));
    CHECK(ws.diag[i] >= 1.0);
    CHECK(ws.diag[i] > std::abs(ws.lower[i]) + std::abs(ws.upper[i]));
  }
}

TEST_CASE("mismatched workspace is rejected") {
  Grid grid = build_grid(1.0, 32);
  auto ws = build_helmholtz_workspace(grid, 0.1);
  PhysicalParams p{1.0, 1.0, 0.2};
  Field u(grid.n, 1.0);
  CHECK_THROWS_AS(helmholtz_inverse(u, p, ws), ParamError);
  PhysicalParams ok{1.0, 1.0, 0.1};
  Field bad(grid.n + 2, 1.0);
  CHECK_THROWS_AS(helmholtz_inverse(bad, ok, ws), ParamError);
}
