#include <catch2/catch_amalgamated.hpp>
#include <cmath>
#include <random>

#include "thinfilm/initial_data.hpp"
#include "thinfilm/solver.hpp"

using namespace thinfilm;

namespace {

FieldPair gaussian_pair(const Grid& grid, double eps = 0.0) {
  FieldPair s{Field(grid.n), Field(grid.n)};
  for (int i = 0; i < grid.n; ++i) {
    const double x = grid.centers[i];
    s.f[i] = eps + std::exp(-4.0 * (x + 0.3) * (x + 0.3));
    s.g[i] = eps + 0.8 * std::exp(-3.0 * (x - 0.4) * (x - 0.4));
  }
  return s;
}

}  // namespace

TEST_CASE("stable_dt matches the stated examples") {
  Grid grid = build_grid(1.6, 32);  // dx = 0.1
  REQUIRE(grid.dx == Catch::Approx(0.1).epsilon(1e-15));
  PhysicalParams p{1.0, 1.0, 0.0};

  FieldPair zero{Field(grid.n, 0.0), Field(grid.n, 0.0)};
  CHECK(stable_dt(zero, p, grid, 0.2) == Catch::Approx(0.002).epsilon(1e-13));

  FieldPair ones{Field(grid.n, 1.0), Field(grid.n, 0.0)};
  CHECK(stable_dt(ones, p, grid, 0.2) == Catch::Approx(0.0005).epsilon(1e-13));

  // doubling n halves dx and quarters dt
  Grid fine = build_grid(1.6, 64);
  FieldPair ones2{Field(fine.n, 1.0), Field(fine.n, 0.0)};
  CHECK(stable_dt(ones2, p, fine, 0.2) ==
        Catch::Approx(0.25 * stable_dt(ones, p, grid, 0.2)).epsilon(1e-13));
}

TEST_CASE("flat regularized state is a fixed point") {
  Grid grid = build_grid(2.0, 128);
  PhysicalParams p{1.0, 1.0, 1e-2};
  auto ws = build_helmholtz_workspace(grid, p.eps);
  FieldPair s{Field(grid.n, 1e-2), Field(grid.n, 1e-2)};
  const double dt = stable_dt(s, p, grid, 0.2);
  FieldPair next = step(s, p, grid, dt, &ws);
  for (int i = 0; i < grid.n; ++i) {
    CHECK(next.f[i] == Catch::Approx(1e-2).epsilon(1e-14));
    CHECK(next.g[i] == Catch::Approx(1e-2).epsilon(1e-14));
  }
}

TEST_CASE("mass is conserved per step to round-off") {
  std::mt19937 rng(42);
  std::uniform_real_distribution<double> u(0.0, 1.0);
  Grid grid = build_grid(4.0, 256);
  PhysicalParams p{1.4, 0.8, 1e-3};
  auto ws = build_helmholtz_workspace(grid, p.eps);
  FieldPair s{Field(grid.n), Field(grid.n)};
  for (int i = 0; i < grid.n; ++i) {
    s.f[i] = p.eps + u(rng);
    s.g[i] = p.eps + u(rng);
  }
  double mf = mass(s.f, grid), mg = mass(s.g, grid);
  for (int k = 0; k < 200; ++k) {
    const double dt = stable_dt(s, p, grid, 0.2);
    s = step(s, p, grid, dt, &ws);
  }
  CHECK(mass(s.f, grid) == Catch::Approx(mf).epsilon(1e-13));
  CHECK(mass(s.g, grid) == Catch::Approx(mg).epsilon(1e-13));
  CHECK(min_value(s.f) >= p.eps - 1e-15);
  CHECK(min_value(s.g) >= p.eps - 1e-15);
}

TEST_CASE("limit mode preserves non-negativity on degenerate fronts") {
  Grid grid = build_grid(4.0, 256);
  PhysicalParams p{1.0, 1.0, 0.0};
  InitialDatumSpec spec;
  spec.kind = InitialDatumSpec::Kind::box;
  spec.center = 0.0;
  spec.half_width = 1.0;
  spec.height = 1.0;
  FieldPair s{make_initial_field(spec, grid), Field(grid.n, 0.0)};
  for (int i = 0; i < grid.n; ++i) s.g[i] = 0.5 * s.f[i];
  for (int k = 0; k < 500; ++k) {
    const double dt = stable_dt(s, p, grid, 0.2);
    s = step(s, p, grid, dt);
    REQUIRE(min_value(s.f) >= 0.0);
    REQUIRE(min_value(s.g) >= 0.0);
  }
}

TEST_CASE("oversized dt is rejected") {
  Grid grid = build_grid(2.0, 64);
  PhysicalParams p{1.0, 1.0, 0.0};
  FieldPair s{Field(grid.n, 1.0), Field(grid.n, 1.0)};
  const double bound = stable_dt(s, p, grid, 1.0);
  CHECK_THROWS_AS(step(s, p, grid, 2.0 * bound), ParamError);
  CHECK_THROWS_AS(step(s, p, grid, -1.0), ParamError);
}

TEST_CASE("run: zero data stays zero in limit mode") {
  Grid grid = build_grid(2.0, 64);
  PhysicalParams p{1.0, 1.0, 0.0};
  FieldPair s{Field(grid.n, 0.0), Field(grid.n, 0.0)};
  StepperConfig cfg;
  cfg.t_end = 0.1;
  cfg.snapshot_times = {0.05, 0.1};
  cfg.diagnostics_stride = 8;
  Trajectory traj = run(s, p, grid, cfg);
  for (const FieldPair& snap : traj.snapshots) {
    CHECK(max_value(snap.f) == 0.0);
    CHECK(max_value(snap.g) == 0.0);
  }
  for (const LedgerRow& row : traj.ledger) {
    CHECK(row.energy == 0.0);
    CHECK(row.mass_f == 0.0);
  }
}

TEST_CASE("run: snapshots land on the requested times") {
  Grid grid = build_grid(2.0, 128);
  PhysicalParams p{1.0, 1.0, 0.0};
  FieldPair s = gaussian_pair(grid);
  StepperConfig cfg;
  cfg.t_end = 0.02;
  cfg.snapshot_times = {0.004, 0.013, 0.02};
  cfg.diagnostics_stride = 16;
  Trajectory traj = run(s, p, grid, cfg);
  for (double want : cfg.snapshot_times) {
    bool found = false;
    for (double got : traj.snapshot_times)
      if (std::abs(got - want) <= 1e-12) found = true;
    CHECK(found);
  }
  CHECK(traj.final_time == Catch::Approx(0.02).margin(1e-12));
}

TEST_CASE("run: dissipation accumulators are non-decreasing") {
  Grid grid = build_grid(2.0, 128);
  PhysicalParams p{1.0, 1.0, 0.0};
  FieldPair s = gaussian_pair(grid);
  StepperConfig cfg;
  cfg.t_end = 0.02;
  cfg.diagnostics_stride = 4;
  Trajectory traj = run(s, p, grid, cfg);
  for (std::size_t k = 1; k < traj.ledger.size(); ++k) {
    CHECK(traj.ledger[k].d_energy >= traj.ledger[k - 1].d_energy);
    CHECK(traj.ledger[k].d_entropy >= traj.ledger[k - 1].d_entropy);
  }
  CHECK(traj.ledger.back().d_energy > 0.0);
}

TEST_CASE("run: even initial data stay even") {
  Grid grid = build_grid(2.0, 128);
  PhysicalParams p{1.0, 1.0, 1e-3};
  FieldPair s{Field(grid.n), Field(grid.n)};
  for (int i = 0; i < grid.n; ++i) {
    const double x = grid.centers[i];
    s.f[i] = p.eps + std::exp(-3.0 * x * x);
    s.g[i] = p.eps + 0.5 * std::exp(-5.0 * x * x);
  }
  StepperConfig cfg;
  cfg.mode = Mode::regularized;
  cfg.t_end = 0.05;
  cfg.diagnostics_stride = 64;
  Trajectory traj = run(s, p, grid, cfg);
  const FieldPair& last = traj.snapshots.back();
  double asym = 0.0;
  for (int i = 0; i < grid.n; ++i)
    asym = std::max(asym, std::abs(last.f[i] - last.f[grid.n - 1 - i]));
  CHECK(asym <= 1e-12 * max_value(last.f));
}

TEST_CASE("run: identical inputs give bitwise-identical trajectories") {
  Grid grid = build_grid(2.0, 128);
  PhysicalParams p{1.3, 0.7, 1e-3};
  FieldPair s = gaussian_pair(grid, p.eps);
  StepperConfig cfg;
  cfg.mode = Mode::regularized;
  cfg.t_end = 0.03;
  cfg.diagnostics_stride = 8;
  cfg.energy_weights = {unit_weight(), hat_weight(0.0, 1.0)};
  Trajectory a = run(s, p, grid, cfg);
  Trajectory b = run(s, p, grid, cfg);
  REQUIRE(a.snapshots.size() == b.snapshots.size());
  for (std::size_t k = 0; k < a.snapshots.size(); ++k)
    for (int i = 0; i < grid.n; ++i) {
      REQUIRE(a.snapshots[k].f[i] == b.snapshots[k].f[i]);
      REQUIRE(a.snapshots[k].g[i] == b.snapshots[k].g[i]);
    }
  REQUIRE(a.ledger.size() == b.ledger.size());
  for (std::size_t k = 0; k < a.ledger.size(); ++k)
    REQUIRE(a.ledger[k].energy == b.ledger[k].energy);
}

TEST_CASE("run: configuration errors") {
  Grid grid = build_grid(2.0, 64);
  PhysicalParams p{1.0, 1.0, 0.0};
  FieldPair s{Field(grid.n, 0.1), Field(grid.n, 0.1)};
  StepperConfig cfg;
  cfg.t_end = -1.0;
  CHECK_THROWS_AS(run(s, p, grid, cfg), ParamError);
  cfg.t_end = 1.0;
  cfg.mode = Mode::regularized;  // eps = 0
  CHECK_THROWS_AS(run(s, p, grid, cfg), ParamError);
  cfg.mode = Mode::limit;
  cfg.snapshot_times = {0.5, 0.2};
  CHECK_THROWS_AS(run(s, p, grid, cfg), ParamError);
  cfg.snapshot_times = {};
  cfg.dt_override = 1.0;  // far beyond the CFL bound
  CHECK_THROWS_AS(run(s, p, grid, cfg), ParamError);
}

namespace {

// step variant with the upwinding of the cross terms replaced by face
// averages; used to show the production flux form is what protects
// non-negativity
FieldPair centered_cross_step(const FieldPair& s, const PhysicalParams& p, const Grid& grid,
                              double dt) {
  const int n = grid.n;
  const double R = p.R, rmu = p.R_mu, inv_dx = 1.0 / grid.dx;
  Field jf(n + 1, 0.0), jg(n + 1, 0.0);
  for (int j = 1; j < n; ++j) {
    const double fl = s.f[j - 1], fr = s.f[j];
    const double gl = s.g[j - 1], gr = s.g[j];
    const double sG = (s.g[j] - s.g[j - 1]) * inv_dx;
    const double sF = (s.f[j] - s.f[j - 1]) * inv_dx;
    jf[j] = (1.0 + R) * 0.5 * (fr * fr - fl * fl) * inv_dx + R * 0.5 * (fl + fr) * sG;
    jg[j] = rmu * (0.5 * (gr * gr - gl * gl) * inv_dx + 0.5 * (gl + gr) * sF);
  }
  FieldPair out{Field(n), Field(n)};
  const double lam = dt * inv_dx;
  for (int i = 0; i < n; ++i) {
    out.f[i] = s.f[i] + lam * (jf[i + 1] - jf[i]);
    out.g[i] = s.g[i] + lam * (jg[i + 1] - jg[i]);
  }
  return out;
}

}  // namespace

TEST_CASE("fault injection: centered cross fluxes lose non-negativity") {
  Grid grid = build_grid(4.0, 256);
  PhysicalParams p{1.0, 1.0, 0.0};
  // f has a degenerate quadratic contact at x = 0 (self-diffusion refill is
  // O(dx^3) there) while g keeps an O(1) downhill slope across the contact,
  // so a centered cross flux drains the empty cell
  FieldPair init{Field(grid.n, 0.0), Field(grid.n, 0.0)};
  for (int i = 0; i < grid.n; ++i) {
    const double x = grid.centers[i];
    if (x > 0.0) init.f[i] = 0.8 * std::min(x * x, 1.0);
    init.g[i] = std::clamp(0.5 - 0.25 * x, 0.0, 1.0);
  }

  FieldPair faulty = init;
  double faulty_min = 0.0;
  for (int k = 0; k < 2000; ++k) {
    const double dt = stable_dt(faulty, p, grid, 0.2);
    faulty = centered_cross_step(faulty, p, grid, dt);
    faulty_min = std::min(faulty_min, std::min(min_value(faulty.f), min_value(faulty.g)));
    if (faulty_min < -1e-8) break;
  }
  CHECK(faulty_min < -1e-8);  // the positivity gate trips without upwinding

  FieldPair good = init;
  for (int k = 0; k < 2000; ++k) {
    const double dt = stable_dt(good, p, grid, 0.2);
    good = step(good, p, grid, dt);
  }
  CHECK(min_value(good.f) >= 0.0);
  CHECK(min_value(good.g) >= 0.0);
}

TEST_CASE("epsilon refinement is Cauchy at fixed resolution") {
  Grid grid = build_grid(4.0, 256);
  InitialDatumSpec spec;
  spec.kind = InitialDatumSpec::Kind::bump;
  spec.center = 0.0;
  spec.half_width = 1.5;
  spec.height = 1.0;
  Field raw = make_initial_field(spec, grid);

  std::vector<double> eps_levels = {8e-3, 4e-3, 2e-3, 1e-3};
  std::vector<Field> finals;
  for (double eps : eps_levels) {
    PhysicalParams p{1.0, 1.0, eps};
    FieldPair init = regularize_initial_datum({raw, raw}, p, grid);
    StepperConfig cfg;
    cfg.mode = Mode::regularized;
    cfg.t_end = 0.25;
    cfg.diagnostics_stride = 1 << 30;
    Trajectory traj = run(init, p, grid, cfg);
    finals.push_back(traj.snapshots.back().f);
  }
  std::vector<double> dist;
  for (std::size_t k = 0; k + 1 < finals.size(); ++k) {
    Accumulator d;
    for (int i = 0; i < grid.n; ++i) d.add(std::abs(finals[k][i] - finals[k + 1][i]));
    dist.push_back(d.value() * grid.dx);
  }
  REQUIRE(dist.size() == 3u);
  CHECK(dist[1] < dist[0]);
  CHECK(dist[2] < dist[1]);
}
