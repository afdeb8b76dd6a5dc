#pragma once

//! Conservative explicit finite-volume integration of the coupled thin-film
//! system, in two modes:
//!   regularized: df/dt = (1+R) d(f df) + R d((f-eps) d G),  G = R_eps[g]
//!                dg/dt = R_mu d((g-eps) d F) + R_mu d(g dg), F = R_eps[f]
//!   limit:       same with eps = 0 and R_eps = identity.
//! Self-diffusion fluxes are centered differences of the squares; the cross
//! terms upwind (f-eps) against the sign of the face slope of the smoothed
//! other species, which preserves the eps floor. Boundary fluxes vanish, so
//! per-species mass telescopes exactly.

#include <algorithm>
#include <cmath>
#include <limits>
#include <optional>
#include <vector>

#include "thinfilm/errors.hpp"
#include "thinfilm/field.hpp"
#include "thinfilm/functionals.hpp"
#include "thinfilm/grid.hpp"
#include "thinfilm/helmholtz.hpp"

namespace thinfilm {

enum class Mode { regularized, limit };

struct EarlyStop {
  bool on_edge = false;  // stop once the tracked edge leaves x0 by more than `cells` cells
  double x0 = 0.0;
  int cells = 0;
  bool on_probe = false;  // stop once the first probe window exceeds probe_delta
  double probe_delta = 0.0;
};

struct StepperConfig {
  double cfl_safety = 0.2;  // sigma in (0,1]
  double t_end = 0.0;
  std::vector<double> snapshot_times;
  int diagnostics_stride = 1;
  Mode mode = Mode::limit;
  long max_steps = -1;       // <0: unlimited
  double dt_override = 0.0;  // 0: adaptive from stable_dt

  // diagnostics wiring
  std::vector<Weight> energy_weights;                 // local-energy ledgers
  std::vector<std::pair<double, double>> probe_windows;  // (lo, hi) max-trackers
  double support_delta = -1.0;            // <0: default from mode and initial data
  double support_delta_component = -1.0;  // per-species threshold
  EarlyStop early_stop;
};

//! Per-weight time series backing the local energy estimates. Cumulative
//! columns are trapezoidal in time at the diagnostics stride.
struct WeightSeries {
  Weight weight;
  std::vector<double> weighted_energy;  // int [f^2+R(f+g)^2] zeta^2 dx
  std::vector<double> dissipation;      // cumulative int (f A^2 + R R_mu g B^2) zeta^2
  std::vector<double> source;           // cumulative int [f((1+R)f+Rg)^2 + R R_mu g(f+g)^2] |zeta'|^2
  std::vector<double> wsq_source;       // cumulative int w^2 |zeta'|^2
  std::vector<double> q0, q1, q2;       // cumulative int Q^2 (r-|x-a|)_+^k
};

struct SupportTrace {
  double delta = 0.0;
  std::vector<double> t, left, right;  // NaN entries mark empty support
};

struct Probe {
  double lo = 0.0, hi = 0.0;
  std::vector<double> max_value;  // max of f+g over the window, per sample
};

struct Trajectory {
  Grid grid;
  PhysicalParams params;
  Mode mode = Mode::limit;

  std::vector<double> snapshot_times;
  std::vector<FieldPair> snapshots;

  std::vector<LedgerRow> ledger;
  std::vector<WeightSeries> weight_series;
  std::vector<Probe> probes;
  std::vector<double> sample_times;  // times of ledger/trace/probe samples

  SupportTrace trace_sum, trace_f, trace_g;

  // pointwise slope bound |Q|^2 <= 2 max{1, sqrt(R)/R_mu} (f A^2 + R R_mu g B^2),
  // scanned at every sampled cell and time
  long haendel_cells_checked = 0;
  long haendel_violations = 0;
  double haendel_worst_ratio = 0.0;

  double clipped_mass_f = 0.0, clipped_mass_g = 0.0;  // limit-mode round-off clips
  double final_time = 0.0;
  long steps = 0;
};

//! Largest stable explicit step: sigma * dx^2 / (2 * D) where D is the
//! largest per-cell spectral radius of the frozen-coefficient diffusion
//! matrix [[(1+R)f, R(f-eps)], [R_mu(g-eps), R_mu g]]. An all-degenerate
//! state falls back to sigma * dx^2.
inline double stable_dt(const FieldPair& s, const PhysicalParams& params, const Grid& grid,
                        double sigma) {
  if (!(sigma > 0.0) || sigma > 1.0) throw ParamError("cfl safety factor must lie in (0,1]");
  const double R = params.R, rmu = params.R_mu, eps = params.eps;
  double dmax = 0.0;
  for (int i = 0; i < grid.n; ++i) {
    const double a = (1.0 + R) * s.f[i];
    const double b = R * std::max(s.f[i] - eps, 0.0);
    const double c = rmu * std::max(s.g[i] - eps, 0.0);
    const double d = rmu * s.g[i];
    const double rho = 0.5 * (a + d) + std::sqrt(0.25 * (a - d) * (a - d) + b * c);
    dmax = std::max(dmax, rho);
  }
  const double dx2 = grid.dx * grid.dx;
  return dmax > 0.0 ? sigma * dx2 / (2.0 * dmax) : sigma * dx2;
}

struct StepStats {
  double clipped_f = 0.0, clipped_g = 0.0;
};

namespace detail {

struct StepBuffers {
  Field F, G;        // smoothed fields (aliases of f,g in limit mode)
  Field jf, jg;      // fluxes at the n+1 faces
  Field fn, gn;      // next state
  Field df, dg;      // gradients for the per-step dissipation rates
  std::vector<char> mask;
};

inline void compute_step(const FieldPair& s, const PhysicalParams& params, const Grid& grid,
                         double dt, const HelmholtzWorkspace* ws, StepBuffers& b,
                         StepStats& stats) {
  const int n = grid.n;
  const double R = params.R, rmu = params.R_mu, eps = params.eps;
  const double dx = grid.dx;
  const bool regularized = eps > 0.0;

  const Field* F = &s.f;
  const Field* G = &s.g;
  if (regularized) {
    if (ws == nullptr) throw ParamError("step: regularized mode needs a Helmholtz workspace");
    b.F = helmholtz_inverse(s.f, params, *ws);
    b.G = helmholtz_inverse(s.g, params, *ws);
    F = &b.F;
    G = &b.G;
  }

  b.jf.assign(n + 1, 0.0);
  b.jg.assign(n + 1, 0.0);
  const double inv_dx = 1.0 / dx;
  for (int j = 1; j < n; ++j) {
    const double fl = s.f[j - 1], fr = s.f[j];
    const double gl = s.g[j - 1], gr = s.g[j];
    const double sG = ((*G)[j] - (*G)[j - 1]) * inv_dx;
    const double sF = ((*F)[j] - (*F)[j - 1]) * inv_dx;
    const double phi = (sG >= 0.0 ? fr : fl) - eps;  // upwind against velocity -R sG
    const double psi = (sF >= 0.0 ? gr : gl) - eps;
    b.jf[j] = (1.0 + R) * 0.5 * (fr * fr - fl * fl) * inv_dx + R * phi * sG;
    b.jg[j] = rmu * (0.5 * (gr * gr - gl * gl) * inv_dx + psi * sF);
  }

  b.fn.resize(n);
  b.gn.resize(n);
  const double lam = dt * inv_dx;
  for (int i = 0; i < n; ++i) {
    b.fn[i] = s.f[i] + lam * (b.jf[i + 1] - b.jf[i]);
    b.gn[i] = s.g[i] + lam * (b.jg[i + 1] - b.jg[i]);
  }

  stats = StepStats{};
  if (regularized) {
    const double floor = eps - 1e-15;
    for (int i = 0; i < n; ++i) {
      if (!std::isfinite(b.fn[i]) || !std::isfinite(b.gn[i]))
        throw InvariantFailure("step: non-finite value produced");
      if (b.fn[i] < floor || b.gn[i] < floor)
        throw InvariantFailure("step: eps floor violated");
    }
  } else {
    const double scale = std::max({1.0, max_value(s.f), max_value(s.g)});
    const double clip_tol = 1e-12 * scale;
    for (int i = 0; i < n; ++i) {
      if (!std::isfinite(b.fn[i]) || !std::isfinite(b.gn[i]))
        throw InvariantFailure("step: non-finite value produced");
      if (b.fn[i] < 0.0) {
        if (b.fn[i] < -clip_tol) throw InvariantFailure("step: negativity beyond round-off");
        stats.clipped_f -= b.fn[i] * dx;
        b.fn[i] = 0.0;
      }
      if (b.gn[i] < 0.0) {
        if (b.gn[i] < -clip_tol) throw InvariantFailure("step: negativity beyond round-off");
        stats.clipped_g -= b.gn[i] * dx;
        b.gn[i] = 0.0;
      }
    }
  }
}

// energy/entropy dissipation integrands without the sqrt/pow detour
inline void dissipation_rates_into(const FieldPair& s, const PhysicalParams& params,
                                   const Grid& grid, StepBuffers& b, double& energy_rate,
                                   double& entropy_rate) {
  const int n = grid.n;
  const double R = params.R, rmu = params.R_mu;
  b.mask.resize(n);
  for (int i = 0; i < n; ++i) b.mask[i] = (s.f[i] + s.g[i] > 0.0) ? 1 : 0;
  edge_aware_gradient(s.f, b.mask, grid.dx, b.df);
  edge_aware_gradient(s.g, b.mask, grid.dx, b.dg);
  Accumulator e, h;
  for (int i = 0; i < n; ++i) {
    const double A = (1.0 + R) * b.df[i] + R * b.dg[i];
    const double B = b.df[i] + b.dg[i];
    e.add(s.f[i] * A * A + R * rmu * s.g[i] * B * B);
    h.add(b.df[i] * b.df[i] + R * B * B);
  }
  energy_rate = e.value() * grid.dx;
  entropy_rate = (R / (1.0 + 2.0 * R)) * h.value() * grid.dx;
}

}  // namespace detail

//! One forward-Euler step. dt may not exceed the sigma = 1 stability bound.
inline FieldPair step(const FieldPair& s, const PhysicalParams& params, const Grid& grid,
                      double dt, const HelmholtzWorkspace* ws = nullptr,
                      StepStats* stats_out = nullptr) {
  validate(params);
  require_admissible(s, grid);
  if (!(dt > 0.0)) throw ParamError("step: dt must be positive");
  const double bound = stable_dt(s, params, grid, 1.0);
  if (dt > bound * (1.0 + 1e-9)) throw ParamError("step: dt exceeds the stability bound");
  detail::StepBuffers b;
  StepStats stats;
  detail::compute_step(s, params, grid, dt, ws, b, stats);
  if (stats_out) *stats_out = stats;
  return FieldPair{std::move(b.fn), std::move(b.gn)};
}

//! Edges of the smallest cell interval where u > delta, as outer cell
//! boundary coordinates; nullopt when no cell exceeds delta.
inline std::optional<std::pair<double, double>> field_support_edges(const Field& u,
                                                                    const Grid& grid,
                                                                    double delta) {
  int first = -1, last = -1;
  for (int i = 0; i < grid.n; ++i) {
    if (u[i] > delta) {
      if (first < 0) first = i;
      last = i;
    }
  }
  if (first < 0) return std::nullopt;
  return std::make_pair(grid.centers[first] - 0.5 * grid.dx, grid.centers[last] + 0.5 * grid.dx);
}

inline Trajectory run(const FieldPair& initial, const PhysicalParams& params, const Grid& grid,
                      const StepperConfig& config) {
  validate(params);
  require_admissible(initial, grid);
  if (!(config.t_end > 0.0)) throw ParamError("run: t_end must be positive");
  if (!(config.cfl_safety > 0.0) || config.cfl_safety > 1.0)
    throw ParamError("run: cfl safety factor must lie in (0,1]");
  if (config.diagnostics_stride < 1) throw ParamError("run: diagnostics stride must be >= 1");
  if (config.mode == Mode::regularized && !(params.eps > 0.0))
    throw ParamError("run: regularized mode requires eps > 0");
  if (config.mode == Mode::limit && params.eps != 0.0)
    throw ParamError("run: limit mode requires eps = 0");
  for (std::size_t k = 0; k < config.snapshot_times.size(); ++k) {
    const double tk = config.snapshot_times[k];
    if (!(tk >= 0.0) || tk > config.t_end) throw ParamError("run: snapshot time outside [0,t_end]");
    if (k > 0 && !(tk > config.snapshot_times[k - 1]))
      throw ParamError("run: snapshot times must be increasing");
  }
  if (config.mode == Mode::regularized) {
    for (int i = 0; i < grid.n; ++i)
      if (initial.f[i] < params.eps - 1e-15 || initial.g[i] < params.eps - 1e-15)
        throw ParamError("run: regularized initial state must sit on the eps floor");
  }

  Trajectory traj;
  traj.grid = grid;
  traj.params = params;
  traj.mode = config.mode;

  // support thresholds: above the eps floor (2*eps for the sum), relative to
  // the initial amplitude
  Field sum0(grid.n);
  double sum0_max = 0.0;
  for (int i = 0; i < grid.n; ++i) {
    sum0[i] = initial.f[i] + initial.g[i];
    sum0_max = std::max(sum0_max, sum0[i]);
  }
  const double rel = config.mode == Mode::regularized ? 1e-6 : 1e-9;
  double delta_sum = config.support_delta;
  if (delta_sum < 0.0) delta_sum = 2.0 * params.eps + rel * sum0_max;
  double delta_comp = config.support_delta_component;
  if (delta_comp < 0.0) delta_comp = params.eps + rel * sum0_max;
  traj.trace_sum.delta = delta_sum;
  traj.trace_f.delta = delta_comp;
  traj.trace_g.delta = delta_comp;

  for (const Weight& w : config.energy_weights) {
    if (w.kind == Weight::Kind::hat &&
        (w.a - w.r < -grid.half_width || w.a + w.r > grid.half_width))
      throw GeometryError("run: hat weight support exceeds the domain");
    WeightSeries ws;
    ws.weight = w;
    traj.weight_series.push_back(std::move(ws));
  }
  for (auto [lo, hi] : config.probe_windows) {
    if (!(lo < hi) || lo < -grid.half_width || hi > grid.half_width)
      throw GeometryError("run: probe window outside the domain");
    Probe p;
    p.lo = lo;
    p.hi = hi;
    traj.probes.push_back(std::move(p));
  }

  HelmholtzWorkspace hws;
  const bool regularized = config.mode == Mode::regularized;
  if (regularized) hws = build_helmholtz_workspace(grid, params.eps);

  if (config.dt_override > 0.0 &&
      config.dt_override > stable_dt(initial, params, grid, 1.0) * (1.0 + 1e-9))
    throw ParamError("run: dt override exceeds the stability bound");

  FieldPair state = initial;
  detail::StepBuffers buf;
  Accumulator d_energy, d_entropy;
  Accumulator clipped_f, clipped_g;

  const double haendel_const = 2.0 * std::max(1.0, std::sqrt(params.R) / params.R_mu);

  // per-weight previous integrand values for the trapezoidal accumulation
  struct WeightState {
    double diss = 0.0, src = 0.0, wsq = 0.0, q0 = 0.0, q1 = 0.0, q2 = 0.0;
  };
  std::vector<WeightState> wprev(traj.weight_series.size());
  std::vector<Accumulator> wdiss(traj.weight_series.size()), wsrc(traj.weight_series.size()),
      wwsq(traj.weight_series.size()), wq0(traj.weight_series.size()),
      wq1(traj.weight_series.size()), wq2(traj.weight_series.size());
  double prev_sample_t = 0.0;
  bool stop_requested = false;
  int edge_side = -1;

  auto record_sample = [&](double t) {
    LedgerRow row = global_functionals(state, params, grid, regularized ? &hws : nullptr);
    row.t = t;
    row.d_energy = d_energy.value();
    row.d_entropy = d_entropy.value();
    traj.ledger.push_back(row);
    traj.sample_times.push_back(t);

    WSlopeData sd = w_slope_data(state, params, grid);
    const double R = params.R, rmu = params.R_mu;

    for (int i = 0; i < grid.n; ++i) {
      const double q2v = sd.quotient[i] * sd.quotient[i];
      const double bound =
          haendel_const * (state.f[i] * sd.A[i] * sd.A[i] + R * rmu * state.g[i] * sd.B[i] * sd.B[i]);
      ++traj.haendel_cells_checked;
      if (q2v > bound * (1.0 + 1e-12) + 1e-300) ++traj.haendel_violations;
      if (bound > 0.0) traj.haendel_worst_ratio = std::max(traj.haendel_worst_ratio, q2v / bound);
    }

    const double dt_sample = t - prev_sample_t;
    for (std::size_t wi = 0; wi < traj.weight_series.size(); ++wi) {
      WeightSeries& series = traj.weight_series[wi];
      const Weight& w = series.weight;
      Accumulator we;
      WeightState now;
      Accumulator diss, src, wsq, q0, q1, q2;
      for (int i = 0; i < grid.n; ++i) {
        const double x = grid.centers[i];
        const double z = w.zeta(x), dz = w.dzeta(x);
        const double z2 = z * z, dz2 = dz * dz;
        const double f = state.f[i], g = state.g[i];
        const double w43 = f * f + R * (f + g) * (f + g);
        we.add(w43 * z2);
        diss.add((f * sd.A[i] * sd.A[i] + R * rmu * g * sd.B[i] * sd.B[i]) * z2);
        if (dz2 > 0.0) {
          const double pf = (1.0 + R) * f + R * g;
          src.add((f * pf * pf + R * rmu * g * (f + g) * (f + g)) * dz2);
          wsq.add(sd.w[i] * sd.w[i] * dz2);
        }
        const double qq = sd.quotient[i] * sd.quotient[i];
        if (w.kind == Weight::Kind::unit) {
          q0.add(qq);
          q1.add(qq);
          q2.add(qq);
        } else {
          const double hat = w.zeta(x);
          q0.add(qq);
          q1.add(qq * hat);
          q2.add(qq * hat * hat);
        }
      }
      now.diss = diss.value() * grid.dx;
      now.src = src.value() * grid.dx;
      now.wsq = wsq.value() * grid.dx;
      now.q0 = q0.value() * grid.dx;
      now.q1 = q1.value() * grid.dx;
      now.q2 = q2.value() * grid.dx;

      if (!series.weighted_energy.empty()) {
        const double h = 0.5 * dt_sample;
        wdiss[wi].add(h * (wprev[wi].diss + now.diss));
        wsrc[wi].add(h * (wprev[wi].src + now.src));
        wwsq[wi].add(h * (wprev[wi].wsq + now.wsq));
        wq0[wi].add(h * (wprev[wi].q0 + now.q0));
        wq1[wi].add(h * (wprev[wi].q1 + now.q1));
        wq2[wi].add(h * (wprev[wi].q2 + now.q2));
      }
      series.weighted_energy.push_back(we.value() * grid.dx);
      series.dissipation.push_back(wdiss[wi].value());
      series.source.push_back(wsrc[wi].value());
      series.wsq_source.push_back(wwsq[wi].value());
      series.q0.push_back(wq0[wi].value());
      series.q1.push_back(wq1[wi].value());
      series.q2.push_back(wq2[wi].value());
      wprev[wi] = now;
    }

    Field sum(grid.n);
    for (int i = 0; i < grid.n; ++i) sum[i] = state.f[i] + state.g[i];
    auto push_edges = [&](SupportTrace& tr, const Field& u) {
      auto e = field_support_edges(u, grid, tr.delta);
      tr.t.push_back(t);
      tr.left.push_back(e ? e->first : std::numeric_limits<double>::quiet_NaN());
      tr.right.push_back(e ? e->second : std::numeric_limits<double>::quiet_NaN());
    };
    push_edges(traj.trace_sum, sum);
    push_edges(traj.trace_f, state.f);
    push_edges(traj.trace_g, state.g);

    for (Probe& p : traj.probes) {
      double m = 0.0;
      for (int i = 0; i < grid.n; ++i)
        if (grid.centers[i] > p.lo && grid.centers[i] < p.hi) m = std::max(m, sum[i]);
      p.max_value.push_back(m);
    }

    const EarlyStop& es = config.early_stop;
    if (es.on_edge) {
      const auto& tr = traj.trace_sum;
      const double le = tr.left.back(), re = tr.right.back();
      if (!std::isnan(le)) {
        if (edge_side < 0)  // pick the tracked edge at the first sample
          edge_side = std::abs(le - es.x0) <= std::abs(re - es.x0) ? 0 : 1;
        const double edge = edge_side == 0 ? le : re;
        if (std::abs(edge - es.x0) > es.cells * grid.dx + 1e-12) stop_requested = true;
      }
    }
    if (es.on_probe && !traj.probes.empty() && traj.probes[0].max_value.back() > es.probe_delta)
      stop_requested = true;

    prev_sample_t = t;
  };

  record_sample(0.0);
  traj.snapshot_times.push_back(0.0);
  traj.snapshots.push_back(state);

  std::size_t next_snap = 0;
  while (next_snap < config.snapshot_times.size() && config.snapshot_times[next_snap] <= 0.0)
    ++next_snap;

  double t = 0.0;
  long steps = 0;
  StepStats stats;
  const double t_eps = 1e-12 * std::max(1.0, config.t_end);
  while (t < config.t_end - t_eps && !stop_requested) {
    if (config.max_steps >= 0 && steps >= config.max_steps) break;

    double dt = config.dt_override > 0.0 ? config.dt_override
                                         : stable_dt(state, params, grid, config.cfl_safety);
    double t_event = config.t_end;
    bool snap_hit = false;
    if (next_snap < config.snapshot_times.size() &&
        config.snapshot_times[next_snap] < t_event - t_eps) {
      t_event = config.snapshot_times[next_snap];
      snap_hit = true;
    } else if (next_snap < config.snapshot_times.size()) {
      snap_hit = std::abs(config.snapshot_times[next_snap] - config.t_end) <= t_eps;
    }
    bool hits_event = false;
    if (t + dt >= t_event - t_eps) {
      dt = t_event - t;
      hits_event = true;
    }

    double e_rate, h_rate;
    detail::dissipation_rates_into(state, params, grid, buf, e_rate, h_rate);
    d_energy.add(e_rate * dt);
    d_entropy.add(h_rate * dt);

    detail::compute_step(state, params, grid, dt, regularized ? &hws : nullptr, buf, stats);
    state.f.swap(buf.fn);
    state.g.swap(buf.gn);
    clipped_f.add(stats.clipped_f);
    clipped_g.add(stats.clipped_g);

    ++steps;
    t = hits_event ? t_event : t + dt;

    const bool is_final = t >= config.t_end - t_eps;
    if (hits_event && snap_hit && next_snap < config.snapshot_times.size() &&
        std::abs(t - config.snapshot_times[next_snap]) <= t_eps) {
      traj.snapshot_times.push_back(t);
      traj.snapshots.push_back(state);
      ++next_snap;
    }
    if (steps % config.diagnostics_stride == 0 || is_final) record_sample(t);
    if (is_final && (traj.snapshot_times.empty() ||
                     std::abs(traj.snapshot_times.back() - t) > t_eps)) {
      traj.snapshot_times.push_back(t);
      traj.snapshots.push_back(state);
    }
  }

  if (traj.sample_times.empty() || std::abs(traj.sample_times.back() - t) > t_eps)
    record_sample(t);
  if (std::abs(traj.snapshot_times.back() - t) > t_eps) {
    traj.snapshot_times.push_back(t);
    traj.snapshots.push_back(state);
  }

  traj.clipped_mass_f = clipped_f.value();
  traj.clipped_mass_g = clipped_g.value();
  traj.final_time = t;
  traj.steps = steps;
  return traj;
}

}  // namespace thinfilm
