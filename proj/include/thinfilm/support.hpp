#pragma once

//! Free-boundary diagnostics: support edges above a threshold, power-law
//! growth fits of the edges, persistence of an initial support gap, and
//! waiting-time detection with the r^{-5} criterion scan at a contact point.

#include <algorithm>
#include <cmath>
#include <limits>
#include <optional>
#include <utility>
#include <vector>

#include "thinfilm/errors.hpp"
#include "thinfilm/field.hpp"
#include "thinfilm/grid.hpp"
#include "thinfilm/solver.hpp"

namespace thinfilm {

//! Edges of supp(f+g) above delta. In regularized runs the eps floor covers
//! every cell, so delta must exceed eps to be meaningful.
inline std::optional<std::pair<double, double>> support_edges(const FieldPair& s,
                                                              const PhysicalParams& params,
                                                              const Grid& grid, double delta) {
  if (!(delta > 0.0)) throw ParamError("support_edges: delta must be positive");
  if (params.eps > 0.0 && delta <= params.eps)
    throw ParamError("support_edges: delta must exceed the eps floor");
  Field sum(grid.n);
  for (int i = 0; i < grid.n; ++i) sum[i] = s.f[i] + s.g[i];
  return field_support_edges(sum, grid, delta);
}

struct GrowthFit {
  bool waiting_regime = false;  // edge never left b0 on the window
  double exponent_right = 0.0, amplitude_right = 0.0;
  double exponent_left = 0.0, amplitude_left = 0.0;
  double residual = 0.0;  // larger RMS log-residual of the two sides
  int samples = 0;
};

namespace detail {

struct LogFit {
  double slope = 0.0, amplitude = 0.0, rms = 0.0;
  int m = 0;
};

inline LogFit fit_loglog(const std::vector<double>& t, const std::vector<double>& xi) {
  LogFit out;
  const int m = static_cast<int>(t.size());
  out.m = m;
  if (m < 2) return out;
  double sx = 0, sy = 0, sxx = 0, sxy = 0;
  for (int i = 0; i < m; ++i) {
    const double lx = std::log(t[i]), ly = std::log(xi[i]);
    sx += lx;
    sy += ly;
    sxx += lx * lx;
    sxy += lx * ly;
  }
  const double det = m * sxx - sx * sx;
  out.slope = (m * sxy - sx * sy) / det;
  const double intercept = (sy * sxx - sx * sxy) / det;
  out.amplitude = std::exp(intercept);
  double ss = 0;
  for (int i = 0; i < m; ++i) {
    const double r = std::log(xi[i]) - (intercept + out.slope * std::log(t[i]));
    ss += r * r;
  }
  out.rms = std::sqrt(ss / m);
  return out;
}

}  // namespace detail

//! Least-squares fit of log(edge - b0) against log t on [t1,t2], per side.
//! Needs at least 20 samples with the edge strictly beyond b0; otherwise the
//! trace is reported as still waiting.
inline GrowthFit fit_growth_exponent(const SupportTrace& trace, double b0,
                                     std::pair<double, double> window) {
  const auto [t1, t2] = window;
  if (!(t1 > 0.0) || !(t2 > t1)) throw ParamError("fit_growth_exponent: bad window");
  std::vector<double> tr, xr, tl, xl;
  for (std::size_t k = 0; k < trace.t.size(); ++k) {
    const double t = trace.t[k];
    if (t < t1 || t > t2) continue;
    if (!std::isnan(trace.right[k]) && trace.right[k] - b0 > 0.0) {
      tr.push_back(t);
      xr.push_back(trace.right[k] - b0);
    }
    if (!std::isnan(trace.left[k]) && -trace.left[k] - b0 > 0.0) {
      tl.push_back(t);
      xl.push_back(-trace.left[k] - b0);
    }
  }
  GrowthFit out;
  out.samples = static_cast<int>(std::min(tr.size(), tl.size()));
  if (tr.size() < 20 || tl.size() < 20) {
    out.waiting_regime = true;
    return out;
  }
  auto fr = detail::fit_loglog(tr, xr);
  auto fl = detail::fit_loglog(tl, xl);
  out.exponent_right = fr.slope;
  out.amplitude_right = fr.amplitude;
  out.exponent_left = fl.slope;
  out.amplitude_left = fl.amplitude;
  out.residual = std::max(fr.rms, fl.rms);
  return out;
}

//! First sample time at which f+g exceeds delta inside the half gap
//! (a-r0/2, a+r0/2); +inf when it never does within the trajectory.
//! The initial support must avoid the full gap (a-r0, a+r0).
inline double gap_persistence(const Trajectory& traj, double a, double r0, double delta) {
  if (!(r0 > 0.0)) throw ParamError("gap_persistence: r0 must be positive");
  if (traj.snapshots.empty()) throw ParamError("gap_persistence: empty trajectory");

  const FieldPair& init = traj.snapshots.front();
  for (int i = 0; i < traj.grid.n; ++i) {
    const double x = traj.grid.centers[i];
    if (x > a - r0 && x < a + r0 && init.f[i] + init.g[i] > delta)
      throw GeometryError("gap_persistence: initial support meets the gap");
  }

  const Probe* probe = nullptr;
  for (const Probe& p : traj.probes) {
    if (std::abs(p.lo - (a - 0.5 * r0)) <= 0.5 * traj.grid.dx &&
        std::abs(p.hi - (a + 0.5 * r0)) <= 0.5 * traj.grid.dx) {
      probe = &p;
      break;
    }
  }
  if (probe == nullptr)
    throw GeometryError("gap_persistence: no probe window was recorded for this gap");

  for (std::size_t k = 0; k < probe->max_value.size(); ++k)
    if (probe->max_value[k] > delta) return traj.sample_times[k];
  return std::numeric_limits<double>::infinity();
}

struct WaitingTime {
  double t_wait = 0.0;
  bool censored = false;  // edge never moved within the trajectory
  int side = 0;           // 0: left edge tracked, 1: right edge
};

//! Largest sample time T such that the support edge born at x0 stays within
//! cell_tol cells of x0 for all samples <= T.
inline WaitingTime waiting_time(const Trajectory& traj, double x0, double delta, int cell_tol) {
  if (cell_tol < 0) throw ParamError("waiting_time: cell_tol must be non-negative");
  const SupportTrace& tr = traj.trace_sum;
  if (tr.t.empty()) throw ParamError("waiting_time: empty trace");
  if (std::abs(delta - tr.delta) > 1e-12 * std::max(1.0, tr.delta))
    throw ParamError("waiting_time: trace was recorded at a different threshold");
  if (std::isnan(tr.left.front())) throw GeometryError("waiting_time: initially empty support");

  const double dx = traj.grid.dx;
  WaitingTime out;
  const double dl = std::abs(tr.left.front() - x0), dr = std::abs(tr.right.front() - x0);
  if (std::min(dl, dr) > dx + 1e-12)
    throw GeometryError("waiting_time: x0 is not an initial support edge");
  out.side = dl <= dr ? 0 : 1;

  const double tol = cell_tol * dx + 1e-12;
  for (std::size_t k = 0; k < tr.t.size(); ++k) {
    const double edge = out.side == 0 ? tr.left[k] : tr.right[k];
    if (std::isnan(edge) || std::abs(edge - x0) > tol) {
      out.t_wait = k == 0 ? 0.0 : tr.t[k - 1];
      return out;
    }
  }
  out.t_wait = tr.t.back();
  out.censored = true;
  return out;
}

struct CriterionScan {
  std::vector<double> r, Q;  // dyadic radii and Q(r) = r^-5 int [f0^2+R(f0+g0)^2]
  bool bounded = false;
  double finest_Q = 0.0;
  double growth_ratio = 0.0;  // Q at the two finest resolved levels
};

//! Dyadic scan of the waiting-time criterion at x0. A level is resolved when
//! it covers at least 8 cells per side; the verdict compares the two finest
//! resolved levels (halving r multiplies Q by 2^{4-2*alpha} near a power-law
//! contact, so a ratio below 2 separates alpha >= 2 from alpha < 2).
inline CriterionScan waiting_criterion(const FieldPair& s0, const PhysicalParams& params,
                                       const Grid& grid, double x0, double r_max, int levels) {
  if (!(r_max > 0.0)) throw ParamError("waiting_criterion: r_max must be positive");
  if (levels < 2) throw ParamError("waiting_criterion: need at least two levels");
  if (x0 - r_max < -grid.half_width || x0 + r_max > grid.half_width)
    throw GeometryError("waiting_criterion: scan window exceeds the domain");
  const double R = params.R;
  CriterionScan out;
  const double min_r = 8.0 * grid.dx;
  for (int j = 0; j < levels; ++j) {
    const double r = r_max * std::pow(2.0, -j);
    if (r < min_r) break;
    Accumulator acc;
    for (int i = 0; i < grid.n; ++i) {
      const double x = grid.centers[i];
      if (std::abs(x - x0) >= r) continue;
      const double f = s0.f[i], g = s0.g[i];
      acc.add(f * f + R * (f + g) * (f + g));
    }
    out.r.push_back(r);
    out.Q.push_back(acc.value() * grid.dx / std::pow(r, 5));
  }
  if (out.Q.size() < 2) throw ParamError("waiting_criterion: grid too coarse for two levels");
  const double qa = out.Q[out.Q.size() - 2], qb = out.Q.back();
  out.growth_ratio = qa > 0.0 ? qb / qa : 0.0;
  out.bounded = out.growth_ratio < 2.0;
  out.finest_Q = qb;
  return out;
}

}  // namespace thinfilm
