#pragma once

//! Scalar and weighted functionals of a state: masses, energy, entropy,
//! regularized energy, weighted second moment, the auxiliary function
//! w = [f^2 + R(f+g)^2]^{3/4} with its gradient, and the dissipation
//! integrands entering the balance laws.

#include <algorithm>
#include <cmath>
#include <vector>

#include "thinfilm/errors.hpp"
#include "thinfilm/field.hpp"
#include "thinfilm/grid.hpp"
#include "thinfilm/helmholtz.hpp"

namespace thinfilm {

struct LedgerRow {
  double t = 0.0;
  double mass_f = 0.0, mass_g = 0.0;
  double energy = 0.0;      // E = 1/2 int f^2 + R(f+g)^2
  double entropy = 0.0;     // H = int f ln f + (R/R_mu) g ln g
  double energy_eps = 0.0;  // regularized energy (equals E when eps = 0)
  double m2 = 0.0;          // int (f + (R/R_mu) g) x^2
  double m2_half = 0.0;     // same restricted to |x| <= L/2
  double d_energy = 0.0;    // cumulative energy dissipation
  double d_entropy = 0.0;   // cumulative entropy dissipation
};

namespace detail {

// 0*ln 0 := 0; values below 1e-300 are treated as 0
inline double xlogx(double v) { return v > 1e-300 ? v * std::log(v) : 0.0; }

//! Centered differences with Neumann mirroring; cells bordering the support
//! edge use one-sided differences into the support so that the cut-off
//! convention for the w-gradient is not polluted by values across the edge.
//! The mask marks cells with f+g > 0.
inline void edge_aware_gradient(const Field& u, const std::vector<char>& mask, double dx,
                                Field& du) {
  const int n = static_cast<int>(u.size());
  du.resize(n);
  for (int i = 0; i < n; ++i) {
    if (!mask[i]) {
      du[i] = 0.0;
      continue;
    }
    const bool left_ok = i > 0 && mask[i - 1];
    const bool right_ok = i < n - 1 && mask[i + 1];
    if (left_ok && right_ok)
      du[i] = (u[i + 1] - u[i - 1]) / (2.0 * dx);
    else if (right_ok)
      du[i] = (u[i + 1] - u[i]) / dx;
    else if (left_ok)
      du[i] = (u[i] - u[i - 1]) / dx;
    else
      du[i] = 0.0;
  }
  // domain boundaries inside the support: mirror ghost reduces the centered
  // stencil to a half-slope
  if (mask[0] && n > 1 && mask[1]) du[0] = (u[1] - u[0]) / (2.0 * dx);
  if (mask[n - 1] && n > 1 && mask[n - 2]) du[n - 1] = (u[n - 1] - u[n - 2]) / (2.0 * dx);
}

inline std::vector<char> support_mask(const FieldPair& s) {
  const int n = static_cast<int>(s.f.size());
  std::vector<char> mask(n);
  for (int i = 0; i < n; ++i) mask[i] = (s.f[i] + s.g[i] > 0.0) ? 1 : 0;
  return mask;
}

}  // namespace detail

//! One ledger row (without time and the cumulative dissipation columns).
//! The workspace is only consulted when params.eps > 0.
inline LedgerRow global_functionals(const FieldPair& s, const PhysicalParams& params,
                                    const Grid& grid, const HelmholtzWorkspace* ws = nullptr) {
  require_admissible(s, grid);
  const double R = params.R, rmu = params.R_mu;
  LedgerRow row;
  row.mass_f = mass(s.f, grid);
  row.mass_g = mass(s.g, grid);

  Accumulator e, h, m2, m2_half;
  const double half = 0.5 * grid.half_width;
  for (int i = 0; i < grid.n; ++i) {
    const double f = s.f[i], g = s.g[i], x = grid.centers[i];
    e.add(f * f + R * (f + g) * (f + g));
    h.add(detail::xlogx(f) + (R / rmu) * detail::xlogx(g));
    const double mom = (f + (R / rmu) * g) * x * x;
    m2.add(mom);
    if (std::abs(x) <= half) m2_half.add(mom);
  }
  row.energy = 0.5 * e.value() * grid.dx;
  row.entropy = h.value() * grid.dx;
  row.m2 = m2.value() * grid.dx;
  row.m2_half = m2_half.value() * grid.dx;

  if (params.eps > 0.0) {
    if (ws == nullptr) throw ParamError("global_functionals: regularized energy needs a workspace");
    Field F = helmholtz_inverse(s.f, params, *ws);
    Field G = helmholtz_inverse(s.g, params, *ws);
    Accumulator ee;
    for (int i = 0; i < grid.n; ++i) {
      const double f = s.f[i], g = s.g[i];
      ee.add((1.0 + R) * f * f + R * g * g + R * (F[i] * g + G[i] * f));
    }
    row.energy_eps = 0.5 * ee.value() * grid.dx;
  } else {
    row.energy_eps = row.energy;
  }
  return row;
}

struct WAndGradient {
  Field w;   // [f^2 + R(f+g)^2]^{3/4}
  Field dw;  // chain-rule derivative, 0 where w = 0
};

//! Also used by the local-energy machinery: the estimates bound the slope
//! quotient (f A + R g B)/(f^2+R(f+g)^2)^{1/4}, which is 2/3 of dw.
struct WSlopeData {
  Field w;
  Field quotient;  // (2/3) * dw
  Field A;         // (1+R) df + R dg
  Field B;         // df + dg
  Field df, dg;
};

inline WSlopeData w_slope_data(const FieldPair& s, const PhysicalParams& params,
                               const Grid& grid) {
  require_admissible(s, grid);
  const double R = params.R;
  const int n = grid.n;
  WSlopeData out;
  auto mask = detail::support_mask(s);
  detail::edge_aware_gradient(s.f, mask, grid.dx, out.df);
  detail::edge_aware_gradient(s.g, mask, grid.dx, out.dg);
  out.w.resize(n);
  out.quotient.resize(n);
  out.A.resize(n);
  out.B.resize(n);
  for (int i = 0; i < n; ++i) {
    const double f = s.f[i], g = s.g[i];
    const double m = f * f + R * (f + g) * (f + g);
    out.w[i] = std::pow(m, 0.75);
    out.A[i] = (1.0 + R) * out.df[i] + R * out.dg[i];
    out.B[i] = out.df[i] + out.dg[i];
    out.quotient[i] = m > 0.0 ? (f * out.A[i] + R * g * out.B[i]) / std::pow(m, 0.25) : 0.0;
  }
  return out;
}

inline WAndGradient w_and_gradient(const FieldPair& s, const PhysicalParams& params,
                                   const Grid& grid) {
  WSlopeData d = w_slope_data(s, params, grid);
  WAndGradient out;
  out.w = std::move(d.w);
  out.dw.resize(grid.n);
  for (int i = 0; i < grid.n; ++i) out.dw[i] = 1.5 * d.quotient[i];
  return out;
}

struct DissipationRate {
  double energy_rate = 0.0;   // int U^2 + R R_mu V^2
  double entropy_rate = 0.0;  // (R/(1+2R)) int |df|^2 + R |d(f+g)|^2
  Field U, V;
};

inline DissipationRate dissipation_rate(const FieldPair& s, const PhysicalParams& params,
                                        const Grid& grid) {
  WSlopeData d = w_slope_data(s, params, grid);
  const double R = params.R, rmu = params.R_mu;
  const int n = grid.n;
  DissipationRate out;
  out.U.resize(n);
  out.V.resize(n);
  Accumulator e, h;
  for (int i = 0; i < n; ++i) {
    out.U[i] = std::sqrt(s.f[i]) * d.A[i];
    out.V[i] = std::sqrt(s.g[i]) * d.B[i];
    e.add(out.U[i] * out.U[i] + R * rmu * out.V[i] * out.V[i]);
    h.add(d.df[i] * d.df[i] + R * d.B[i] * d.B[i]);
  }
  out.energy_rate = e.value() * grid.dx;
  out.entropy_rate = (R / (1.0 + 2.0 * R)) * h.value() * grid.dx;
  return out;
}

//! Constants of the w-form local energy estimate, derived from the two
//! pointwise bounds in its proof.
struct WLBConstants {
  double C1, C2;
};

inline WLBConstants wlb_constants(const PhysicalParams& params) {
  const double R = params.R, rmu = params.R_mu;
  WLBConstants c;
  c.C1 = 1.0 / (2.0 * std::max(1.0, std::sqrt(R) / rmu));
  c.C2 = 8.0 * std::max(rmu / std::sqrt(R), std::sqrt(1.0 + R));
  return c;
}

struct StarCheck {
  bool pass = false;
  double lhs = 0.0;  // ||v||_{4/3}
  double rhs = 0.0;  // 4 ||v||_2^{6/7} I_r^{3/28}
};

//! Interpolation inequality with explicit constant 4 for a function sampled
//! at the midpoints of a uniform partition of (-r, r).
inline StarCheck star_inequality_check(const std::vector<double>& v, double r,
                                       double slack = 1.01) {
  if (!(r > 0.0)) throw ParamError("star_inequality_check: r must be positive");
  if (v.empty()) throw ParamError("star_inequality_check: empty sample");
  if (!all_finite(v)) throw ParamError("star_inequality_check: non-finite sample");
  const int m = static_cast<int>(v.size());
  const double dx = 2.0 * r / m;
  Accumulator p43, p2, ir;
  for (int i = 0; i < m; ++i) {
    const double x = -r + (i + 0.5) * dx;
    const double a = std::abs(v[i]);
    const double a43 = std::pow(a, 4.0 / 3.0);
    p43.add(a43);
    p2.add(a * a);
    const double hat = r - std::abs(x);
    ir.add(hat > 0.0 ? hat * hat * a43 : 0.0);
  }
  StarCheck out;
  out.lhs = std::pow(p43.value() * dx, 0.75);
  const double norm2 = std::sqrt(p2.value() * dx);
  out.rhs = 4.0 * std::pow(norm2, 6.0 / 7.0) * std::pow(ir.value() * dx, 3.0 / 28.0);
  out.pass = out.lhs <= out.rhs * slack + 1e-300;
  return out;
}

//! Cut-off weights for the local energy ledgers: the constant weight and the
//! hat (r - |x-a|)_+.
struct Weight {
  enum class Kind { unit, hat };
  Kind kind = Kind::unit;
  double a = 0.0, r = 0.0;

  double zeta(double x) const {
    if (kind == Kind::unit) return 1.0;
    const double h = r - std::abs(x - a);
    return h > 0.0 ? h : 0.0;
  }
  double dzeta(double x) const {
    if (kind == Kind::unit) return 0.0;
    if (std::abs(x - a) >= r || x == a) return 0.0;
    return x > a ? -1.0 : 1.0;
  }
};

inline Weight unit_weight() { return Weight{}; }

inline Weight hat_weight(double a, double r) {
  if (!(r > 0.0)) throw ParamError("hat weight radius must be positive");
  Weight w;
  w.kind = Weight::Kind::hat;
  w.a = a;
  w.r = r;
  return w;
}

}  // namespace thinfilm
