#pragma once

//! The smoothing operator (1 - eps^2 d_xx)^{-1} with homogeneous Neumann
//! conditions, discretized with mirror ghost cells. The resulting
//! tridiagonal matrix is symmetric, strictly diagonally dominant, an
//! M-matrix, and has unit row and column sums, so the inverse preserves
//! constants, mass, non-negativity, and the discrete maximum principle.

#include <cmath>
#include <vector>

#include "thinfilm/errors.hpp"
#include "thinfilm/grid.hpp"

namespace thinfilm {

struct HelmholtzWorkspace {
  int n = 0;
  double dx = 0.0;
  double eps = 0.0;

  // bands of I - eps^2 D^2_N (lower/upper constant, kept per row for clarity)
  std::vector<double> lower, diag, upper;
  // cached Thomas factorization
  std::vector<double> pivot_inv, upper_fac;
  // scratch for solves and one refinement pass
  mutable std::vector<double> y, resid;
};

inline HelmholtzWorkspace build_helmholtz_workspace(const Grid& grid, double eps) {
  if (!(eps >= 0.0) || !std::isfinite(eps)) throw ParamError("eps must be non-negative");
  HelmholtzWorkspace ws;
  ws.n = grid.n;
  ws.dx = grid.dx;
  ws.eps = eps;
  const int n = grid.n;
  const double a = eps * eps / (grid.dx * grid.dx);
  ws.lower.assign(n, -a);
  ws.upper.assign(n, -a);
  ws.diag.assign(n, 1.0 + 2.0 * a);
  ws.diag[0] = ws.diag[n - 1] = 1.0 + a;  // mirror ghost: row sums stay 1
  ws.lower[0] = 0.0;
  ws.upper[n - 1] = 0.0;

  ws.pivot_inv.resize(n);
  ws.upper_fac.resize(n);
  double m = ws.diag[0];
  ws.pivot_inv[0] = 1.0 / m;
  ws.upper_fac[0] = ws.upper[0] / m;
  for (int i = 1; i < n; ++i) {
    m = ws.diag[i] - ws.lower[i] * ws.upper_fac[i - 1];
    ws.pivot_inv[i] = 1.0 / m;
    ws.upper_fac[i] = ws.upper[i] / m;
  }
  ws.y.resize(n);
  ws.resid.resize(n);
  return ws;
}

//! y = (I - eps^2 D^2_N) x, for residual checks.
inline std::vector<double> apply_helmholtz_operator(const std::vector<double>& x,
                                                    const HelmholtzWorkspace& ws) {
  const int n = ws.n;
  std::vector<double> y(n);
  for (int i = 0; i < n; ++i) {
    double v = ws.diag[i] * x[i];
    if (i > 0) v += ws.lower[i] * x[i - 1];
    if (i < n - 1) v += ws.upper[i] * x[i + 1];
    y[i] = v;
  }
  return y;
}

namespace detail {

inline void thomas_solve(const HelmholtzWorkspace& ws, const double* b, double* x) {
  const int n = ws.n;
  ws.y[0] = b[0] * ws.pivot_inv[0];
  for (int i = 1; i < n; ++i) ws.y[i] = (b[i] - ws.lower[i] * ws.y[i - 1]) * ws.pivot_inv[i];
  x[n - 1] = ws.y[n - 1];
  for (int i = n - 2; i >= 0; --i) x[i] = ws.y[i] - ws.upper_fac[i] * x[i + 1];
}

}  // namespace detail

//! Solves (I - eps^2 D^2_N) F = u. One iterative-refinement pass keeps the
//! residual at round-off even when eps^2/dx^2 is large.
inline std::vector<double> helmholtz_inverse(const std::vector<double>& u,
                                             const PhysicalParams& params,
                                             const HelmholtzWorkspace& ws) {
  if (static_cast<int>(u.size()) != ws.n)
    throw ParamError("helmholtz_inverse: field size does not match the workspace");
  if (params.eps != ws.eps)
    throw ParamError("helmholtz_inverse: workspace was built for a different eps");
  if (ws.eps == 0.0) return u;  // identity operator

  const int n = ws.n;
  std::vector<double> F(n);
  detail::thomas_solve(ws, u.data(), F.data());

  // refinement: solve A d = u - A F and correct
  for (int i = 0; i < n; ++i) {
    double v = ws.diag[i] * F[i];
    if (i > 0) v += ws.lower[i] * F[i - 1];
    if (i < n - 1) v += ws.upper[i] * F[i + 1];
    ws.resid[i] = u[i] - v;
  }
  std::vector<double> d(n);
  detail::thomas_solve(ws, ws.resid.data(), d.data());
  for (int i = 0; i < n; ++i) F[i] += d[i];
  return F;
}

}  // namespace thinfilm
