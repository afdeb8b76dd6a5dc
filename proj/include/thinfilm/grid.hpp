#pragma once

//! Uniform cell-centered grid on (-L, L).

#include <cmath>
#include <vector>

#include "thinfilm/errors.hpp"

namespace thinfilm {

struct Grid {
  double half_width = 0.0;       // L
  int n = 0;                     // cell count, even, >= 4
  double dx = 0.0;               // 2L/n
  std::vector<double> centers;   // x_i = -L + (i+1/2) dx
};

//! n must be even so that no cell center sits on x = 0 and the center
//! coordinates come out exactly antisymmetric.
inline Grid build_grid(double L, int n) {
  if (!(L > 0.0) || !std::isfinite(L)) throw ParamError("grid half-width must be positive");
  if (n < 4) throw ParamError("grid needs at least 4 cells");
  if (n % 2 != 0) throw ParamError("grid cell count must be even");
  Grid g;
  g.half_width = L;
  g.n = n;
  g.dx = 2.0 * L / n;
  g.centers.resize(n);
  for (int i = 0; i < n; ++i) g.centers[i] = (i + 0.5 - 0.5 * n) * g.dx;
  return g;
}

struct PhysicalParams {
  double R = 1.0;     // density ratio
  double R_mu = 1.0;  // mobility ratio
  double eps = 0.0;   // regularization parameter; 0 selects the limit system
};

inline void validate(const PhysicalParams& p) {
  if (!(p.R > 0.0) || !std::isfinite(p.R)) throw ParamError("R must be positive");
  if (!(p.R_mu > 0.0) || !std::isfinite(p.R_mu)) throw ParamError("R_mu must be positive");
  if (!(p.eps >= 0.0) || !std::isfinite(p.eps)) throw ParamError("eps must be non-negative");
  if (p.eps > 0.0 && !(p.eps < 1.0)) throw ParamError("eps must lie in (0,1)");
}

}  // namespace thinfilm
