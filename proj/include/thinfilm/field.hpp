#pragma once

//! Discrete layer thicknesses: cell averages of f and g.

#include <cmath>
#include <string>
#include <vector>

#include "thinfilm/errors.hpp"
#include "thinfilm/grid.hpp"
#include "thinfilm/numeric.hpp"

namespace thinfilm {

using Field = std::vector<double>;

struct FieldPair {
  Field f, g;
};

inline double mass(const Field& u, const Grid& grid) {
  return compensated_sum(u) * grid.dx;
}

inline double second_moment(const Field& u, const Grid& grid) {
  Accumulator acc;
  for (int i = 0; i < grid.n; ++i) acc.add(u[i] * grid.centers[i] * grid.centers[i]);
  return acc.value() * grid.dx;
}

inline double squared_l2(const Field& u, const Grid& grid) {
  Accumulator acc;
  for (double x : u) acc.add(x * x);
  return acc.value() * grid.dx;
}

//! Membership in the admissible cone restricted to the grid: entries finite
//! and non-negative (finiteness of mass/moments is automatic on a finite grid).
inline bool is_admissible(const Field& u) {
  for (double x : u)
    if (!std::isfinite(x) || x < 0.0) return false;
  return true;
}

inline void require_admissible(const Field& u, const Grid& grid, const std::string& name) {
  if (static_cast<int>(u.size()) != grid.n)
    throw ParamError(name + ": size does not match the grid");
  if (!is_admissible(u)) throw AdmissibilityError(name + ": negative or non-finite entry");
}

inline void require_admissible(const FieldPair& s, const Grid& grid) {
  require_admissible(s.f, grid, "f");
  require_admissible(s.g, grid, "g");
}

}  // namespace thinfilm
