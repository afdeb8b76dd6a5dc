#pragma once

//! Initial-datum constructors: box, smooth bump, power-law contact profile,
//! gap-flanking bump pair, raw samples. Profiles are sampled at cell
//! midpoints (second-order cell averages).

#include <cmath>
#include <utility>
#include <vector>

#include "thinfilm/errors.hpp"
#include "thinfilm/field.hpp"
#include "thinfilm/grid.hpp"
#include "thinfilm/helmholtz.hpp"

namespace thinfilm {

struct InitialDatumSpec {
  enum class Kind { zero, box, bump, power_contact, two_bump, samples };
  Kind kind = Kind::zero;

  // box / bump
  double center = 0.0;
  double half_width = 0.0;
  double height = 0.0;

  // power_contact: h*((x-x0)/scale)_+^alpha rising to h at x0+side*scale,
  // then a plateau of the given width, then cut to zero.
  double x0 = 0.0;
  double alpha = 0.0;
  double scale = 1.0;
  double plateau = 0.0;
  int side = +1;  // +1: support to the right of x0, -1: to the left

  // two_bump: bumps on [a-r0-width, a-r0] and [a+r0, a+r0+width]
  double gap_center = 0.0;
  double gap_radius = 0.0;
  double width = 0.0;

  std::vector<double> samples;
};

namespace detail {

// quartic bump h*(1-s^2)^2, support |s|<1; C^1 contact at the edges
inline double bump_profile(double x, double c, double hw, double h) {
  double s = (x - c) / hw;
  double q = 1.0 - s * s;
  return q > 0.0 ? h * q * q : 0.0;
}

}  // namespace detail

inline Field make_initial_field(const InitialDatumSpec& spec, const Grid& grid) {
  using Kind = InitialDatumSpec::Kind;
  const double L = grid.half_width;
  Field u(grid.n, 0.0);

  auto check_inside = [&](double lo, double hi) {
    if (!(lo >= -L) || !(hi <= L)) throw GeometryError("initial support exceeds the domain");
    if (!(lo <= hi)) throw GeometryError("initial support interval is empty");
  };

  switch (spec.kind) {
    case Kind::zero:
      break;

    case Kind::box: {
      if (spec.height < 0.0) throw ParamError("box height must be non-negative");
      if (!(spec.half_width > 0.0)) throw ParamError("box half-width must be positive");
      check_inside(spec.center - spec.half_width, spec.center + spec.half_width);
      for (int i = 0; i < grid.n; ++i)
        u[i] = std::abs(grid.centers[i] - spec.center) <= spec.half_width ? spec.height : 0.0;
      break;
    }

    case Kind::bump: {
      if (spec.height < 0.0) throw ParamError("bump height must be non-negative");
      if (!(spec.half_width > 0.0)) throw ParamError("bump half-width must be positive");
      check_inside(spec.center - spec.half_width, spec.center + spec.half_width);
      for (int i = 0; i < grid.n; ++i)
        u[i] = detail::bump_profile(grid.centers[i], spec.center, spec.half_width, spec.height);
      break;
    }

    case Kind::power_contact: {
      if (spec.height < 0.0) throw ParamError("contact height must be non-negative");
      if (!(spec.alpha > 0.0)) throw ParamError("contact exponent must be positive");
      if (!(spec.scale > 0.0)) throw ParamError("contact scale must be positive");
      if (spec.plateau < 0.0) throw ParamError("plateau width must be non-negative");
      if (spec.side != +1 && spec.side != -1) throw ParamError("contact side must be +1 or -1");
      const double extent = spec.scale + spec.plateau;
      if (spec.side > 0)
        check_inside(spec.x0, spec.x0 + extent);
      else
        check_inside(spec.x0 - extent, spec.x0);
      for (int i = 0; i < grid.n; ++i) {
        double s = spec.side * (grid.centers[i] - spec.x0);  // distance into the support
        if (s <= 0.0 || s > extent) continue;
        u[i] = s < spec.scale ? spec.height * std::pow(s / spec.scale, spec.alpha) : spec.height;
      }
      break;
    }

    case Kind::two_bump: {
      if (spec.height < 0.0) throw ParamError("bump height must be non-negative");
      if (!(spec.gap_radius > 0.0)) throw ParamError("gap radius must be positive");
      if (!(spec.width > 0.0)) throw ParamError("bump width must be positive");
      const double a = spec.gap_center, r0 = spec.gap_radius, w = spec.width;
      check_inside(a - r0 - w, a + r0 + w);
      for (int i = 0; i < grid.n; ++i) {
        double x = grid.centers[i];
        u[i] = detail::bump_profile(x, a - r0 - 0.5 * w, 0.5 * w, spec.height) +
               detail::bump_profile(x, a + r0 + 0.5 * w, 0.5 * w, spec.height);
      }
      break;
    }

    case Kind::samples: {
      if (static_cast<int>(spec.samples.size()) != grid.n)
        throw ParamError("sample count does not match the grid");
      u = spec.samples;
      break;
    }
  }

  require_admissible(u, grid, "initial datum");
  return u;
}

//! Regularized initial data: f -> R_eps[f] + eps componentwise. Output is
//! bounded below by eps and the mass grows by exactly eps*2L up to round-off.
inline FieldPair regularize_initial_datum(const FieldPair& raw, const PhysicalParams& params,
                                          const Grid& grid) {
  validate(params);
  if (!(params.eps > 0.0))
    throw ParamError("regularize_initial_datum requires eps > 0; the floor is the point");
  require_admissible(raw, grid);
  HelmholtzWorkspace ws = build_helmholtz_workspace(grid, params.eps);
  FieldPair out;
  out.f = helmholtz_inverse(raw.f, params, ws);
  out.g = helmholtz_inverse(raw.g, params, ws);
  for (double& v : out.f) v += params.eps;
  for (double& v : out.g) v += params.eps;
  return out;
}

}  // namespace thinfilm
