#pragma once

#include "ife/core.hpp"
#include "ife/geometry.hpp"

#include <cmath>
#include <numbers>

namespace ife {

// manufactured radial solution on a circular interface:
//   u = r^5 / beta inside, shifted to be continuous across r = r0,
//   so that -div(beta grad u) = -25 r^3 on both sides and the flux is continuous
struct radial_benchmark {
  double beta_minus = 1.0;
  double beta_plus = 1.0;
  double r0 = std::numbers::pi / 6.28;
  vec2 center{0.0, 0.0};

  circle_curve curve() const { return circle_curve(center, r0); }

  double u_minus(const vec2& x) const { return std::pow((x - center).norm(), 5) / beta_minus; }
  double u_plus(const vec2& x) const {
    return std::pow((x - center).norm(), 5) / beta_plus +
           (1.0 / beta_minus - 1.0 / beta_plus) * std::pow(r0, 5);
  }
  vec2 grad_minus(const vec2& x) const {
    return vec2(5.0 * std::pow((x - center).norm(), 3) / beta_minus * (x - center));
  }
  vec2 grad_plus(const vec2& x) const {
    return vec2(5.0 * std::pow((x - center).norm(), 3) / beta_plus * (x - center));
  }

  double rhs(const vec2& x) const { return -25.0 * std::pow((x - center).norm(), 3); }

  // boundary data (the outer boundary lies in the plus subdomain)
  double dirichlet(const vec2& x) const { return u_plus(x); }

  double exact(const vec2& x) const {
    return (x - center).norm() <= r0 ? u_minus(x) : u_plus(x);
  }
};

}  // namespace ife
