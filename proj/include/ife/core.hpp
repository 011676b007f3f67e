#pragma once

#include <Eigen/Dense>

#include <array>
#include <cmath>
#include <limits>
#include <stdexcept>
#include <string>

namespace ife {

using vec2 = Eigen::Vector2d;
using mat2 = Eigen::Matrix2d;

// configuration-stage failure (bad parameters, violated preconditions)
struct config_error : std::runtime_error {
  explicit config_error(const std::string& msg) : std::runtime_error(msg) {}
};

// the interface geometry violates a mesh hypothesis (refine the mesh)
struct hypothesis_error : std::runtime_error {
  explicit hypothesis_error(const std::string& msg) : std::runtime_error(msg) {}
};

// geometric computation failed (degenerate normal, bracketing failure, ...)
struct geometry_error : std::runtime_error {
  explicit geometry_error(const std::string& msg) : std::runtime_error(msg) {}
};

// the rank-one coupling system is numerically singular
struct unisolvence_error : std::runtime_error {
  double denom;
  explicit unisolvence_error(double d)
      : std::runtime_error("unisolvence margin too small: |1 + mu*gamma.delta| = " +
                           std::to_string(std::abs(d))),
        denom(d) {}
};

// iterative solver exhausted its iteration budget
struct convergence_error : std::runtime_error {
  double residual;
  int iterations;
  convergence_error(double r, int it)
      : std::runtime_error("cg failed to converge: residual " + std::to_string(r) +
                           " after " + std::to_string(it) + " iterations"),
        residual(r), iterations(it) {}
};

// assembly produced an inconsistent system (e.g. asymmetry in the symmetric scheme)
struct solver_error : std::runtime_error {
  explicit solver_error(const std::string& msg) : std::runtime_error(msg) {}
};

enum class element_side : int { minus = -1, plus = +1 };

inline element_side opposite(element_side s) {
  return s == element_side::minus ? element_side::plus : element_side::minus;
}

// corners of one mesh element, counterclockwise; n = 3 or 4
struct element_geometry {
  std::array<vec2, 4> v{};
  int n = 4;

  vec2 centroid() const {
    vec2 c = vec2::Zero();
    for (int i = 0; i < n; ++i) c += v[i];
    return c / n;
  }
  void bbox(vec2& lo, vec2& hi) const {
    lo = hi = v[0];
    for (int i = 1; i < n; ++i) {
      lo = lo.cwiseMin(v[i]);
      hi = hi.cwiseMax(v[i]);
    }
  }
  double area() const {
    double a = 0;
    for (int i = 0; i < n; ++i) {
      const vec2& p = v[i];
      const vec2& q = v[(i + 1) % n];
      a += p.x() * q.y() - q.x() * p.y();
    }
    return 0.5 * a;
  }
};

inline double cross2(const vec2& a, const vec2& b) { return a.x() * b.y() - a.y() * b.x(); }

constexpr double infinity() { return std::numeric_limits<double>::infinity(); }

}  // namespace ife
