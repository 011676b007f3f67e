#pragma once

#include "ife/core.hpp"

#include <map>
#include <vector>

namespace ife {

// Gauss-Legendre rule on [-1,1]
struct quad_rule1d {
  std::vector<double> x, w;
  int size() const { return int(x.size()); }
};

namespace detail {

// value and derivative of the degree-n Legendre polynomial by recurrence
inline std::pair<double, double> legendre(int n, double x) {
  double p0 = 1.0, p1 = x;
  if (n == 0) return {1.0, 0.0};
  for (int k = 2; k <= n; ++k) {
    double p2 = ((2 * k - 1) * x * p1 - (k - 1) * p0) / k;
    p0 = p1;
    p1 = p2;
  }
  double dp = n * (x * p1 - p0) / (x * x - 1.0);
  return {p1, dp};
}

inline quad_rule1d make_gauss(int n) {
  quad_rule1d r;
  r.x.resize(n);
  r.w.resize(n);
  for (int i = 0; i < n; ++i) {
    // roots are computed programmatically (never transcribed) and polished by Newton
    double x = std::cos(M_PI * (i + 0.75) / (n + 0.5));
    for (int it = 0; it < 100; ++it) {
      auto [p, dp] = legendre(n, x);
      double dx = p / dp;
      x -= dx;
      if (std::abs(dx) < 1e-16) break;
    }
    auto [p, dp] = legendre(n, x);
    (void)p;
    r.x[i] = x;
    r.w[i] = 2.0 / ((1.0 - x * x) * dp * dp);
  }
  // enforce symmetry exactly
  for (int i = 0; i < n / 2; ++i) {
    int j = n - 1 - i;
    double xm = 0.5 * (r.x[j] - r.x[i]);
    r.x[i] = -xm;
    r.x[j] = xm;
    double wm = 0.5 * (r.w[i] + r.w[j]);
    r.w[i] = r.w[j] = wm;
  }
  if (n % 2 == 1) r.x[n / 2] = 0.0;
  return r;
}

}  // namespace detail

inline const quad_rule1d& gauss_legendre(int n) {
  if (n < 1 || n > 30) throw config_error("gauss rule order out of range [1,30]");
  static const std::map<int, quad_rule1d> cache = [] {
    std::map<int, quad_rule1d> m;
    for (int k = 1; k <= 30; ++k) m[k] = detail::make_gauss(k);
    return m;
  }();
  return cache.at(n);
}

// rule on [0,1]
inline quad_rule1d gauss_legendre01(int n) {
  quad_rule1d r = gauss_legendre(n);
  for (auto& x : r.x) x = 0.5 * (x + 1.0);
  for (auto& w : r.w) w *= 0.5;
  return r;
}

}  // namespace ife
