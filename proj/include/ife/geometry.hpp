#pragma once

#include "ife/core.hpp"

#include <algorithm>
#include <cmath>
#include <utility>
#include <vector>

namespace ife {

// Signed level-set description of the interface curve. level < 0 inside the
// minus subdomain, > 0 in the plus subdomain; the normal (from minus to plus)
// is the normalized gradient.
class interface_curve {
 public:
  virtual ~interface_curve() = default;

  virtual double level(const vec2& x) const = 0;

  // default: central finite differences with a fixed step
  virtual vec2 gradient(const vec2& x) const {
    const double s = fd_step();
    return vec2((level(vec2(x.x() + s, x.y())) - level(vec2(x.x() - s, x.y()))) / (2 * s),
                (level(vec2(x.x(), x.y() + s)) - level(vec2(x.x(), x.y() - s))) / (2 * s));
  }

  virtual double max_curvature() const = 0;

  // point on the curve between two on-curve points p0, p1 (shorter branch),
  // t in [0,1], arc_point(p0,p1,0) = p0 and arc_point(p0,p1,1) = p1.
  // default: pull the chord blend back onto the zero level set along the gradient
  virtual vec2 arc_point(const vec2& p0, const vec2& p1, double t) const {
    vec2 x = p0 + t * (p1 - p0);
    for (int it = 0; it < 60; ++it) {
      double f = level(x);
      if (std::abs(f) < 1e-15) break;
      vec2 g = gradient(x);
      double g2 = g.squaredNorm();
      if (g2 < 1e-30) throw geometry_error("singular level set while tracing arc");
      x -= (f / g2) * g;
    }
    return x;
  }

  // d/dt of arc_point; default: central finite differences in t
  virtual vec2 arc_velocity(const vec2& p0, const vec2& p1, double t) const {
    const double s = 1e-6;
    double a = std::max(0.0, t - s), b = std::min(1.0, t + s);
    return (arc_point(p0, p1, b) - arc_point(p0, p1, a)) / (b - a);
  }

  virtual double fd_step() const { return 1e-7; }
};

class circle_curve : public interface_curve {
 public:
  circle_curve(const vec2& center, double radius) : c_(center), r_(radius) {
    if (radius <= 0) throw config_error("circle radius must be positive");
  }

  double level(const vec2& x) const override { return (x - c_).norm() - r_; }

  vec2 gradient(const vec2& x) const override {
    vec2 d = x - c_;
    double n = d.norm();
    if (n < 1e-300) return vec2(0, 0);
    return d / n;
  }

  double max_curvature() const override { return 1.0 / r_; }

  vec2 arc_point(const vec2& p0, const vec2& p1, double t) const override {
    double th = theta(p0) + t * dtheta(p0, p1);
    return c_ + r_ * vec2(std::cos(th), std::sin(th));
  }

  vec2 arc_velocity(const vec2& p0, const vec2& p1, double t) const override {
    double dt = dtheta(p0, p1);
    double th = theta(p0) + t * dt;
    return r_ * dt * vec2(-std::sin(th), std::cos(th));
  }

  const vec2& center() const { return c_; }
  double radius() const { return r_; }

 private:
  double theta(const vec2& p) const { return std::atan2(p.y() - c_.y(), p.x() - c_.x()); }
  double dtheta(const vec2& p0, const vec2& p1) const {
    double d = theta(p1) - theta(p0);
    while (d > M_PI) d -= 2 * M_PI;
    while (d < -M_PI) d += 2 * M_PI;
    return d;
  }

  vec2 c_;
  double r_;
};

class ellipse_curve : public interface_curve {
 public:
  ellipse_curve(const vec2& center, double a, double b) : c_(center), a_(a), b_(b) {
    if (a <= 0 || b <= 0) throw config_error("ellipse semi-axes must be positive");
  }

  double level(const vec2& x) const override {
    double u = (x.x() - c_.x()) / a_, v = (x.y() - c_.y()) / b_;
    return std::sqrt(u * u + v * v) - 1.0;
  }

  vec2 gradient(const vec2& x) const override {
    double u = (x.x() - c_.x()) / a_, v = (x.y() - c_.y()) / b_;
    double n = std::sqrt(u * u + v * v);
    if (n < 1e-300) return vec2(0, 0);
    return vec2(u / (a_ * n), v / (b_ * n));
  }

  double max_curvature() const override { return std::max(a_ / (b_ * b_), b_ / (a_ * a_)); }

  vec2 arc_point(const vec2& p0, const vec2& p1, double t) const override {
    double th = theta(p0) + t * dtheta(p0, p1);
    return c_ + vec2(a_ * std::cos(th), b_ * std::sin(th));
  }

  vec2 arc_velocity(const vec2& p0, const vec2& p1, double t) const override {
    double dt = dtheta(p0, p1);
    double th = theta(p0) + t * dt;
    return dt * vec2(-a_ * std::sin(th), b_ * std::cos(th));
  }

 private:
  double theta(const vec2& p) const {
    return std::atan2((p.y() - c_.y()) / b_, (p.x() - c_.x()) / a_);
  }
  double dtheta(const vec2& p0, const vec2& p1) const {
    double d = theta(p1) - theta(p0);
    while (d > M_PI) d -= 2 * M_PI;
    while (d < -M_PI) d += 2 * M_PI;
    return d;
  }

  vec2 c_;
  double a_, b_;
};

// unit normal at an on-curve point, oriented minus -> plus
inline vec2 normal_at(const interface_curve& curve, const vec2& x) {
  vec2 g = curve.gradient(x);
  double n = g.norm();
  if (n < 1e-14) throw geometry_error("zero gradient: singular level set point");
  return g / n;
}

// The chord cut through an element: endpoints d, e on the curve, unit normal
// n_bar oriented minus -> plus, tangent t_bar = (n_bar.y, -n_bar.x) pointing
// from d to e. functional() vanishes exactly on the chord line.
struct cut_line {
  vec2 d, e;
  vec2 n_bar, t_bar;

  double functional(const vec2& x) const { return n_bar.dot(x - d); }
  double chord_length() const { return (e - d).norm(); }
  vec2 midpoint() const { return 0.5 * (d + e); }
};

inline cut_line make_cut_line(const interface_curve& curve, const vec2& d, const vec2& e) {
  vec2 ch = e - d;
  double len = ch.norm();
  if (len < 1e-300) throw geometry_error("degenerate chord (coincident cut points)");
  vec2 n(ch.y() / len, -ch.x() / len);
  if (n.dot(curve.gradient(0.5 * (d + e))) < 0) n = -n;
  cut_line cl;
  cl.n_bar = n;
  cl.t_bar = vec2(n.y(), -n.x());
  if (ch.dot(cl.t_bar) >= 0) {
    cl.d = d;
    cl.e = e;
  } else {
    cl.d = e;
    cl.e = d;
  }
  return cl;
}

inline vec2 foot_of_perpendicular(const vec2& x, const cut_line& line) {
  return x - line.functional(x) * line.n_bar;
}

struct edge_hit {
  double t;  // parameter along the segment, in [0,1]
  vec2 p;
};

// Intersections of the curve with segment a-b. Sign changes of the level are
// bracketed on a uniform scan and refined by bisection; more than two distinct
// crossings violate the one-curve-segment-per-edge mesh hypothesis.
inline std::vector<edge_hit> edge_intersections(const interface_curve& curve, const vec2& a,
                                                const vec2& b) {
  const int scan = 32;
  std::array<double, scan + 1> lv;
  for (int k = 0; k <= scan; ++k) lv[k] = curve.level(a + (double(k) / scan) * (b - a));

  std::vector<edge_hit> hits;
  auto push = [&](double t) {
    for (const auto& h : hits)
      if (std::abs(h.t - t) < 1e-10) return;
    hits.push_back({t, a + t * (b - a)});
  };

  for (int k = 0; k <= scan; ++k)
    if (lv[k] == 0.0) push(double(k) / scan);
  for (int k = 0; k < scan; ++k) {
    if (lv[k] == 0.0 || lv[k + 1] == 0.0) continue;
    if ((lv[k] > 0) == (lv[k + 1] > 0)) continue;
    double lo = double(k) / scan, hi = double(k + 1) / scan;
    double flo = lv[k];
    double mid = 0.5 * (lo + hi);
    // bisect to parameter exhaustion: crossings sit on the curve to roundoff,
    // which keeps the curved-quadrature chains gap-free
    for (int it = 0; it < 80; ++it) {
      mid = 0.5 * (lo + hi);
      if (mid == lo || mid == hi) break;
      double fm = curve.level(a + mid * (b - a));
      if (fm == 0.0) break;
      if ((fm > 0) == (flo > 0)) {
        lo = mid;
        flo = fm;
      } else {
        hi = mid;
      }
    }
    push(mid);
  }

  std::sort(hits.begin(), hits.end(), [](const edge_hit& x, const edge_hit& y) { return x.t < y.t; });
  if (hits.size() > 2)
    throw hypothesis_error("interface crosses one edge more than twice; refine the mesh");
  return hits;
}

// Coupling matrices relating the two one-sided gradients of a function that is
// continuous with continuous normal flux across an interface with unit normal
// n: grad_plus = M_minus * grad_minus and grad_minus = M_plus * grad_plus.
inline std::pair<mat2, mat2> jump_matrices(const vec2& n, double rho) {
  if (rho <= 0) throw config_error("contrast ratio must be positive");
  auto build = [&](double r) {
    mat2 m;
    m << n.y() * n.y() + r * n.x() * n.x(), (r - 1) * n.x() * n.y(),
        (r - 1) * n.x() * n.y(), n.x() * n.x() + r * n.y() * n.y();
    return m;
  };
  return {build(rho), build(1.0 / rho)};
}

inline vec2 gradient_jump_apply(const mat2& m, const vec2& g) { return m * g; }

// Coupling matrices for the chord-based jump conditions: tangential continuity
// along the chord direction t_bar and flux continuity in the direction nf.
// Built from the row systems [t_bar; beta^s * nf] with beta^- = rho, beta^+ = 1.
inline std::pair<mat2, mat2> line_jump_matrices(const vec2& n_bar, const vec2& nf, double rho) {
  if (rho <= 0) throw config_error("contrast ratio must be positive");
  if (n_bar.dot(nf) <= 0)
    throw geometry_error("chord normal and interface normal nearly opposite (degenerate cut)");
  vec2 t_bar(n_bar.y(), -n_bar.x());
  mat2 nm, np;
  nm << t_bar.x(), t_bar.y(), rho * nf.x(), rho * nf.y();
  np << t_bar.x(), t_bar.y(), nf.x(), nf.y();
  mat2 mbar_plus = nm.inverse() * np;
  mat2 mbar_minus = np.inverse() * nm;
  return {mbar_minus, mbar_plus};
}

// aggregate of all four coupling matrices for one cut configuration
struct jump_matrix_set {
  mat2 m_minus, m_plus, mbar_minus, mbar_plus;
  double rho;

  static jump_matrix_set build(const vec2& n_bar, const vec2& nf, double rho) {
    if (rho <= 0 || rho > 1) throw config_error("contrast ratio must lie in (0,1]");
    jump_matrix_set s;
    s.rho = rho;
    auto [mm, mp] = jump_matrices(nf, rho);
    s.m_minus = mm;
    s.m_plus = mp;
    auto [bm, bp] = line_jump_matrices(n_bar, nf, rho);
    s.mbar_minus = bm;
    s.mbar_plus = bp;
    return s;
  }
};

enum class flux_point_mode { tangent_parallel, midpoint_foot };

// Point F on the cut arc where the flux jump condition is imposed, with its
// interface normal. tangent_parallel: the arc point whose normal aligns with
// the chord normal. midpoint_foot: the arc point whose perpendicular foot on
// the chord is the chord midpoint.
inline std::pair<vec2, vec2> find_flux_point(const interface_curve& curve, const cut_line& cut,
                                             flux_point_mode mode) {
  const int scan = 64;
  vec2 mid = cut.midpoint();
  double hscale = std::max(cut.chord_length(), 1e-30);

  auto w = [&](double t) {
    vec2 g = curve.arc_point(cut.d, cut.e, t);
    if (mode == flux_point_mode::tangent_parallel) return normal_at(curve, g).dot(cut.t_bar);
    return (g - mid).dot(cut.t_bar) / hscale;
  };

  std::array<double, scan + 1> wv;
  double wmax = 0;
  for (int k = 0; k <= scan; ++k) {
    wv[k] = w(double(k) / scan);
    wmax = std::max(wmax, std::abs(wv[k]));
  }
  if (wmax < 1e-13) {  // straight interface: every arc point qualifies
    vec2 f = curve.arc_point(cut.d, cut.e, 0.5);
    return {f, normal_at(curve, f)};
  }

  for (int k = 0; k <= scan; ++k) {
    if (wv[k] == 0.0) {
      vec2 f = curve.arc_point(cut.d, cut.e, double(k) / scan);
      return {f, normal_at(curve, f)};
    }
  }
  for (int k = 0; k < scan; ++k) {
    if ((wv[k] > 0) == (wv[k + 1] > 0)) continue;
    double lo = double(k) / scan, hi = double(k + 1) / scan, flo = wv[k];
    double mt = lo;
    for (int it = 0; it < 80; ++it) {
      mt = 0.5 * (lo + hi);
      double fm = w(mt);
      if (std::abs(fm) <= 1e-14) break;
      if ((fm > 0) == (flo > 0)) {
        lo = mt;
        flo = fm;
      } else {
        hi = mt;
      }
    }
    vec2 f = curve.arc_point(cut.d, cut.e, mt);
    return {f, normal_at(curve, f)};
  }
  throw geometry_error("flux point search failed to bracket a root on the arc");
}

}  // namespace ife
