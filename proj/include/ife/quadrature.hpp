#pragma once

#include "ife/core.hpp"
#include "ife/gauss.hpp"
#include "ife/geometry.hpp"
#include "ife/mesh.hpp"

#include <functional>
#include <utility>
#include <vector>

namespace ife {

// one boundary side of a curved triangle: straight segment or interface arc
struct curved_side {
  vec2 p0, p1;
  const interface_curve* curve = nullptr;

  vec2 at(double t) const { return curve ? curve->arc_point(p0, p1, t) : vec2(p0 + t * (p1 - p0)); }
  vec2 vel(double t) const { return curve ? curve->arc_velocity(p0, p1, t) : vec2(p1 - p0); }
};

// radial blend from the apex onto the (possibly curved) opposite side:
// X(u,t) = apex + u * (side(t) - apex), detJ = u * cross(side(t) - apex, side'(t));
// the sweep is signed, so fans may mix orientations and still add up exactly
struct curved_triangle {
  vec2 apex;
  curved_side side;
};

template <class F>
double integrate(const curved_triangle& tri, F&& f, int degree) {
  const quad_rule1d ru = gauss_legendre01(degree);
  const quad_rule1d rt = gauss_legendre01(degree);
  double acc = 0;
  int orient = 0;
  for (int it = 0; it < rt.size(); ++it) {
    const double t = rt.x[it];
    const vec2 g = tri.side.at(t);
    const vec2 gv = tri.side.vel(t);
    const double base = cross2(g - tri.apex, gv);
    if (tri.side.curve) {
      // a sign change along the arc means the apex sees part of it edge-on,
      // so the sweep would double-cover; straight sides are exact either way
      const int s = base > 0 ? 1 : base < 0 ? -1 : 0;
      if (s == 0 || (orient != 0 && s != orient))
        throw geometry_error("folded sweep over a curved side");
      orient = s;
    }
    for (int iu = 0; iu < ru.size(); ++iu) {
      const double u = ru.x[iu];
      acc += ru.w[iu] * rt.w[it] * u * base * f(vec2(tri.apex + u * (g - tri.apex)));
    }
  }
  return acc;
}

// one side of a cut element: straight chain (crossing, corners..., crossing)
// closed by the interface arc running from the chain end back to its start
struct curved_region {
  int elem = -1;
  element_side side = element_side::plus;
  std::vector<curved_triangle> fan;
};

template <class F>
double integrate(const curved_region& region, F&& f, int degree) {
  double acc = 0;
  for (const auto& tri : region.fan) acc += integrate(tri, f, degree);
  return acc;
}

inline double area(const curved_region& region, int degree = 5) {
  return integrate(region, [](const vec2&) { return 1.0; }, degree);
}

namespace detail {

inline curved_region fan_region(const std::vector<vec2>& chain, const interface_curve& curve) {
  // signed split: a straight fan from the chain head covers the polygon the
  // chain closes with its chord, and one lens swept from the chord midpoint
  // onto the arc supplies the difference between chord and arc (with sign).
  // the chord midpoint lies strictly inside a convex interface, so no tangent
  // passes through it and the lens sweep cannot fold
  const int len = int(chain.size());
  curved_region r;
  for (int k = 1; k + 1 < len; ++k) {
    if ((chain[k + 1] - chain[k]).norm() == 0) continue;
    curved_triangle tri;
    tri.apex = chain[0];
    tri.side = {chain[k], chain[k + 1], nullptr};
    r.fan.push_back(tri);
  }
  curved_triangle lens;
  lens.apex = 0.5 * (chain.front() + chain.back());
  lens.side = {chain[len - 1], chain[0], &curve};
  r.fan.push_back(lens);
  return r;
}

}  // namespace detail

// split a cut element into its two curved sides, returned as (minus, plus)
inline std::pair<curved_region, curved_region> curved_subelements(
    const element_geometry& g, const interface_element_data& data, const interface_curve& curve) {
  vec2 lo, hi;
  g.bbox(lo, hi);
  detail::boundary_walk w =
      detail::walk_boundary(g, data.local_edge_cuts, data.d, data.e, (hi - lo).norm());
  const int n = int(w.seq.size());
  const int c1 = w.cross_pos[0], c2 = w.cross_pos[1];

  auto build = [&](int from, int to) {
    std::vector<vec2> chain;
    double side_level = 0;
    for (int i = from;; i = (i + 1) % n) {
      chain.push_back(w.seq[i].p);
      // side witness: the corner that sits farthest from the interface in
      // level value; chains made of the two crossings alone carry no corner,
      // so probe inside the lens instead (that sliver is inside the curve)
      if (!w.seq[i].crossing) {
        const double lv = curve.level(w.seq[i].p);
        if (std::abs(lv) > std::abs(side_level)) side_level = lv;
      }
      if (i == to) break;
    }
    curved_region r = detail::fan_region(chain, curve);
    r.elem = data.elem;
    if (side_level == 0) {
      const curved_triangle& lens = r.fan.back();
      side_level = curve.level(vec2(0.5 * (lens.apex + lens.side.at(0.5))));
    }
    r.side = side_level <= 0 ? element_side::minus : element_side::plus;
    return r;
  };

  curved_region r1 = build(c1, c2);
  curved_region r2 = build(c2, c1);
  if (r1.side == r2.side) throw geometry_error("cut element split produced two same-side regions");
  if (r1.side == element_side::minus) return {r1, r2};
  return {r2, r1};
}

// whole (uncut) element as integration domain
template <class F>
double integrate_element(const element_geometry& g, F&& f, int degree) {
  if (g.n == 3) {
    curved_triangle tri;
    tri.apex = g.v[0];
    tri.side = {g.v[1], g.v[2], nullptr};
    return integrate(tri, f, degree);
  }
  const quad_rule1d r = gauss_legendre01(degree);
  vec2 lo, hi;
  g.bbox(lo, hi);
  const double jac = (hi.x() - lo.x()) * (hi.y() - lo.y());
  double acc = 0;
  for (int i = 0; i < r.size(); ++i)
    for (int j = 0; j < r.size(); ++j)
      acc += r.w[i] * r.w[j] *
             f(vec2(lo.x() + r.x[i] * (hi.x() - lo.x()), lo.y() + r.x[j] * (hi.y() - lo.y())));
  return acc * jac;
}

// piecewise discrete function evaluable per element with explicit side choice
struct discrete_field {
  virtual ~discrete_field() = default;
  virtual double value(int elem, element_side s, const vec2& x) const = 0;
  virtual vec2 gradient(int elem, element_side s, const vec2& x) const = 0;
};

struct norm_split {
  double l2_minus = 0, l2_plus = 0, h1_minus = 0, h1_plus = 0;
  double l2() const { return std::hypot(l2_minus, l2_plus); }
  double h1() const { return std::hypot(h1_minus, h1_plus); }
};

using scalar_fn = std::function<double(const vec2&)>;
using vector_fn = std::function<vec2(const vec2&)>;

// piecewise L2 and H1-seminorm errors, split by subdomain
inline norm_split error_norms(const cartesian_mesh& mesh, const classification_result& cls,
                              const interface_curve& curve, const scalar_fn& u_minus,
                              const scalar_fn& u_plus, const vector_fn& grad_u_minus,
                              const vector_fn& grad_u_plus, const discrete_field& field,
                              int degree = 5) {
  double l2m = 0, l2p = 0, h1m = 0, h1p = 0;

  auto accumulate = [&](int e, element_side s, auto&& integrator) {
    const scalar_fn& ue = s == element_side::minus ? u_minus : u_plus;
    const vector_fn& ge = s == element_side::minus ? grad_u_minus : grad_u_plus;
    double dl2 = integrator([&](const vec2& x) {
      double d = ue(x) - field.value(e, s, x);
      return d * d;
    });
    double dh1 = integrator([&](const vec2& x) {
      vec2 d = ge(x) - field.gradient(e, s, x);
      return d.squaredNorm();
    });
    (s == element_side::minus ? l2m : l2p) += dl2;
    (s == element_side::minus ? h1m : h1p) += dh1;
  };

  for (int e = 0; e < mesh.num_elems(); ++e) {
    element_geometry g = mesh.geom(e);
    if (!cls.is_interface(e)) {
      element_side s = cls.classes[e].side;
      accumulate(e, s, [&](auto&& f) { return integrate_element(g, f, degree); });
    } else {
      auto [rm, rp] = curved_subelements(g, cls.cut_of(e), curve);
      accumulate(e, element_side::minus, [&](auto&& f) { return integrate(rm, f, degree); });
      accumulate(e, element_side::plus, [&](auto&& f) { return integrate(rp, f, degree); });
    }
  }

  norm_split out;
  out.l2_minus = std::sqrt(l2m);
  out.l2_plus = std::sqrt(l2p);
  out.h1_minus = std::sqrt(h1m);
  out.h1_plus = std::sqrt(h1p);
  return out;
}

}  // namespace ife
