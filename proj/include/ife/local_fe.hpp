#pragma once

#include "ife/core.hpp"

#include <string>
#include <vector>

namespace ife {

enum class poly_space_tag { p1, cr, q1, rq1 };

enum class element_kind { triangular, rectangular };

inline int dof_count(poly_space_tag tag) {
  return (tag == poly_space_tag::p1 || tag == poly_space_tag::cr) ? 3 : 4;
}

inline element_kind required_kind(poly_space_tag tag) {
  return (tag == poly_space_tag::p1 || tag == poly_space_tag::cr) ? element_kind::triangular
                                                                  : element_kind::rectangular;
}

// true when the degrees of freedom sit at edge midpoints rather than vertices
inline bool midpoint_dofs(poly_space_tag tag) {
  return tag == poly_space_tag::cr || tag == poly_space_tag::rq1;
}

inline std::string tag_name(poly_space_tag tag) {
  switch (tag) {
    case poly_space_tag::p1: return "p1";
    case poly_space_tag::cr: return "cr";
    case poly_space_tag::q1: return "q1";
    default: return "rq1";
  }
}

inline poly_space_tag tag_from_name(const std::string& s) {
  if (s == "p1") return poly_space_tag::p1;
  if (s == "cr") return poly_space_tag::cr;
  if (s == "q1") return poly_space_tag::q1;
  if (s == "rq1") return poly_space_tag::rq1;
  throw config_error("unknown element family: " + s);
}

// Element-local scaled coordinates xi = (x - origin) / scale. Polynomials are
// stored in this frame so coefficient magnitudes stay O(1) at small h.
struct local_frame {
  vec2 origin{0, 0};
  double sx = 1, sy = 1;

  vec2 to_local(const vec2& x) const {
    return vec2((x.x() - origin.x()) / sx, (x.y() - origin.y()) / sy);
  }
  bool operator==(const local_frame& o) const {
    return origin.x() == o.origin.x() && origin.y() == o.origin.y() && sx == o.sx && sy == o.sy;
  }
};

inline local_frame frame_of(const element_geometry& g) {
  vec2 lo, hi;
  g.bbox(lo, hi);
  local_frame f;
  f.origin = lo;
  f.sx = hi.x() - lo.x();
  f.sy = hi.y() - lo.y();
  if (f.sx <= 0 || f.sy <= 0) throw geometry_error("degenerate element bounding box");
  return f;
}

// Polynomial in span{1, x, y[, q]} with q = xy or q = x^2 - y^2, held in a
// local frame. The quadratic monomial for the skew-harmonic family keeps its
// form under frame mapping only for square frames, which is asserted on use.
struct local_poly {
  local_frame frame;
  std::array<double, 4> c{0, 0, 0, 0};
  int nterms = 3;   // 3 or 4
  int qkind = 0;    // 0: none, 1: xy, 2: x^2 - y^2

  double eval(const vec2& x) const {
    vec2 l = frame.to_local(x);
    double v = c[0] + c[1] * l.x() + c[2] * l.y();
    if (nterms == 4)
      v += c[3] * (qkind == 1 ? l.x() * l.y() : l.x() * l.x() - l.y() * l.y());
    return v;
  }

  vec2 grad(const vec2& x) const {
    vec2 l = frame.to_local(x);
    double du = c[1], dv = c[2];
    if (nterms == 4) {
      if (qkind == 1) {
        du += c[3] * l.y();
        dv += c[3] * l.x();
      } else {
        du += 2 * c[3] * l.x();
        dv -= 2 * c[3] * l.y();
      }
    }
    return vec2(du / frame.sx, dv / frame.sy);
  }

  double second_degree_coeff() const { return nterms == 4 ? c[3] : 0.0; }

  local_poly& axpy(double a, const local_poly& p) {
    for (int k = 0; k < 4; ++k) c[k] += a * p.c[k];
    return *this;
  }
  local_poly& scale(double a) {
    for (int k = 0; k < 4; ++k) c[k] *= a;
    return *this;
  }
};

inline local_poly zero_poly(const local_frame& f, poly_space_tag tag) {
  local_poly p;
  p.frame = f;
  p.nterms = dof_count(tag);
  p.qkind = tag == poly_space_tag::q1 ? 1 : (tag == poly_space_tag::rq1 ? 2 : 0);
  if (tag == poly_space_tag::rq1 && std::abs(f.sx - f.sy) > 1e-12 * std::abs(f.sx))
    throw config_error("skew-harmonic family requires square cells");
  return p;
}

// affine functional a.(X - p) expressed in the given frame
inline local_poly affine_poly(const local_frame& f, poly_space_tag tag, const vec2& a,
                              const vec2& p) {
  local_poly q = zero_poly(f, tag);
  q.c[0] = a.dot(f.origin - p);
  q.c[1] = a.x() * f.sx;
  q.c[2] = a.y() * f.sy;
  return q;
}

// local degrees of freedom: vertices or edge midpoints in the edge order
// bottom, right, top(, left) induced by the counterclockwise corner order
inline std::vector<vec2> nodes(const element_geometry& g, poly_space_tag tag) {
  std::vector<vec2> m(g.n);
  if (midpoint_dofs(tag)) {
    for (int i = 0; i < g.n; ++i) m[i] = 0.5 * (g.v[i] + g.v[(i + 1) % g.n]);
  } else {
    for (int i = 0; i < g.n; ++i) m[i] = g.v[i];
  }
  return m;
}

// Lagrange shape functions on one element: psi_i(M_j) = delta_ij, solved from
// the nodal Vandermonde system in local coordinates
inline std::vector<local_poly> standard_shapes(const element_geometry& g, poly_space_tag tag) {
  const int nd = dof_count(tag);
  if ((g.n == 3) != (required_kind(tag) == element_kind::triangular))
    throw config_error("element family incompatible with element shape");
  local_frame f = frame_of(g);
  std::vector<vec2> m = nodes(g, tag);

  Eigen::MatrixXd vand(nd, nd);
  for (int j = 0; j < nd; ++j) {
    vec2 l = f.to_local(m[j]);
    vand(j, 0) = 1.0;
    vand(j, 1) = l.x();
    vand(j, 2) = l.y();
    if (nd == 4)
      vand(j, 3) = tag == poly_space_tag::q1 ? l.x() * l.y() : l.x() * l.x() - l.y() * l.y();
  }
  Eigen::PartialPivLU<Eigen::MatrixXd> lu(vand);
  Eigen::MatrixXd coef = lu.solve(Eigen::MatrixXd::Identity(nd, nd));
  if ((vand * coef - Eigen::MatrixXd::Identity(nd, nd)).cwiseAbs().maxCoeff() > 1e-10)
    throw geometry_error("singular nodal system: degenerate element");

  std::vector<local_poly> shapes(nd);
  for (int i = 0; i < nd; ++i) {
    shapes[i] = zero_poly(f, tag);
    for (int k = 0; k < nd; ++k) shapes[i].c[k] = coef(k, i);
  }
  return shapes;
}

}  // namespace ife
