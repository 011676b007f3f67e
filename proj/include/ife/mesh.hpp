#pragma once

#include "ife/core.hpp"
#include "ife/geometry.hpp"
#include "ife/local_fe.hpp"

#include <map>
#include <string>
#include <vector>

namespace ife {

struct mesh_edge {
  int v0 = -1, v1 = -1;                  // vertex ids, v0 < v1
  std::array<int, 2> elem{-1, -1};       // adjacent elements (second -1 on the boundary)
  std::array<int, 2> local{-1, -1};      // local edge index within each adjacent element
};

// Uniform Cartesian mesh of a box; rectangular cells or each cell split along
// the lower-left to upper-right diagonal into two counterclockwise triangles.
struct cartesian_mesh {
  double x0, x1, y0, y1;
  int nx, ny;
  element_kind kind;
  double hx, hy, h;  // cell sizes; h = max(hx, hy)

  std::vector<vec2> vertices;
  std::vector<std::array<int, 4>> elems;       // vertex ids, [3] = -1 for triangles
  std::vector<mesh_edge> edges;
  std::vector<std::array<int, 4>> elem_edges;  // edge ids per local edge, [3] = -1 for triangles

  int num_elems() const { return int(elems.size()); }
  int verts_per_elem() const { return kind == element_kind::triangular ? 3 : 4; }

  element_geometry geom(int e) const {
    element_geometry g;
    g.n = verts_per_elem();
    for (int i = 0; i < g.n; ++i) g.v[i] = vertices[elems[e][i]];
    return g;
  }

  bool edge_on_boundary(int ei) const { return edges[ei].elem[1] < 0; }

  bool vertex_on_boundary(int vi) const {
    const vec2& p = vertices[vi];
    double tx = 1e-12 * (x1 - x0), ty = 1e-12 * (y1 - y0);
    return std::abs(p.x() - x0) < tx || std::abs(p.x() - x1) < tx ||
           std::abs(p.y() - y0) < ty || std::abs(p.y() - y1) < ty;
  }
};

inline cartesian_mesh build_mesh(double x0, double x1, double y0, double y1, int nx, int ny,
                                 element_kind kind) {
  if (nx < 1 || ny < 1) throw config_error("mesh needs at least one cell per axis");
  if (x1 <= x0 || y1 <= y0) throw config_error("empty domain box");
  cartesian_mesh m;
  m.x0 = x0; m.x1 = x1; m.y0 = y0; m.y1 = y1;
  m.nx = nx; m.ny = ny;
  m.kind = kind;
  m.hx = (x1 - x0) / nx;
  m.hy = (y1 - y0) / ny;
  m.h = std::max(m.hx, m.hy);

  m.vertices.reserve((nx + 1) * (ny + 1));
  for (int j = 0; j <= ny; ++j)
    for (int i = 0; i <= nx; ++i)
      m.vertices.emplace_back(x0 + i * m.hx, y0 + j * m.hy);
  auto vid = [&](int i, int j) { return j * (nx + 1) + i; };

  for (int j = 0; j < ny; ++j)
    for (int i = 0; i < nx; ++i) {
      int a = vid(i, j), b = vid(i + 1, j), c = vid(i + 1, j + 1), d = vid(i, j + 1);
      if (kind == element_kind::rectangular) {
        m.elems.push_back({a, b, c, d});
      } else {
        m.elems.push_back({a, b, c, -1});
        m.elems.push_back({a, c, d, -1});
      }
    }

  std::map<std::pair<int, int>, int> edge_ids;
  m.elem_edges.resize(m.elems.size(), {-1, -1, -1, -1});
  for (int e = 0; e < m.num_elems(); ++e) {
    int nv = m.verts_per_elem();
    for (int k = 0; k < nv; ++k) {
      int a = m.elems[e][k], b = m.elems[e][(k + 1) % nv];
      auto key = std::minmax(a, b);
      auto it = edge_ids.find(key);
      int ei;
      if (it == edge_ids.end()) {
        ei = int(m.edges.size());
        edge_ids.emplace(key, ei);
        mesh_edge me;
        me.v0 = key.first;
        me.v1 = key.second;
        m.edges.push_back(me);
      } else {
        ei = it->second;
      }
      mesh_edge& me = m.edges[ei];
      int slot = me.elem[0] < 0 ? 0 : 1;
      me.elem[slot] = e;
      me.local[slot] = k;
      m.elem_edges[e][k] = ei;
    }
  }
  return m;
}

inline cartesian_mesh build_mesh(double x0, double x1, double y0, double y1, int n,
                                 element_kind kind) {
  return build_mesh(x0, x1, y0, y1, n, n, kind);
}

// crossings of the interface with one mesh edge
struct edge_cut {
  int count = 0;
  std::array<double, 2> t{};
  std::array<vec2, 2> p{};
};

// everything the immersed construction needs to know about one cut element
struct interface_element_data {
  int elem = -1;
  vec2 d, e;
  cut_line cut;
  vec2 f, nf;
  flux_point_mode fmode = flux_point_mode::midpoint_foot;
  std::vector<int> i_minus, i_plus;        // local node indices per side
  std::array<edge_cut, 4> local_edge_cuts; // per local edge
};

enum class element_tag { noninterface, interface_cut };

struct element_class {
  element_tag tag = element_tag::noninterface;
  element_side side = element_side::plus;  // meaningful for noninterface elements
  int cut_index = -1;                      // index into classification_result::cuts
};

struct classification_result {
  poly_space_tag space;
  flux_point_mode fmode;
  std::vector<element_class> classes;
  std::vector<interface_element_data> cuts;
  std::vector<edge_cut> edge_cuts;   // per global edge
  std::vector<int> interface_elems;

  bool is_interface(int e) const { return classes[e].tag == element_tag::interface_cut; }
  const interface_element_data& cut_of(int e) const { return cuts[classes[e].cut_index]; }
};

inline flux_point_mode default_flux_mode(poly_space_tag tag) {
  // vertex/midpoint triangle families need the tangent-aligned point for their
  // unisolvence guarantee; the rectangular families use the midpoint-foot rule
  return (tag == poly_space_tag::p1 || tag == poly_space_tag::cr)
             ? flux_point_mode::tangent_parallel
             : flux_point_mode::midpoint_foot;
}

namespace detail {

// element boundary polygon with crossing points spliced in; areas of the two
// chain polygons (arc approximated by a polyline, which is exact enough for
// the sliver guard because the polyline error is relative to the sliver)
struct boundary_walk {
  struct node {
    vec2 p;
    bool crossing = false;
    int corner = -1;      // element-local corner index, -1 for mid-edge crossings
  };
  std::vector<node> seq;
  std::array<int, 2> cross_pos{-1, -1};
};

inline boundary_walk walk_boundary(const element_geometry& g, const std::array<edge_cut, 4>& cuts,
                                   const vec2& d, const vec2& e, double h) {
  boundary_walk w;
  double tol = 1e-10 * h;
  auto is_cross_pt = [&](const vec2& p) {
    return (p - d).norm() < tol || (p - e).norm() < tol;
  };
  for (int k = 0; k < g.n; ++k) {
    boundary_walk::node c;
    c.p = g.v[k];
    c.corner = k;
    c.crossing = is_cross_pt(g.v[k]);
    w.seq.push_back(c);
    for (int q = 0; q < cuts[k].count; ++q) {
      const vec2& p = cuts[k].p[q];
      if ((p - g.v[k]).norm() < tol || (p - g.v[(k + 1) % g.n]).norm() < tol) continue;
      if (!is_cross_pt(p)) continue;  // crossing deduped away by the caller
      boundary_walk::node n;
      n.p = p;
      n.crossing = true;
      w.seq.push_back(n);
    }
  }
  int found = 0;
  for (int i = 0; i < int(w.seq.size()) && found < 2; ++i)
    if (w.seq[i].crossing) w.cross_pos[found++] = i;
  if (found != 2) throw geometry_error("boundary walk did not find two crossing points");
  return w;
}

inline double polyline_region_area(const std::vector<vec2>& chain, const interface_curve& curve,
                                   const vec2& arc_from, const vec2& arc_to) {
  std::vector<vec2> poly = chain;
  const int m = 64;
  for (int k = 1; k < m; ++k) poly.push_back(curve.arc_point(arc_from, arc_to, double(k) / m));
  double a = 0;
  for (size_t i = 0; i < poly.size(); ++i) {
    const vec2& p = poly[i];
    const vec2& q = poly[(i + 1) % poly.size()];
    a += p.x() * q.y() - q.x() * p.y();
  }
  return 0.5 * a;
}

}  // namespace detail

inline classification_result classify_elements(const cartesian_mesh& mesh,
                                               const interface_curve& curve, poly_space_tag tag,
                                               flux_point_mode fmode) {
  if (required_kind(tag) != mesh.kind)
    throw config_error("element family incompatible with mesh kind");
  classification_result res;
  res.space = tag;
  res.fmode = fmode;
  res.classes.resize(mesh.num_elems());
  res.edge_cuts.resize(mesh.edges.size());

  for (size_t ei = 0; ei < mesh.edges.size(); ++ei) {
    const auto& me = mesh.edges[ei];
    auto hits = edge_intersections(curve, mesh.vertices[me.v0], mesh.vertices[me.v1]);
    edge_cut& ec = res.edge_cuts[ei];
    ec.count = int(hits.size());
    for (int q = 0; q < ec.count; ++q) {
      ec.t[q] = hits[q].t;
      ec.p[q] = hits[q].p;
    }
  }

  const double area_guard = 1e-12 * mesh.h * mesh.h;

  for (int e = 0; e < mesh.num_elems(); ++e) {
    element_geometry g = mesh.geom(e);
    int nv = g.n;

    // element-local crossing records, oriented along the counterclockwise walk
    std::array<edge_cut, 4> local_cuts{};
    for (int k = 0; k < nv; ++k) {
      int gei = mesh.elem_edges[e][k];
      const mesh_edge& me = mesh.edges[gei];
      const edge_cut& ec = res.edge_cuts[gei];
      bool forward = mesh.elems[e][k] == me.v0;
      edge_cut lc;
      lc.count = ec.count;
      for (int q = 0; q < ec.count; ++q) {
        int src = forward ? q : ec.count - 1 - q;
        lc.t[q] = forward ? ec.t[src] : 1.0 - ec.t[src];
        lc.p[q] = ec.p[src];
      }
      local_cuts[k] = lc;
    }

    // distinct crossing points with the set of local edges each lies on
    std::vector<vec2> pts;
    std::vector<std::vector<int>> pt_edges;
    double dedupe = 1e-10 * mesh.h;
    for (int k = 0; k < nv; ++k)
      for (int q = 0; q < local_cuts[k].count; ++q) {
        const vec2& p = local_cuts[k].p[q];
        bool merged = false;
        for (size_t j = 0; j < pts.size(); ++j)
          if ((pts[j] - p).norm() < dedupe) {
            pt_edges[j].push_back(k);
            merged = true;
            break;
          }
        if (!merged) {
          pts.push_back(p);
          pt_edges.push_back({k});
        }
      }

    auto noninterface_by_centroid = [&]() {
      element_class c;
      c.tag = element_tag::noninterface;
      c.side = curve.level(g.centroid()) <= 0 ? element_side::minus : element_side::plus;
      res.classes[e] = c;
    };

    if (pts.size() < 2) {
      noninterface_by_centroid();
      continue;
    }
    if (pts.size() > 2)
      throw hypothesis_error("element " + std::to_string(e) +
                             " is crossed more than twice; refine the mesh");

    vec2 d = pts[0], ept = pts[1];

    // sliver guard: a graze whose smaller piece is negligible is not a cut
    {
      detail::boundary_walk w = detail::walk_boundary(g, local_cuts, d, ept, mesh.h);
      int c1 = w.cross_pos[0], c2 = w.cross_pos[1];
      int n = int(w.seq.size());
      std::vector<vec2> chain1, chain2;
      for (int i = c1;; i = (i + 1) % n) {
        chain1.push_back(w.seq[i].p);
        if (i == c2) break;
      }
      for (int i = c2;; i = (i + 1) % n) {
        chain2.push_back(w.seq[i].p);
        if (i == c1) break;
      }
      double a1 = std::abs(detail::polyline_region_area(chain1, curve, w.seq[c2].p, w.seq[c1].p));
      double a2 = std::abs(detail::polyline_region_area(chain2, curve, w.seq[c1].p, w.seq[c2].p));
      if (std::min(a1, a2) < area_guard) {
        noninterface_by_centroid();
        continue;
      }
    }

    // the two crossings must admit distinct host edges
    bool distinct_edges = false;
    for (int a : pt_edges[0]) {
      for (int b : pt_edges[1])
        if (a != b) distinct_edges = true;
    }
    if (!distinct_edges)
      throw hypothesis_error("element " + std::to_string(e) +
                             " has both crossings on one edge; refine the mesh");

    interface_element_data data;
    data.elem = e;
    data.cut = make_cut_line(curve, d, ept);
    data.d = data.cut.d;
    data.e = data.cut.e;
    data.local_edge_cuts = local_cuts;
    data.fmode = fmode;
    auto [f, nf] = find_flux_point(curve, data.cut, fmode);
    data.f = f;
    data.nf = nf;

    std::vector<vec2> nds = nodes(g, tag);
    for (int i = 0; i < int(nds.size()); ++i) {
      if (curve.level(nds[i]) <= 0)
        data.i_minus.push_back(i);
      else
        data.i_plus.push_back(i);
    }

    element_class c;
    c.tag = element_tag::interface_cut;
    c.cut_index = int(res.cuts.size());
    res.classes[e] = c;
    res.cuts.push_back(std::move(data));
    res.interface_elems.push_back(e);
  }
  return res;
}

inline classification_result classify_elements(const cartesian_mesh& mesh,
                                               const interface_curve& curve, poly_space_tag tag) {
  return classify_elements(mesh, curve, tag, default_flux_mode(tag));
}

struct mesh_size_verdict {
  bool ok;
  double required_h;
};

// Mesh-size condition tying the cell size to the interface curvature kappa,
// the proportion parameter epsilon and the angle allowance kappa_bar. A flat
// interface (kappa <= 0) admits any mesh size.
inline mesh_size_verdict validate_mesh_size(double h, double kappa, double epsilon,
                                            double kappa_bar) {
  if (!(epsilon > 0 && epsilon < std::sqrt(0.5)))
    throw config_error("epsilon must lie in (0, sqrt(2)/2)");
  if (!(kappa_bar > 0 && kappa_bar <= 1)) throw config_error("kappa_bar must lie in (0,1]");
  if (kappa <= 0) return {true, infinity()};
  double c = std::pow(1.0 - 2.0 * epsilon * epsilon, -1.5);
  double bound = std::min(std::sqrt(kappa_bar) / (std::sqrt(2.0) * (1.0 + c * kappa)),
                          epsilon / kappa);
  return {h < bound, bound};
}

}  // namespace ife
