#include "ife/mesh.hpp"

#include <catch_amalgamated.hpp>

#include <cmath>
#include <numbers>
#include <set>

using namespace ife;

namespace {

struct line_curve : interface_curve {
  vec2 p, n;
  line_curve(const vec2& p_, const vec2& n_) : p(p_), n(n_.normalized()) {}
  double level(const vec2& x) const override { return n.dot(x - p); }
  double max_curvature() const override { return 0.0; }
};

}  // namespace

TEST_CASE("rectangular mesh counts and orientation") {
  cartesian_mesh m = build_mesh(-1, 1, -1, 1, 4, 3, element_kind::rectangular);
  CHECK(m.num_elems() == 12);
  CHECK(int(m.vertices.size()) == 5 * 4);
  CHECK(int(m.edges.size()) == 4 * 4 + 3 * 5);
  CHECK(m.hx == Catch::Approx(0.5));
  CHECK(m.hy == Catch::Approx(2.0 / 3.0));
  CHECK(m.h == Catch::Approx(2.0 / 3.0));
  for (int e = 0; e < m.num_elems(); ++e) {
    element_geometry g = m.geom(e);
    CHECK(g.n == 4);
    CHECK(g.area() > 0);  // counterclockwise
  }
}

TEST_CASE("triangular mesh splits each cell along the diagonal") {
  cartesian_mesh m = build_mesh(0, 1, 0, 1, 2, 2, element_kind::triangular);
  CHECK(m.num_elems() == 8);
  double total = 0;
  for (int e = 0; e < m.num_elems(); ++e) {
    element_geometry g = m.geom(e);
    CHECK(g.n == 3);
    CHECK(g.area() > 0);
    total += g.area();
  }
  CHECK(total == Catch::Approx(1.0));
  CHECK(int(m.edges.size()) == 2 * 3 + 2 * 3 + 4);  // grid edges plus one diagonal per cell
}

TEST_CASE("edges connect back to their elements") {
  for (element_kind kind : {element_kind::rectangular, element_kind::triangular}) {
    cartesian_mesh m = build_mesh(-1, 1, -1, 1, 3, 3, kind);
    for (int ge = 0; ge < int(m.edges.size()); ++ge) {
      const mesh_edge& e = m.edges[ge];
      for (int s = 0; s < 2; ++s) {
        if (e.elem[s] < 0) continue;
        CHECK(m.elem_edges[e.elem[s]][e.local[s]] == ge);
        element_geometry g = m.geom(e.elem[s]);
        vec2 a = g.v[e.local[s]], b = g.v[(e.local[s] + 1) % g.n];
        const vec2 &p0 = m.vertices[e.v0], &p1 = m.vertices[e.v1];
        bool forward = (a - p0).norm() < 1e-14 && (b - p1).norm() < 1e-14;
        bool reversed = (a - p1).norm() < 1e-14 && (b - p0).norm() < 1e-14;
        CHECK((forward || reversed));
      }
      if (e.elem[1] < 0) CHECK(m.edge_on_boundary(ge));
    }
  }
}

TEST_CASE("boundary flags") {
  cartesian_mesh m = build_mesh(-1, 1, -1, 1, 4, 4, element_kind::rectangular);
  int nb = 0;
  for (int v = 0; v < int(m.vertices.size()); ++v)
    if (m.vertex_on_boundary(v)) ++nb;
  CHECK(nb == 16);  // 5x5 grid has 16 boundary vertices
}

TEST_CASE("classification of the circle benchmark mesh") {
  cartesian_mesh m = build_mesh(-1, 1, -1, 1, 40, 40, element_kind::rectangular);
  circle_curve c(vec2(0, 0), std::numbers::pi / 6.28);
  classification_result cls = classify_elements(m, c, poly_space_tag::q1);
  REQUIRE(int(cls.classes.size()) == m.num_elems());
  CHECK(cls.interface_elems.size() > 50);
  CHECK(cls.interface_elems.size() < 140);

  for (int e : cls.interface_elems) {
    const interface_element_data& d = cls.cut_of(e);
    CHECK(d.elem == e);
    CHECK((d.e - d.d).norm() > 1e-12);
    CHECK(std::abs(c.level(d.f)) < 1e-10);
    CHECK(d.cut.n_bar.dot(d.nf) > 0.9);
    std::set<int> seen(d.i_minus.begin(), d.i_minus.end());
    seen.insert(d.i_plus.begin(), d.i_plus.end());
    CHECK(int(seen.size()) == 4);
    CHECK(int(d.i_minus.size() + d.i_plus.size()) == 4);
  }

  // away from the interface the side follows the sign of the level set
  for (int e = 0; e < m.num_elems(); ++e) {
    if (cls.is_interface(e)) continue;
    vec2 x = m.geom(e).centroid();
    CHECK((cls.classes[e].side == element_side::minus) == (c.level(x) <= 0));
  }
}

TEST_CASE("midpoint families partition edge-midpoint nodes") {
  cartesian_mesh m = build_mesh(-1, 1, -1, 1, 40, 40, element_kind::triangular);
  circle_curve c(vec2(0, 0), std::numbers::pi / 6.28);
  classification_result cls = classify_elements(m, c, poly_space_tag::cr);
  CHECK(cls.interface_elems.size() > 80);
  for (int e : cls.interface_elems) {
    const interface_element_data& d = cls.cut_of(e);
    CHECK(int(d.i_minus.size() + d.i_plus.size()) == 3);
  }
}

TEST_CASE("vertices sitting exactly on the interface are tolerated") {
  cartesian_mesh m = build_mesh(-1, 1, -1, 1, 4, 4, element_kind::rectangular);
  circle_curve c(vec2(0, 0), 0.5);  // passes through (±0.5,0),(0,±0.5)
  classification_result cls = classify_elements(m, c, poly_space_tag::q1);
  CHECK(int(cls.classes.size()) == m.num_elems());
  for (int e : cls.interface_elems) {
    const interface_element_data& d = cls.cut_of(e);
    CHECK((d.e - d.d).norm() > 1e-12);
  }
}

TEST_CASE("two crossings on a single edge are rejected") {
  cartesian_mesh m = build_mesh(-1, 1, -1, 1, 2, 2, element_kind::rectangular);
  circle_curve c(vec2(-0.5, 0), 0.2);
  CHECK_THROWS_AS(classify_elements(m, c, poly_space_tag::q1), hypothesis_error);
}

TEST_CASE("negligible corner slivers classify as uncut") {
  cartesian_mesh m = build_mesh(0, 1, 0, 1, 1, 1, element_kind::rectangular);
  line_curve lc(vec2(1e-7, 0), vec2(1, 1));
  classification_result cls = classify_elements(m, lc, poly_space_tag::q1);
  CHECK(cls.interface_elems.empty());
  CHECK(cls.classes[0].side == element_side::plus);
}

TEST_CASE("shared cut edges agree between neighboring elements") {
  cartesian_mesh m = build_mesh(-1, 1, -1, 1, 20, 20, element_kind::rectangular);
  circle_curve c(vec2(0, 0), 0.5);
  classification_result cls = classify_elements(m, c, poly_space_tag::q1);
  for (int ge = 0; ge < int(m.edges.size()); ++ge) {
    if (cls.edge_cuts[ge].count == 0) continue;
    const mesh_edge& e = m.edges[ge];
    for (int q = 0; q < cls.edge_cuts[ge].count; ++q)
      CHECK(std::abs(c.level(cls.edge_cuts[ge].p[q])) < 1e-9);
    for (int s = 0; s < 2; ++s) {
      if (e.elem[s] < 0 || !cls.is_interface(e.elem[s])) continue;
      const auto& local = cls.cut_of(e.elem[s]).local_edge_cuts[e.local[s]];
      CHECK(local.count == cls.edge_cuts[ge].count);
    }
  }
}

TEST_CASE("admissible mesh size bound") {
  mesh_size_verdict ok = validate_mesh_size(0.025, 2.0, 0.4, 0.031);
  CHECK(ok.ok);
  CHECK(ok.required_h == Catch::Approx(0.02726).epsilon(0.01));
  mesh_size_verdict bad = validate_mesh_size(0.05, 2.0, 0.4, 0.031);
  CHECK(!bad.ok);
  mesh_size_verdict flat = validate_mesh_size(123.0, 0.0, 0.4, 0.031);
  CHECK(flat.ok);
  CHECK(std::isinf(flat.required_h));
  CHECK_THROWS_AS(validate_mesh_size(0.1, 1.0, 0.8, 0.031), config_error);  // band too wide
}

TEST_CASE("mesh size convention: forty cells per axis on the benchmark box") {
  cartesian_mesh m = build_mesh(-1, 1, -1, 1, 40, 40, element_kind::rectangular);
  CHECK(m.h == Catch::Approx(0.05));
}
