#include "ife/geometry.hpp"

#include <catch_amalgamated.hpp>

#include <cmath>
#include <numbers>

using namespace ife;

namespace {

// wiggly level set used to provoke many crossings on one edge
struct wavy_curve : interface_curve {
  double level(const vec2& x) const override {
    return x.y() - 0.02 * std::sin(3 * std::numbers::pi * x.x());
  }
  double max_curvature() const override { return 200.0; }
};

// straight interface through p with normal n
struct line_curve : interface_curve {
  vec2 p, n;
  line_curve(const vec2& p_, const vec2& n_) : p(p_), n(n_.normalized()) {}
  double level(const vec2& x) const override { return n.dot(x - p); }
  double max_curvature() const override { return 0.0; }
};

}  // namespace

TEST_CASE("circle normal points outward along the radius") {
  circle_curve c(vec2(0, 0), 5.0);
  vec2 n = normal_at(c, vec2(3, 4));
  CHECK(n.x() == Catch::Approx(0.6).margin(1e-12));
  CHECK(n.y() == Catch::Approx(0.8).margin(1e-12));
  CHECK(c.level(vec2(3, 4)) == Catch::Approx(0.0).margin(1e-14));
  CHECK(c.level(vec2(0, 0)) < 0);
}

TEST_CASE("ellipse normal and curvature") {
  ellipse_curve e(vec2(0, 0), 0.5, 0.3);
  vec2 n = normal_at(e, vec2(0.5, 0));
  CHECK(n.x() == Catch::Approx(1.0).margin(1e-9));
  CHECK(e.max_curvature() == Catch::Approx(0.5 / (0.3 * 0.3)));
  vec2 g = e.gradient(vec2(0.2, 0.2));
  vec2 gfd = e.interface_curve::gradient(vec2(0.2, 0.2));
  CHECK((g - gfd).norm() < 1e-6);
}

TEST_CASE("edge intersections of a vertical edge with the circle") {
  circle_curve c(vec2(0, 0), 0.5);
  auto hits = edge_intersections(c, vec2(0.3, -0.6), vec2(0.3, 0.6));
  REQUIRE(hits.size() == 2);
  CHECK(hits[0].p.y() == Catch::Approx(-0.4).margin(1e-10));
  CHECK(hits[1].p.y() == Catch::Approx(0.4).margin(1e-10));
  CHECK(hits[0].t < hits[1].t);
}

TEST_CASE("edge intersections: disjoint edge yields nothing") {
  circle_curve c(vec2(0, 0), 0.5);
  CHECK(edge_intersections(c, vec2(0.7, -1), vec2(0.7, 1)).empty());
}

TEST_CASE("more than two crossings on one edge is rejected") {
  wavy_curve w;
  CHECK_THROWS_AS(edge_intersections(w, vec2(0, 0), vec2(1, 0)), hypothesis_error);
}

TEST_CASE("cut line orientation follows the level set") {
  circle_curve c(vec2(0, 0), 0.5);
  // chord of the circle from (0.3,-0.4) to (0.3,0.4); outside is x > chord
  cut_line cl = make_cut_line(c, vec2(0.3, -0.4), vec2(0.3, 0.4));
  CHECK((cl.e - cl.d).dot(cl.t_bar) > 0);
  CHECK(cl.n_bar.x() == Catch::Approx(1.0).margin(1e-12));
  CHECK(cl.functional(vec2(0.5, 0)) > 0);   // outside
  CHECK(cl.functional(vec2(0.0, 0)) < 0);   // inside
  CHECK(cl.functional(cl.midpoint()) == Catch::Approx(0.0).margin(1e-14));
  CHECK(cl.chord_length() == Catch::Approx(0.8));
}

TEST_CASE("foot of perpendicular lies on the chord line") {
  line_curve lc(vec2(0.2, 0.1), vec2(1, 2));
  cut_line cl = make_cut_line(lc, vec2(0.2, 0.1), vec2(0.2 + 2 / std::sqrt(5.0), 0.1 - 1 / std::sqrt(5.0)));
  vec2 x(0.9, 0.7);
  vec2 f = foot_of_perpendicular(x, cl);
  CHECK(cl.functional(f) == Catch::Approx(0.0).margin(1e-14));
  CHECK(std::abs((x - f).dot(cl.t_bar)) < 1e-14);
}

TEST_CASE("gradient jump matrix for a vertical normal") {
  auto [m_minus, m_plus] = jump_matrices(vec2(0, 1), 0.25);
  CHECK(m_minus(0, 0) == Catch::Approx(1.0));
  CHECK(m_minus(0, 1) == Catch::Approx(0.0).margin(1e-15));
  CHECK(m_minus(1, 0) == Catch::Approx(0.0).margin(1e-15));
  CHECK(m_minus(1, 1) == Catch::Approx(0.25));
  CHECK((m_minus * m_plus - mat2::Identity()).cwiseAbs().maxCoeff() < 1e-14);
  CHECK_THROWS_AS(jump_matrices(vec2(0, 1), 0.0), config_error);
}

TEST_CASE("gradient jump preserves tangential components") {
  vec2 n = vec2(1, 3).normalized();
  vec2 t(-n.y(), n.x());
  auto [m_minus, m_plus] = jump_matrices(n, 0.1);
  vec2 g(0.7, -0.2);
  vec2 gp = gradient_jump_apply(m_minus, g);
  CHECK(gp.dot(t) == Catch::Approx(g.dot(t)));           // tangential derivative continuous
  CHECK(gp.dot(n) == Catch::Approx(0.1 * g.dot(n)));     // flux continuity with beta ratio
}

TEST_CASE("line jump matrices satisfy the eigen identities") {
  vec2 nbar = vec2(2, 1).normalized();
  vec2 tbar(nbar.y(), -nbar.x());
  vec2 nf = (nbar + 0.05 * tbar).normalized();
  double rho = 0.2;
  auto [mm, mp] = line_jump_matrices(nbar, nf, rho);
  CHECK((mm.transpose() * tbar - tbar).norm() < 1e-13);
  CHECK((mm.transpose() * nf - rho * nf).norm() < 1e-13);
  CHECK((mp.transpose() * nf - nf / rho).norm() < 1e-12);
  CHECK((mm * mp - mat2::Identity()).norm() < 1e-12);
  CHECK_THROWS_AS(line_jump_matrices(nbar, -nf, rho), geometry_error);
}

TEST_CASE("flux point on the circle: tangent parallel to the chord") {
  circle_curve c(vec2(0.1, -0.2), 0.45);
  vec2 d = c.arc_point(vec2(0.55, -0.2), vec2(0.1, 0.25), 0.0);
  vec2 e = c.arc_point(vec2(0.55, -0.2), vec2(0.1, 0.25), 1.0);
  cut_line cl = make_cut_line(c, d, e);
  auto [f, nf] = find_flux_point(c, cl, flux_point_mode::tangent_parallel);
  CHECK(c.level(f) == Catch::Approx(0.0).margin(1e-10));
  CHECK((nf - normal_at(c, f)).norm() < 1e-12);
  CHECK(std::abs(normal_at(c, f).dot(cl.t_bar)) < 1e-10);
  // for a circle the arc midpoint direction is radial: f = center + r*n_bar
  CHECK((f - (c.center() + c.radius() * cl.n_bar)).norm() < 1e-9);
}

TEST_CASE("flux point via the midpoint foot") {
  circle_curve c(vec2(0, 0), 0.5);
  cut_line cl = make_cut_line(c, vec2(0.3, -0.4), vec2(0.3, 0.4));
  auto [f, nf] = find_flux_point(c, cl, flux_point_mode::midpoint_foot);
  CHECK(c.level(f) == Catch::Approx(0.0).margin(1e-10));
  CHECK((nf - normal_at(c, f)).norm() < 1e-12);
  CHECK((foot_of_perpendicular(f, cl) - cl.midpoint()).norm() < 1e-10);
  CHECK(f.x() == Catch::Approx(0.5).margin(1e-9));
  CHECK(f.y() == Catch::Approx(0.0).margin(1e-9));
}

TEST_CASE("flux point on a straight interface is the chord midpoint") {
  line_curve lc(vec2(0.4, 0), vec2(1, 0));
  cut_line cl = make_cut_line(lc, vec2(0.4, 0), vec2(0.4, 1));
  for (flux_point_mode m : {flux_point_mode::tangent_parallel, flux_point_mode::midpoint_foot}) {
    auto [f, nf] = find_flux_point(lc, cl, m);
    CHECK((f - cl.midpoint()).norm() < 1e-12);
    CHECK(nf.dot(cl.n_bar) > 0.99);
  }
}

TEST_CASE("arc points stay on the curve and interpolate the endpoints") {
  for (int kind = 0; kind < 2; ++kind) {
    circle_curve circ(vec2(0.05, -0.1), 0.5);
    ellipse_curve ell(vec2(0.05, -0.1), 0.5, 0.3);
    const interface_curve& c = kind == 0 ? static_cast<const interface_curve&>(circ)
                                         : static_cast<const interface_curve&>(ell);
    vec2 p0 = c.arc_point(vec2(0.55, -0.1), vec2(0.05, 0.3), 0.0);
    vec2 p1 = c.arc_point(vec2(0.55, -0.1), vec2(0.05, 0.3), 1.0);
    CHECK((c.arc_point(p0, p1, 0.0) - p0).norm() < 1e-12);
    CHECK((c.arc_point(p0, p1, 1.0) - p1).norm() < 1e-12);
    for (double t : {0.25, 0.5, 0.75}) {
      vec2 x = c.arc_point(p0, p1, t);
      CHECK(std::abs(c.level(x)) < 1e-12);
      // velocity consistent with finite differences of the arc position
      vec2 v = c.arc_velocity(p0, p1, t);
      vec2 vfd = (c.arc_point(p0, p1, t + 1e-6) - c.arc_point(p0, p1, t - 1e-6)) / 2e-6;
      CHECK((v - vfd).norm() < 1e-5 * (1 + v.norm()));
    }
  }
}

TEST_CASE("normal at a singular gradient point is rejected") {
  circle_curve c(vec2(0, 0), 0.5);
  CHECK_THROWS_AS(normal_at(c, vec2(0, 0)), geometry_error);
}
