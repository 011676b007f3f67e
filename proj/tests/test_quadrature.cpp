#include "ife/quadrature.hpp"

#include "ife/interpolate.hpp"
#include "ife/model_problem.hpp"

#include <catch_amalgamated.hpp>

#include <cmath>
#include <numbers>

using namespace ife;

TEST_CASE("gauss rules: weights, exactness, range check") {
  for (int n = 1; n <= 10; ++n) {
    const quad_rule1d& r = gauss_legendre(n);
    double ws = 0;
    for (int i = 0; i < r.size(); ++i) ws += r.w[i];
    CHECK(ws == Catch::Approx(2.0).margin(1e-14));

    // exact for polynomials up to degree 2n-1
    for (int k = 0; k <= 2 * n - 1; ++k) {
      double acc = 0;
      for (int i = 0; i < r.size(); ++i) acc += r.w[i] * std::pow(r.x[i], k);
      double exact = k % 2 == 1 ? 0.0 : 2.0 / (k + 1);
      CHECK(acc == Catch::Approx(exact).margin(1e-13));
    }
  }
  quad_rule1d r01 = gauss_legendre01(4);
  double ws = 0, xm = 0;
  for (int i = 0; i < r01.size(); ++i) {
    ws += r01.w[i];
    xm += r01.w[i] * r01.x[i];
  }
  CHECK(ws == Catch::Approx(1.0).margin(1e-14));
  CHECK(xm == Catch::Approx(0.5).margin(1e-14));
  CHECK_THROWS_AS(gauss_legendre(0), config_error);
  CHECK_THROWS_AS(gauss_legendre(31), config_error);
}

TEST_CASE("straight elements integrate polynomials exactly") {
  element_geometry tri;
  tri.n = 3;
  tri.v = {vec2(0, 0), vec2(1, 0), vec2(0, 1), vec2(0, 0)};
  CHECK(integrate_element(tri, [](const vec2&) { return 1.0; }, 3) ==
        Catch::Approx(0.5).margin(1e-14));
  CHECK(integrate_element(tri, [](const vec2& x) { return x.x(); }, 3) ==
        Catch::Approx(1.0 / 6).margin(1e-14));

  element_geometry sq;
  sq.n = 4;
  sq.v = {vec2(0, 0), vec2(1, 0), vec2(1, 1), vec2(0, 1)};
  CHECK(integrate_element(sq, [](const vec2& x) { return x.x() * x.x(); }, 3) ==
        Catch::Approx(1.0 / 3).margin(1e-14));
  CHECK(integrate_element(sq, [](const vec2& x) { return x.x() * x.y(); }, 2) ==
        Catch::Approx(0.25).margin(1e-14));
}

TEST_CASE("curved fan reproduces a circular segment area") {
  circle_curve circ(vec2(0, 0), 0.5);
  // chord x = 0.3 cuts off a segment of area r^2 (alpha - sin alpha cos alpha)
  double alpha = std::acos(0.6);
  double exact = 0.25 * (alpha - 0.48);

  curved_triangle tri;
  tri.apex = vec2(0.3, 0.0);
  tri.side = {vec2(0.3, -0.4), vec2(0.3, 0.4), &circ};
  double a = integrate(tri, [](const vec2&) { return 1.0; }, 12);
  CHECK(a == Catch::Approx(exact).epsilon(1e-10));

  // a straight side collinear with the apex sweeps zero signed area
  curved_triangle flat;
  flat.apex = vec2(0, 0);
  flat.side = {vec2(1, 0), vec2(2, 0), nullptr};
  CHECK(integrate(flat, [](const vec2&) { return 1.0; }, 3) == Catch::Approx(0.0).margin(1e-15));

  // an apex outside the curve can see the arc edge-on; the sweep folds there
  curved_triangle fold;
  fold.apex = vec2(0.8, 0.0);
  fold.side = {vec2(0.5, 0.0), vec2(0.0, 0.5), &circ};
  CHECK_THROWS_AS(integrate(fold, [](const vec2&) { return 1.0; }, 8), geometry_error);
}

TEST_CASE("cut element split partitions the domain") {
  radial_benchmark bench;
  circle_curve circ = bench.curve();
  cartesian_mesh mesh = build_mesh(-1, 1, -1, 1, 40, 40, element_kind::rectangular);
  classification_result cls = classify_elements(mesh, circ, poly_space_tag::q1);
  REQUIRE(!cls.cuts.empty());

  double total = 0, minus_area = 0;
  for (int e = 0; e < mesh.num_elems(); ++e) {
    element_geometry g = mesh.geom(e);
    if (!cls.is_interface(e)) {
      total += g.area();
      if (cls.classes[e].side == element_side::minus) minus_area += g.area();
    } else {
      auto [rm, rp] = curved_subelements(g, cls.cut_of(e), circ);
      double am = area(rm, 8), ap = area(rp, 8);
      CHECK(am + ap == Catch::Approx(g.area()).epsilon(1e-12));
      total += am + ap;
      minus_area += am;
    }
  }
  CHECK(total == Catch::Approx(4.0).epsilon(1e-12));
  CHECK(minus_area == Catch::Approx(std::numbers::pi * bench.r0 * bench.r0).epsilon(1e-8));
}

TEST_CASE("quadrature degree is saturated for smooth integrands") {
  circle_curve circ(vec2(0, 0), 0.5);
  curved_triangle tri;
  tri.apex = vec2(0.3, 0.0);
  tri.side = {vec2(0.3, -0.4), vec2(0.3, 0.4), &circ};
  auto f = [](const vec2& x) { return std::exp(x.x() + 0.5 * x.y()); };
  double i5 = integrate(tri, f, 5);
  double i9 = integrate(tri, f, 9);
  CHECK(std::abs(i5 - i9) / std::abs(i9) < 1e-6);
}

TEST_CASE("error norms vanish for a reproduced bilinear field") {
  radial_benchmark bench;
  circle_curve circ = bench.curve();
  cartesian_mesh mesh = build_mesh(-1, 1, -1, 1, 20, 20, element_kind::rectangular);
  classification_result cls = classify_elements(mesh, circ, poly_space_tag::q1);
  dof_map dofs = make_dof_map(mesh, poly_space_tag::q1);
  std::vector<ife_basis> bases = build_all_bases(mesh, cls, poly_space_tag::q1, 1.0, 1.0);

  auto u = [](const vec2& x) { return 1.5 + 2 * x.x() - x.y() + 0.75 * x.x() * x.y(); };
  auto gu = [](const vec2& x) { return vec2(2 + 0.75 * x.y(), -1 + 0.75 * x.x()); };
  Eigen::VectorXd v = interpolate(circ, dofs, u, u);
  fe_field field(mesh, cls, bases, dofs, v);
  norm_split err = error_norms(mesh, cls, circ, u, u, gu, gu, field);
  CHECK(err.l2() < 1e-11);
  CHECK(err.h1() < 1e-10);
  CHECK(err.l2_minus < err.l2_plus);  // the inner subdomain is much smaller
}

TEST_CASE("radial model problem is self-consistent") {
  radial_benchmark bench;
  bench.beta_minus = 7.0;
  bench.beta_plus = 0.5;
  circle_curve circ = bench.curve();

  // continuity of the solution and of the normal flux across the interface
  for (double th : {0.1, 1.7, 4.0}) {
    vec2 p = bench.r0 * vec2(std::cos(th), std::sin(th));
    CHECK(bench.u_minus(p) == Catch::Approx(bench.u_plus(p)).margin(1e-14));
    vec2 n = circ.gradient(p);
    CHECK(bench.beta_minus * bench.grad_minus(p).dot(n) ==
          Catch::Approx(bench.beta_plus * bench.grad_plus(p).dot(n)).margin(1e-12));
  }

  // -div(beta grad u) matches the stated source, by central differences
  const double d = 1e-5;
  auto check_rhs = [&](const vec2& p, double beta, auto&& uf) {
    double lap = (uf(p + vec2(d, 0)) + uf(p - vec2(d, 0)) + uf(p + vec2(0, d)) +
                  uf(p - vec2(0, d)) - 4 * uf(p)) /
                 (d * d);
    CHECK(-beta * lap == Catch::Approx(bench.rhs(p)).epsilon(1e-4));
  };
  check_rhs(vec2(0.2, 0.1), bench.beta_minus, [&](const vec2& x) { return bench.u_minus(x); });
  check_rhs(vec2(0.7, -0.5), bench.beta_plus, [&](const vec2& x) { return bench.u_plus(x); });

  // exact() switches sides at the interface radius
  CHECK(bench.exact(vec2(0.1, 0)) == bench.u_minus(vec2(0.1, 0)));
  CHECK(bench.exact(vec2(0.9, 0)) == bench.u_plus(vec2(0.9, 0)));
  CHECK(bench.dirichlet(vec2(1, 1)) == bench.u_plus(vec2(1, 1)));
}
