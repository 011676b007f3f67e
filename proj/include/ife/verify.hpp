#pragma once

#include "ife/core.hpp"
#include "ife/geometry.hpp"
#include "ife/ife_basis.hpp"
#include "ife/interpolate.hpp"
#include "ife/local_fe.hpp"
#include "ife/mesh.hpp"
#include "ife/model_problem.hpp"

#include <cmath>
#include <numbers>
#include <random>
#include <string>
#include <vector>

namespace ife {

struct suite_result {
  std::string name;
  long checks = 0;
  double worst = 0;  // worst residual (or worst value/bound ratio)
  double tol = 0;
  bool pass() const { return checks > 0 && worst <= tol; }
};

namespace detail {

inline vec2 rotate(const vec2& v, double angle) {
  const double c = std::cos(angle), s = std::sin(angle);
  return vec2(c * v.x() - s * v.y(), s * v.x() + c * v.y());
}

inline double log_uniform(std::mt19937_64& rng, double lo, double hi) {
  std::uniform_real_distribution<double> u(std::log(lo), std::log(hi));
  return std::exp(u(rng));
}

}  // namespace detail

// eigen/inverse identities of the point and line jump matrices; the residuals
// of the 1/rho-scaled identities are measured relative to their magnitude
inline suite_result jump_algebra_suite(unsigned long long seed, int count = 10000) {
  suite_result r{"jump-algebra", 0, 0, 1e-12};
  std::mt19937_64 rng(seed);
  std::uniform_real_distribution<double> uang(0, 2 * std::numbers::pi), utilt(-0.45, 0.45);
  for (int k = 0; k < count; ++k) {
    const double th = uang(rng);
    const vec2 nf(std::cos(th), std::sin(th));
    const vec2 nbar = detail::rotate(nf, utilt(rng));
    const vec2 tbar(nbar.y(), -nbar.x());
    const double rho = detail::log_uniform(rng, 1e-4, 1.0);

    auto [mm, mp] = line_jump_matrices(nbar, nf, rho);
    double w = (mm.transpose() * tbar - tbar).cwiseAbs().maxCoeff() /
               std::max(1.0, mm.cwiseAbs().maxCoeff());
    w = std::max(w, (mp.transpose() * tbar - tbar).cwiseAbs().maxCoeff() /
                        std::max(1.0, mp.cwiseAbs().maxCoeff()));
    w = std::max(w, (mm.transpose() * nf - rho * nf).cwiseAbs().maxCoeff());
    w = std::max(w, (mp.transpose() * nf - nf / rho).cwiseAbs().maxCoeff() * rho);
    const double prod_scale = mm.cwiseAbs().maxCoeff() * mp.cwiseAbs().maxCoeff();
    w = std::max(w, (mm * mp - mat2::Identity()).cwiseAbs().maxCoeff() / std::max(1.0, prod_scale));

    auto [pm, pp] = jump_matrices(nf, rho);
    const double pscale = pm.cwiseAbs().maxCoeff() * pp.cwiseAbs().maxCoeff();
    w = std::max(w, (pm * pp - mat2::Identity()).cwiseAbs().maxCoeff() / std::max(1.0, pscale));

    r.worst = std::max(r.worst, w);
    ++r.checks;
  }
  return r;
}

// the point-jump matrix maps the interior gradient of the manufactured radial
// solution onto the exterior one along the circle
inline suite_result manufactured_jump_suite(double beta_minus, double beta_plus,
                                            int count = 100) {
  suite_result r{"manufactured-gradient-jump", 0, 0, 1e-10};
  radial_benchmark prob;
  prob.beta_minus = beta_minus;
  prob.beta_plus = beta_plus;
  const double rho = beta_minus / beta_plus;
  for (int k = 0; k < count; ++k) {
    const double th = 2 * std::numbers::pi * (k + 0.5) / count;
    const vec2 n(std::cos(th), std::sin(th));
    const vec2 x = prob.center + prob.r0 * n;
    auto [m_minus, m_plus] = jump_matrices(n, rho);
    const vec2 gm = prob.grad_minus(x), gp = prob.grad_plus(x);
    const double scale = std::max(gm.cwiseAbs().maxCoeff(), gp.cwiseAbs().maxCoeff());
    double w = (gradient_jump_apply(m_minus, gm) - gp).cwiseAbs().maxCoeff() / scale;
    w = std::max(w, (gradient_jump_apply(m_plus, gp) - gm).cwiseAbs().maxCoeff() / scale);
    r.worst = std::max(r.worst, w);
    ++r.checks;
  }
  return r;
}

// synthetic cut of the unit reference element: random chord through two
// distinct edges, flux point at the chord midpoint with a family-dependent
// admissible tilt of the interface normal
struct synthetic_cut {
  element_geometry g;
  interface_element_data data;
  double beta_minus = 1, beta_plus = 1;
  double kappa_bar = 1e-12;
};

inline synthetic_cut random_cut(std::mt19937_64& rng, poly_space_tag tag, double rho_min = 1e-4,
                                double rho_max = 1.0) {
  synthetic_cut sc;
  const bool tri = required_kind(tag) == element_kind::triangular;
  sc.g.n = tri ? 3 : 4;
  if (tri) {
    sc.g.v = {vec2(0, 0), vec2(1, 0), vec2(1, 1), vec2(0, 0)};
  } else {
    sc.g.v = {vec2(0, 0), vec2(1, 0), vec2(1, 1), vec2(0, 1)};
  }

  std::uniform_int_distribution<int> uedge(0, sc.g.n - 1);
  std::uniform_real_distribution<double> upar(0.08, 0.92), uflip(0, 1);
  int e1 = uedge(rng), e2 = uedge(rng);
  while (e2 == e1) e2 = uedge(rng);
  auto edge_pt = [&](int k, double t) {
    return vec2(sc.g.v[k] + t * (sc.g.v[(k + 1) % sc.g.n] - sc.g.v[k]));
  };
  vec2 d = edge_pt(e1, upar(rng)), e = edge_pt(e2, upar(rng));
  if (uflip(rng) < 0.5) std::swap(d, e);

  cut_line cl;
  cl.d = d;
  cl.e = e;
  cl.t_bar = (e - d).normalized();
  cl.n_bar = vec2(cl.t_bar.y(), -cl.t_bar.x());
  sc.data.elem = 0;
  sc.data.d = d;
  sc.data.e = e;
  sc.data.cut = cl;
  sc.data.f = cl.midpoint();

  const double rho = detail::log_uniform(rng, rho_min, rho_max);
  if (uflip(rng) < 0.5) {
    sc.beta_minus = rho;
    sc.beta_plus = 1.0;
  } else {
    sc.beta_minus = 1.0;
    sc.beta_plus = rho;
  }

  // tilt allowance under which the coupling stays provably unisolvent
  double max_tilt = 0;
  if (tag == poly_space_tag::q1) max_tilt = 0.2;
  if ((tag == poly_space_tag::p1 || tag == poly_space_tag::cr) && rho >= 0.5) max_tilt = 0.2;
  if (tag == poly_space_tag::rq1 && rho >= 0.8) max_tilt = 0.1;
  std::uniform_real_distribution<double> ut(-max_tilt, max_tilt);
  sc.data.nf = detail::rotate(cl.n_bar, max_tilt > 0 ? ut(rng) : 0.0);
  sc.data.fmode = flux_point_mode::midpoint_foot;
  sc.kappa_bar = std::max(1e-12, 1.01 * (1.0 - cl.n_bar.dot(sc.data.nf)));

  const std::vector<vec2> m = nodes(sc.g, tag);
  for (int k = 0; k < int(m.size()); ++k)
    (cl.functional(m[k]) <= 0 ? sc.data.i_minus : sc.data.i_plus).push_back(k);
  return sc;
}

// closed-form coupling coefficients vs a dense LU solve of the same system
inline suite_result sherman_morrison_suite(unsigned long long seed, int per_family = 2500) {
  suite_result r{"rank-one-solve-vs-dense", 0, 0, 1e-11};
  std::mt19937_64 rng(seed);
  for (poly_space_tag tag :
       {poly_space_tag::p1, poly_space_tag::cr, poly_space_tag::q1, poly_space_tag::rq1}) {
    for (int k = 0; k < per_family; ++k) {
      synthetic_cut sc = random_cut(rng, tag);
      ife_basis basis =
          build_ife_basis(sc.g, sc.data, tag, sc.beta_minus, sc.beta_plus, sc.kappa_bar);
      for (const sm_system& sys : basis.systems) {
        const int m = int(sys.other_nodes.size());
        if (m == 0) continue;
        Eigen::MatrixXd a = Eigen::MatrixXd::Identity(m, m) + sys.mu * sys.delta * sys.gamma.transpose();
        Eigen::VectorXd c_dense = Eigen::PartialPivLU<Eigen::MatrixXd>(a).solve(sys.b);
        r.worst = std::max(r.worst, (c_dense - sys.c).cwiseAbs().maxCoeff());
        ++r.checks;
      }
    }
  }
  return r;
}

namespace detail {

inline vec2 random_point_in(const element_geometry& g, std::mt19937_64& rng) {
  std::uniform_real_distribution<double> u(0, 1);
  if (g.n == 4) {
    vec2 lo, hi;
    g.bbox(lo, hi);
    return vec2(lo.x() + u(rng) * (hi.x() - lo.x()), lo.y() + u(rng) * (hi.y() - lo.y()));
  }
  double a = u(rng), b = u(rng);
  if (a + b > 1) {
    a = 1 - a;
    b = 1 - b;
  }
  return vec2(g.v[0] + a * (g.v[1] - g.v[0]) + b * (g.v[2] - g.v[0]));
}

}  // namespace detail

// per-element exactness properties of the immersed basis on real circle
// meshes: Kronecker nodal values, partition of unity, zero gradient sum,
// chord-trace continuity, flux matching at the flux point, and the
// position-reproduction identities with their derivative forms
inline suite_result identity_suite(unsigned long long seed, int pts_per_elem = 100) {
  suite_result r{"basis-identities", 0, 0, 1e-9};
  std::mt19937_64 rng(seed);
  std::uniform_real_distribution<double> u01(0, 1);
  const radial_benchmark geom_only;  // default circle radius

  for (poly_space_tag tag :
       {poly_space_tag::p1, poly_space_tag::cr, poly_space_tag::q1, poly_space_tag::rq1}) {
    const bool mild = tag == poly_space_tag::rq1;
    const std::vector<std::pair<double, double>> betas =
        mild ? std::vector<std::pair<double, double>>{{1.0, 1.5}, {1.5, 1.0}}
             : std::vector<std::pair<double, double>>{{1e4, 1.0}, {1.0, 1e4}};
    for (int n : {40, 80}) {
      cartesian_mesh mesh = build_mesh(-1, 1, -1, 1, n, n, required_kind(tag));
      circle_curve curve = geom_only.curve();
      classification_result cls = classify_elements(mesh, curve, tag);
      for (auto [bm, bp] : betas) {
        std::vector<ife_basis> bases = build_all_bases(mesh, cls, tag, bm, bp);
        const double maxb = std::max(bm, bp);
        for (const ife_basis& basis : bases) {
          const element_geometry g = mesh.geom(basis.elem);
          const int nd = basis.size();
          double w = 0;

          // Kronecker values at the nodes, each taken on its own side
          for (int j = 0; j < nd; ++j) {
            element_side sj = basis.data.cut.functional(basis.node_pts[j]) <= 0
                                  ? element_side::minus
                                  : element_side::plus;
            for (int i = 0; i < nd; ++i)
              w = std::max(w, std::abs(basis.eval(i, basis.node_pts[j], sj) - (i == j ? 1 : 0)));
          }

          // partition of unity and gradient sum at random points, both sides
          for (int k = 0; k < pts_per_elem; ++k) {
            const vec2 x = detail::random_point_in(g, rng);
            const element_side s = u01(rng) < 0.5 ? element_side::minus : element_side::plus;
            double sum = 0;
            vec2 gsum = vec2::Zero();
            for (int i = 0; i < nd; ++i) {
              sum += basis.eval(i, x, s);
              gsum += basis.grad(i, x, s);
            }
            w = std::max(w, std::abs(sum - 1.0));
            w = std::max(w, mesh.h * gsum.cwiseAbs().maxCoeff());
          }

          // continuity across the chord
          for (int k = 0; k < 20; ++k) {
            const vec2 x = basis.data.d + u01(rng) * (basis.data.e - basis.data.d);
            for (int i = 0; i < nd; ++i)
              w = std::max(w, std::abs(basis.eval(i, x, element_side::minus) -
                                       basis.eval(i, x, element_side::plus)));
          }

          // normal-flux matching at the flux point
          for (int i = 0; i < nd; ++i) {
            const double fm = bm * basis.grad(i, basis.data.f, element_side::minus).dot(basis.data.nf);
            const double fp = bp * basis.grad(i, basis.data.f, element_side::plus).dot(basis.data.nf);
            w = std::max(w, std::abs(fm - fp) * mesh.h / maxb);
          }

          // position-reproduction identities, value and derivative forms
          for (int k = 0; k < 10; ++k) {
            const vec2 x = detail::random_point_in(g, rng);
            for (element_side s : {element_side::minus, element_side::plus}) {
              lambda_result lr = lambda_residual(basis, x, s);
              w = std::max(w, lr.value.cwiseAbs().maxCoeff());
              w = std::max(w, mesh.h * lr.dx.cwiseAbs().maxCoeff());
              w = std::max(w, mesh.h * lr.dy.cwiseAbs().maxCoeff());
            }
          }

          r.worst = std::max(r.worst, w);
          ++r.checks;
        }
      }
    }
  }
  return r;
}

// with equal coefficients the immersed construction reproduces the standard
// shape functions coefficientwise
inline suite_result equivalence_suite(int n = 40) {
  suite_result r{"unit-contrast-equivalence", 0, 0, 1e-12};
  const radial_benchmark geom_only;
  for (poly_space_tag tag :
       {poly_space_tag::p1, poly_space_tag::cr, poly_space_tag::q1, poly_space_tag::rq1}) {
    cartesian_mesh mesh = build_mesh(-1, 1, -1, 1, n, n, required_kind(tag));
    circle_curve curve = geom_only.curve();
    classification_result cls = classify_elements(mesh, curve, tag);
    for (double beta : {1.0, 2.5}) {
      std::vector<ife_basis> bases = build_all_bases(mesh, cls, tag, beta, beta);
      for (const ife_basis& basis : bases) {
        std::vector<local_poly> psi = standard_shapes(mesh.geom(basis.elem), tag);
        for (int i = 0; i < basis.size(); ++i)
          for (int k = 0; k < 4; ++k) {
            r.worst = std::max(r.worst, std::abs(basis.piece_minus[i].c[k] - psi[i].c[k]));
            r.worst = std::max(r.worst, std::abs(basis.piece_plus[i].c[k] - psi[i].c[k]));
          }
        ++r.checks;
      }
    }
  }
  return r;
}

// arc-to-chord distance and normal-variation bounds on the circle meshes,
// reported as the worst observed value/bound ratio
inline suite_result geometry_bound_suite(int n, double eps = 0.4) {
  suite_result r{"arc-geometry-bounds", 0, 0, 1.0};
  const radial_benchmark geom_only;
  circle_curve curve = geom_only.curve();
  cartesian_mesh mesh = build_mesh(-1, 1, -1, 1, n, n, element_kind::rectangular);
  classification_result cls = classify_elements(mesh, curve, poly_space_tag::q1);
  const double kappa = curve.max_curvature();
  const double c_eps = std::pow(1.0 - 2.0 * eps * eps, -1.5);
  const double dist_bound = 2.0 * c_eps * kappa * mesh.h * mesh.h;
  const double normal_bound = std::sqrt(2.0) * (1.0 + c_eps) * kappa * mesh.h;
  const int samples = 50;

  for (const interface_element_data& data : cls.cuts) {
    std::vector<vec2> pts(samples), nrm(samples);
    for (int k = 0; k < samples; ++k) {
      pts[k] = curve.arc_point(data.d, data.e, (k + 0.5) / samples);
      nrm[k] = normal_at(curve, pts[k]);
      const double dist = (pts[k] - foot_of_perpendicular(pts[k], data.cut)).norm();
      r.worst = std::max(r.worst, dist / dist_bound);
      ++r.checks;
    }
    for (int k = 0; k < samples; ++k)
      for (int l = k + 1; l < samples; ++l)
        r.worst = std::max(r.worst, (nrm[k] - nrm[l]).norm() / normal_bound);
  }
  return r;
}

}  // namespace ife
