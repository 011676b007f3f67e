#pragma once

#include "ife/config.hpp"
#include "ife/core.hpp"
#include "ife/geometry.hpp"
#include "ife/ife_basis.hpp"
#include "ife/interpolate.hpp"
#include "ife/local_fe.hpp"
#include "ife/mesh.hpp"
#include "ife/model_problem.hpp"
#include "ife/quadrature.hpp"
#include "ife/report.hpp"
#include "ife/solver.hpp"
#include "ife/verify.hpp"

#include <chrono>
#include <iostream>
#include <memory>
#include <sstream>
#include <string>
#include <vector>

namespace ife {

inline std::unique_ptr<interface_curve> make_curve(const run_config& c) {
  if (c.curve_kind == "circle")
    return std::make_unique<circle_curve>(vec2(c.curve_cx, c.curve_cy), c.curve_r);
  return std::make_unique<ellipse_curve>(vec2(c.curve_cx, c.curve_cy), c.curve_a, c.curve_b);
}

inline radial_benchmark benchmark_for(const run_config& c) {
  if (c.curve_kind != "circle")
    throw config_error("interp and solve modes need the circular interface "
                       "(the manufactured solution is radial)");
  radial_benchmark p;
  p.beta_minus = c.beta_minus;
  p.beta_plus = c.beta_plus;
  p.r0 = c.curve_r;
  p.center = vec2(c.curve_cx, c.curve_cy);
  return p;
}

namespace detail {

template <class F>
auto stage(const std::string& name, int n, F&& body) {
  try {
    return body();
  } catch (const std::exception& e) {
    throw std::runtime_error("stage " + name + " failed at n=" + std::to_string(n) + ": " +
                             e.what());
  }
}

}  // namespace detail

// per-level artifacts of the finest run, kept for the optional dumps
struct run_artifacts {
  cartesian_mesh mesh;
  classification_result cls;
  std::vector<ife_basis> bases;
  Eigen::VectorXd coeffs;
  poly_space_tag tag = poly_space_tag::q1;
};

inline convergence_report run_convergence(const run_config& cfg,
                                          run_artifacts* artifacts = nullptr) {
  validate_config(cfg);
  if (cfg.mode != "interp" && cfg.mode != "solve")
    throw config_error("run_convergence handles interp and solve modes only");
  const auto t0 = std::chrono::steady_clock::now();
  const radial_benchmark prob = benchmark_for(cfg);
  const std::unique_ptr<interface_curve> curve = make_curve(cfg);
  const poly_space_tag tag = cfg.tag();
  const double kappa = curve->max_curvature();

  // only the coarsest level may sit above the admissible mesh size, with a warning
  for (size_t i = 0; i < cfg.mesh_sizes.size(); ++i) {
    const double cell = std::max((cfg.x1 - cfg.x0), (cfg.y1 - cfg.y0)) / cfg.mesh_sizes[i];
    mesh_size_verdict v = validate_mesh_size(cell, kappa, cfg.epsilon, cfg.kappa_bar);
    if (v.ok) continue;
    std::ostringstream msg;
    msg << "mesh n=" << cfg.mesh_sizes[i] << " (cell " << cell
        << ") exceeds the admissible size " << v.required_h;
    if (i == 0)
      std::cerr << "warning: " << msg.str() << "; continuing on the coarsest level\n";
    else
      throw config_error(msg.str());
  }

  convergence_report rep;
  rep.meta = config_echo(cfg);
  const scalar_fn um = [&](const vec2& x) { return prob.u_minus(x); };
  const scalar_fn up = [&](const vec2& x) { return prob.u_plus(x); };
  const vector_fn gm = [&](const vec2& x) { return prob.grad_minus(x); };
  const vector_fn gp = [&](const vec2& x) { return prob.grad_plus(x); };

  for (int n : cfg.mesh_sizes) {
    cartesian_mesh mesh = detail::stage("mesh", n, [&] {
      return build_mesh(cfg.x0, cfg.x1, cfg.y0, cfg.y1, n, n, required_kind(tag));
    });
    classification_result cls =
        detail::stage("classify", n, [&] { return classify_elements(mesh, *curve, tag); });
    std::vector<ife_basis> bases = detail::stage("basis", n, [&] {
      return build_all_bases(mesh, cls, tag, cfg.beta_minus, cfg.beta_plus, cfg.kappa_bar,
                             cfg.lambda);
    });
    const dof_map dofs = make_dof_map(mesh, tag);

    convergence_row row;
    row.n = n;
    row.h = mesh.h;
    Eigen::VectorXd coeffs;
    if (cfg.mode == "interp") {
      coeffs = detail::stage("interpolate", n, [&] { return interpolate(*curve, dofs, um, up); });
    } else {
      solve_result sol = detail::stage("solve", n, [&] {
        penalty_params pen{cfg.resolved_sigma(), cfg.epsilon_flag};
        return solve_interface_problem(mesh, cls, bases, *curve, tag, cfg.beta_minus,
                                       cfg.beta_plus, pen,
                                       [&](const vec2& x) { return prob.rhs(x); },
                                       [&](const vec2& x) { return prob.dirichlet(x); },
                                       cfg.quad_degree, cfg.cg_tol);
      });
      coeffs = sol.u;
      row.iterations = sol.iterations;
    }
    row.norms = detail::stage("norms", n, [&] {
      fe_field field(mesh, cls, bases, dofs, coeffs);
      return error_norms(mesh, cls, *curve, um, up, gm, gp, field, cfg.quad_degree);
    });
    rep.rows.push_back(row);

    if (artifacts && n == cfg.mesh_sizes.back()) {
      artifacts->mesh = std::move(mesh);
      artifacts->cls = std::move(cls);
      artifacts->bases = std::move(bases);
      artifacts->coeffs = std::move(coeffs);
      artifacts->tag = tag;
    }
  }
  compute_rates(rep);
  rep.wall_seconds = std::chrono::duration<double>(std::chrono::steady_clock::now() - t0).count();
  return rep;
}

struct verify_report {
  std::vector<suite_result> suites;
  bool pass() const {
    for (const suite_result& s : suites)
      if (!s.pass()) return false;
    return !suites.empty();
  }
  std::string text() const {
    std::ostringstream os;
    for (const suite_result& s : suites) {
      char buf[64];
      std::snprintf(buf, sizeof buf, "%.3E", s.worst);
      os << (s.pass() ? "PASS" : "FAIL") << " " << s.name << ": " << s.checks
         << " checks, worst residual " << buf << " (tol " << s.tol << ")\n";
    }
    return os.str();
  }
};

inline verify_report run_verify(const run_config& cfg) {
  validate_config(cfg);
  verify_report rep;
  rep.suites.push_back(jump_algebra_suite(cfg.seed));
  rep.suites.push_back(manufactured_jump_suite(1.0, 1e4));
  rep.suites.push_back(manufactured_jump_suite(1e4, 1.0));
  rep.suites.push_back(sherman_morrison_suite(cfg.seed + 1));
  rep.suites.push_back(identity_suite(cfg.seed + 2));
  rep.suites.push_back(equivalence_suite());
  rep.suites.push_back(geometry_bound_suite(40, cfg.epsilon));
  rep.suites.push_back(geometry_bound_suite(80, cfg.epsilon));
  return rep;
}

// csv dumps of the finest-level artifacts
inline std::string dump_solution_csv(const run_artifacts& a) {
  const dof_map dofs = make_dof_map(a.mesh, a.tag);
  std::ostringstream os;
  os << "node,x,y,value\n";
  for (int i = 0; i < dofs.count(); ++i) {
    const vec2 p = dofs.point(i);
    os << i << "," << detail::sci(p.x()) << "," << detail::sci(p.y()) << ","
       << detail::sci(a.coeffs[i]) << "\n";
  }
  return os.str();
}

inline std::string dump_mesh_csv(const run_artifacts& a) {
  std::ostringstream os;
  os << "elem,kind,side,dx,dy,ex,ey,fx,fy\n";
  for (int e = 0; e < a.mesh.num_elems(); ++e) {
    if (a.cls.is_interface(e)) {
      const interface_element_data& d = a.cls.cut_of(e);
      os << e << ",interface,both," << detail::sci(d.d.x()) << "," << detail::sci(d.d.y()) << ","
         << detail::sci(d.e.x()) << "," << detail::sci(d.e.y()) << "," << detail::sci(d.f.x())
         << "," << detail::sci(d.f.y()) << "\n";
    } else {
      os << e << ",plain,"
         << (a.cls.classes[e].side == element_side::minus ? "minus" : "plus") << ",,,,,,\n";
    }
  }
  return os.str();
}

inline std::string dump_ife_csv(const run_artifacts& a) {
  std::ostringstream os;
  os << "elem,node,side,c0,c1,c2,c3\n";
  for (const ife_basis& b : a.bases)
    for (int i = 0; i < b.size(); ++i)
      for (element_side s : {element_side::minus, element_side::plus}) {
        const local_poly& p = b.piece(i, s);
        os << b.elem << "," << i << "," << (s == element_side::minus ? "minus" : "plus");
        for (int k = 0; k < 4; ++k) os << "," << detail::sci(p.c[k]);
        os << "\n";
      }
  return os.str();
}

}  // namespace ife
