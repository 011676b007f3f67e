#pragma once

#include "ife/core.hpp"
#include "ife/gauss.hpp"
#include "ife/geometry.hpp"
#include "ife/ife_basis.hpp"
#include "ife/interpolate.hpp"
#include "ife/local_fe.hpp"
#include "ife/mesh.hpp"
#include "ife/quadrature.hpp"

#include <algorithm>
#include <map>
#include <tuple>
#include <vector>

namespace ife {

struct csr_matrix {
  int n = 0;
  std::vector<int> row_offsets, col_indices;
  std::vector<double> values;

  Eigen::VectorXd apply(const Eigen::VectorXd& x) const {
    Eigen::VectorXd y = Eigen::VectorXd::Zero(n);
    for (int i = 0; i < n; ++i)
      for (int k = row_offsets[i]; k < row_offsets[i + 1]; ++k)
        y[i] += values[k] * x[col_indices[k]];
    return y;
  }

  double coeff(int i, int j) const {
    for (int k = row_offsets[i]; k < row_offsets[i + 1]; ++k)
      if (col_indices[k] == j) return values[k];
    return 0.0;
  }

  Eigen::VectorXd diagonal() const {
    Eigen::VectorXd d(n);
    for (int i = 0; i < n; ++i) d[i] = coeff(i, i);
    return d;
  }

  double max_asymmetry() const {
    double worst = 0;
    for (int i = 0; i < n; ++i)
      for (int k = row_offsets[i]; k < row_offsets[i + 1]; ++k)
        worst = std::max(worst, std::abs(values[k] - coeff(col_indices[k], i)));
    return worst;
  }

  double max_abs() const {
    double m = 0;
    for (double v : values) m = std::max(m, std::abs(v));
    return m;
  }
};

inline csr_matrix csr_from_triplets(int n, std::vector<std::tuple<int, int, double>>& trips) {
  std::sort(trips.begin(), trips.end(), [](const auto& a, const auto& b) {
    return std::get<0>(a) != std::get<0>(b) ? std::get<0>(a) < std::get<0>(b)
                                            : std::get<1>(a) < std::get<1>(b);
  });
  csr_matrix m;
  m.n = n;
  m.row_offsets.assign(n + 1, 0);
  int last_i = -1, last_j = -1;
  for (const auto& [i, j, v] : trips) {
    if (i == last_i && j == last_j) {
      m.values.back() += v;
    } else {
      m.col_indices.push_back(j);
      m.values.push_back(v);
      ++m.row_offsets[i + 1];
      last_i = i;
      last_j = j;
    }
  }
  for (int i = 0; i < n; ++i) m.row_offsets[i + 1] += m.row_offsets[i];
  return m;
}

struct penalty_params {
  double sigma = 0;       // penalty weight, scaled by 1/|e|
  int epsilon_flag = -1;  // -1 symmetric, 0 incomplete, +1 nonsymmetric
};

// assembled system on the free (non-Dirichlet) degrees of freedom
struct sparse_system {
  csr_matrix matrix;
  Eigen::VectorXd rhs;
  std::vector<int> free_of_global;   // -1 for eliminated dofs
  std::vector<int> global_of_free;
  Eigen::VectorXd dirichlet_values;  // full-length, zero on free dofs

  Eigen::VectorXd expand(const Eigen::VectorXd& xfree) const {
    Eigen::VectorXd full = dirichlet_values;
    for (int k = 0; k < int(global_of_free.size()); ++k) full[global_of_free[k]] = xfree[k];
    return full;
  }
};

struct cg_result {
  Eigen::VectorXd x;
  int iterations = 0;
  double residual = 0;
};

// Jacobi-preconditioned conjugate gradients, relative residual tolerance
inline cg_result cg_solve(const csr_matrix& a, const Eigen::VectorXd& b, double tol = 1e-10,
                          int max_iter = -1) {
  const int n = a.n;
  if (max_iter < 0) max_iter = 20 * std::max(n, 1);
  cg_result out;
  out.x = Eigen::VectorXd::Zero(n);
  const double bnorm = b.norm();
  if (bnorm == 0) return out;

  Eigen::VectorXd dinv = a.diagonal();
  for (int i = 0; i < n; ++i) dinv[i] = dinv[i] != 0 ? 1.0 / dinv[i] : 1.0;

  Eigen::VectorXd r = b;
  Eigen::VectorXd z = dinv.cwiseProduct(r);
  Eigen::VectorXd p = z;
  double rz = r.dot(z);
  for (int it = 1; it <= max_iter; ++it) {
    Eigen::VectorXd ap = a.apply(p);
    const double alpha = rz / p.dot(ap);
    out.x += alpha * p;
    r -= alpha * ap;
    out.residual = r.norm() / bnorm;
    out.iterations = it;
    if (out.residual <= tol) return out;
    z = dinv.cwiseProduct(r);
    const double rz_new = r.dot(z);
    p = z + (rz_new / rz) * p;
    rz = rz_new;
  }
  throw convergence_error(out.residual, out.iterations);
}

namespace detail {

// per-element trial/test polynomials, one per side
struct element_shapes {
  std::vector<local_poly> minus, plus;
};

inline element_shapes shapes_for(const cartesian_mesh& mesh, const classification_result& cls,
                                 const std::vector<ife_basis>& bases, poly_space_tag tag, int e) {
  element_shapes s;
  if (cls.is_interface(e)) {
    const ife_basis& b = bases[cls.classes[e].cut_index];
    s.minus = b.piece_minus;
    s.plus = b.piece_plus;
  } else {
    s.minus = standard_shapes(mesh.geom(e), tag);
    s.plus = s.minus;
  }
  return s;
}

}  // namespace detail

// bilinear form: elementwise beta-weighted stiffness, plus consistency,
// adjoint-consistency and penalty terms on the interior edges crossed by the
// interface; strong Dirichlet elimination unless disabled
inline sparse_system assemble(const cartesian_mesh& mesh, const classification_result& cls,
                              const std::vector<ife_basis>& bases, const interface_curve& curve,
                              poly_space_tag tag, double beta_minus, double beta_plus,
                              const penalty_params& penalty, const scalar_fn& f,
                              const scalar_fn& g, int degree = 5, bool impose_dirichlet = true) {
  if (penalty.epsilon_flag == -1 && penalty.sigma <= 0)
    throw config_error("the symmetric scheme needs a positive penalty");
  const dof_map dofs = make_dof_map(mesh, tag);
  const int nd = dof_count(tag);
  const int ndof = dofs.count();
  auto beta_of = [&](element_side s) { return s == element_side::minus ? beta_minus : beta_plus; };

  std::vector<std::tuple<int, int, double>> trips;
  trips.reserve(size_t(mesh.num_elems()) * nd * nd + 64 * cls.interface_elems.size());
  Eigen::VectorXd load = Eigen::VectorXd::Zero(ndof);

  // volume terms
  for (int e = 0; e < mesh.num_elems(); ++e) {
    detail::element_shapes sh = detail::shapes_for(mesh, cls, bases, tag, e);
    element_geometry geo = mesh.geom(e);
    Eigen::MatrixXd ke = Eigen::MatrixXd::Zero(nd, nd);
    Eigen::VectorXd fe = Eigen::VectorXd::Zero(nd);

    auto add_side = [&](element_side s, auto&& integrator) {
      const double beta = beta_of(s);
      const std::vector<local_poly>& p = s == element_side::minus ? sh.minus : sh.plus;
      for (int i = 0; i < nd; ++i) {
        for (int j = i; j < nd; ++j)
          ke(i, j) += beta * integrator([&](const vec2& x) { return p[i].grad(x).dot(p[j].grad(x)); });
        fe[i] += integrator([&](const vec2& x) { return f(x) * p[i].eval(x); });
      }
    };

    if (cls.is_interface(e)) {
      auto [rm, rp] = curved_subelements(geo, cls.cut_of(e), curve);
      add_side(element_side::minus, [&](auto&& fn) { return integrate(rm, fn, degree); });
      add_side(element_side::plus, [&](auto&& fn) { return integrate(rp, fn, degree); });
    } else {
      add_side(cls.classes[e].side, [&](auto&& fn) { return integrate_element(geo, fn, degree); });
    }

    for (int i = 0; i < nd; ++i) {
      const int gi = dofs(e, i);
      load[gi] += fe[i];
      for (int j = i; j < nd; ++j) {
        trips.emplace_back(gi, dofs(e, j), ke(i, j));
        if (j > i) trips.emplace_back(dofs(e, j), gi, ke(i, j));
      }
    }
  }

  // edge terms on interior edges crossed by the interface
  const quad_rule1d rule = gauss_legendre01(5);
  for (int ge = 0; ge < int(mesh.edges.size()); ++ge) {
    if (cls.edge_cuts[ge].count == 0) continue;
    const mesh_edge& me = mesh.edges[ge];
    if (me.elem[1] < 0) continue;

    const int el = me.elem[0], er = me.elem[1];
    element_geometry gl = mesh.geom(el);
    const vec2 a = gl.v[me.local[0]];
    const vec2 b = gl.v[(me.local[0] + 1) % gl.n];
    const double len = (b - a).norm();
    const vec2 ne((b - a).y() / len, -(b - a).x() / len);  // outward from the first element

    // split parameters at the crossings
    std::vector<double> ts{0.0, 1.0};
    for (int q = 0; q < cls.edge_cuts[ge].count; ++q)
      ts.push_back((cls.edge_cuts[ge].p[q] - a).dot(b - a) / (len * len));
    std::sort(ts.begin(), ts.end());

    detail::element_shapes shl = detail::shapes_for(mesh, cls, bases, tag, el);
    detail::element_shapes shr = detail::shapes_for(mesh, cls, bases, tag, er);

    // local dof union across the two elements
    std::vector<int> gdof;
    std::vector<std::pair<int, int>> locl, locr;  // (union index, element-local index)
    auto union_index = [&](int gid) {
      for (int k = 0; k < int(gdof.size()); ++k)
        if (gdof[k] == gid) return k;
      gdof.push_back(gid);
      return int(gdof.size()) - 1;
    };
    for (int k = 0; k < nd; ++k) locl.emplace_back(union_index(dofs(el, k)), k);
    for (int k = 0; k < nd; ++k) locr.emplace_back(union_index(dofs(er, k)), k);
    const int nu = int(gdof.size());
    Eigen::MatrixXd ae = Eigen::MatrixXd::Zero(nu, nu);

    for (size_t seg = 0; seg + 1 < ts.size(); ++seg) {
      const double t0 = std::clamp(ts[seg], 0.0, 1.0), t1 = std::clamp(ts[seg + 1], 0.0, 1.0);
      if (t1 - t0 < 1e-12) continue;
      const vec2 mid = a + 0.5 * (t0 + t1) * (b - a);
      const element_side sl =
          cls.is_interface(el) ? side_of_level(curve.level(mid)) : cls.classes[el].side;
      const element_side sr =
          cls.is_interface(er) ? side_of_level(curve.level(mid)) : cls.classes[er].side;
      const std::vector<local_poly>& pl = sl == element_side::minus ? shl.minus : shl.plus;
      const std::vector<local_poly>& pr = sr == element_side::minus ? shr.minus : shr.plus;

      for (int q = 0; q < rule.size(); ++q) {
        const vec2 x = a + (t0 + rule.x[q] * (t1 - t0)) * (b - a);
        const double w = rule.w[q] * (t1 - t0) * len;

        Eigen::VectorXd jump = Eigen::VectorXd::Zero(nu);   // value jump across the edge
        Eigen::VectorXd flux = Eigen::VectorXd::Zero(nu);   // average normal flux
        for (const auto& [ui, k] : locl) {
          jump[ui] += pl[k].eval(x);
          flux[ui] += 0.5 * beta_of(sl) * pl[k].grad(x).dot(ne);
        }
        for (const auto& [ui, k] : locr) {
          jump[ui] -= pr[k].eval(x);
          flux[ui] += 0.5 * beta_of(sr) * pr[k].grad(x).dot(ne);
        }

        for (int i = 0; i < nu; ++i)
          for (int j = 0; j < nu; ++j)
            ae(i, j) += w * (-flux[j] * jump[i] + penalty.epsilon_flag * flux[i] * jump[j] +
                             (penalty.sigma / len) * jump[i] * jump[j]);
      }
    }

    for (int i = 0; i < nu; ++i)
      for (int j = 0; j < nu; ++j)
        if (ae(i, j) != 0) trips.emplace_back(gdof[i], gdof[j], ae(i, j));
  }

  // Dirichlet elimination
  sparse_system sys;
  sys.free_of_global.assign(ndof, -1);
  sys.dirichlet_values = Eigen::VectorXd::Zero(ndof);
  for (int i = 0; i < ndof; ++i) {
    if (impose_dirichlet && dofs.on_boundary(i)) {
      sys.dirichlet_values[i] = g(dofs.point(i));
    } else {
      sys.free_of_global[i] = int(sys.global_of_free.size());
      sys.global_of_free.push_back(i);
    }
  }
  const int nfree = int(sys.global_of_free.size());
  sys.rhs = Eigen::VectorXd::Zero(nfree);
  for (int k = 0; k < nfree; ++k) sys.rhs[k] = load[sys.global_of_free[k]];

  std::vector<std::tuple<int, int, double>> free_trips;
  free_trips.reserve(trips.size());
  for (const auto& [i, j, v] : trips) {
    const int fi = sys.free_of_global[i];
    if (fi < 0) continue;
    const int fj = sys.free_of_global[j];
    if (fj < 0)
      sys.rhs[fi] -= v * sys.dirichlet_values[j];
    else
      free_trips.emplace_back(fi, fj, v);
  }
  sys.matrix = csr_from_triplets(nfree, free_trips);

  if (penalty.epsilon_flag == -1) {
    const double scale = std::max(sys.matrix.max_abs(), 1.0);
    if (sys.matrix.max_asymmetry() > 1e-10 * scale)
      throw solver_error("symmetric scheme assembled a non-symmetric matrix");
  }
  return sys;
}

struct solve_result {
  Eigen::VectorXd u;  // full nodal vector, Dirichlet values included
  int iterations = 0;
  double residual = 0;
};

inline solve_result solve_interface_problem(const cartesian_mesh& mesh,
                                            const classification_result& cls,
                                            const std::vector<ife_basis>& bases,
                                            const interface_curve& curve, poly_space_tag tag,
                                            double beta_minus, double beta_plus,
                                            const penalty_params& penalty, const scalar_fn& f,
                                            const scalar_fn& g, int degree = 5,
                                            double tol = 1e-10) {
  sparse_system sys = assemble(mesh, cls, bases, curve, tag, beta_minus, beta_plus, penalty, f, g,
                               degree, true);
  cg_result cg = cg_solve(sys.matrix, sys.rhs, tol);
  solve_result out;
  out.u = sys.expand(cg.x);
  out.iterations = cg.iterations;
  out.residual = cg.residual;
  return out;
}

}  // namespace ife
