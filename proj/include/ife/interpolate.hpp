#pragma once

#include "ife/core.hpp"
#include "ife/geometry.hpp"
#include "ife/ife_basis.hpp"
#include "ife/local_fe.hpp"
#include "ife/mesh.hpp"
#include "ife/quadrature.hpp"

#include <utility>
#include <vector>

namespace ife {

// global degrees of freedom: mesh vertices for the vertex families, edge
// midpoints for the nonconforming ones
struct dof_map {
  const cartesian_mesh* mesh = nullptr;
  poly_space_tag tag = poly_space_tag::q1;

  int count() const {
    return midpoint_dofs(tag) ? int(mesh->edges.size()) : int(mesh->vertices.size());
  }
  int operator()(int elem, int local) const {
    return midpoint_dofs(tag) ? mesh->elem_edges[elem][local] : mesh->elems[elem][local];
  }
  vec2 point(int dof) const {
    if (!midpoint_dofs(tag)) return mesh->vertices[dof];
    const mesh_edge& e = mesh->edges[dof];
    return vec2(0.5 * (mesh->vertices[e.v0] + mesh->vertices[e.v1]));
  }
  bool on_boundary(int dof) const {
    return midpoint_dofs(tag) ? mesh->edge_on_boundary(dof) : mesh->vertex_on_boundary(dof);
  }
};

inline dof_map make_dof_map(const cartesian_mesh& mesh, poly_space_tag tag) {
  if (mesh.kind != required_kind(tag))
    throw config_error("element family incompatible with mesh kind");
  return dof_map{&mesh, tag};
}

inline std::vector<ife_basis> build_all_bases(const cartesian_mesh& mesh,
                                              const classification_result& cls,
                                              poly_space_tag tag, double beta_minus,
                                              double beta_plus, double kappa_bar = 0.031,
                                              double lambda = 0.5) {
  std::vector<ife_basis> bases;
  bases.reserve(cls.cuts.size());
  for (const interface_element_data& data : cls.cuts)
    bases.push_back(
        build_ife_basis(mesh.geom(data.elem), data, tag, beta_minus, beta_plus, kappa_bar, lambda));
  return bases;
}

// nodal interpolant: one coefficient per global node, u(M) with the side of M
inline Eigen::VectorXd interpolate(const interface_curve& curve, const dof_map& dofs,
                                   const scalar_fn& u_minus, const scalar_fn& u_plus) {
  Eigen::VectorXd v(dofs.count());
  for (int i = 0; i < dofs.count(); ++i) {
    const vec2 p = dofs.point(i);
    v[i] = curve.level(p) <= 0 ? u_minus(p) : u_plus(p);
  }
  return v;
}

// coefficients combined into one polynomial pair per element, so pointwise
// evaluation in norms is a single polynomial evaluation
class fe_field : public discrete_field {
 public:
  fe_field(const cartesian_mesh& mesh, const classification_result& cls,
           const std::vector<ife_basis>& bases, const dof_map& dofs, const Eigen::VectorXd& u) {
    const int nd = dof_count(dofs.tag);
    pm_.resize(mesh.num_elems());
    pp_.resize(mesh.num_elems());
    for (int e = 0; e < mesh.num_elems(); ++e) {
      if (cls.is_interface(e)) {
        const ife_basis& b = bases[cls.classes[e].cut_index];
        local_poly m = zero_poly(b.piece_minus[0].frame, dofs.tag);
        local_poly p = m;
        for (int k = 0; k < nd; ++k) {
          const double uk = u[dofs(e, k)];
          m.axpy(uk, b.piece_minus[k]);
          p.axpy(uk, b.piece_plus[k]);
        }
        pm_[e] = m;
        pp_[e] = p;
      } else {
        std::vector<local_poly> psi = standard_shapes(mesh.geom(e), dofs.tag);
        local_poly q = zero_poly(psi[0].frame, dofs.tag);
        for (int k = 0; k < nd; ++k) q.axpy(u[dofs(e, k)], psi[k]);
        pm_[e] = q;
        pp_[e] = q;
      }
    }
  }

  double value(int elem, element_side s, const vec2& x) const override {
    return (s == element_side::minus ? pm_[elem] : pp_[elem]).eval(x);
  }
  vec2 gradient(int elem, element_side s, const vec2& x) const override {
    return (s == element_side::minus ? pm_[elem] : pp_[elem]).grad(x);
  }

  const local_poly& piece(int elem, element_side s) const {
    return s == element_side::minus ? pm_[elem] : pp_[elem];
  }

 private:
  std::vector<local_poly> pm_, pp_;
};

}  // namespace ife
