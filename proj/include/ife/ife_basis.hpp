#pragma once

#include "ife/core.hpp"
#include "ife/geometry.hpp"
#include "ife/local_fe.hpp"
#include "ife/mesh.hpp"

#include <algorithm>
#include <vector>

namespace ife {

// Rank-one coupling system for one basis function: the unknown coefficients c
// on the non-expansion side satisfy (I + mu*delta*gamma^T) c = b, solved in
// closed form by the Sherman-Morrison identity. gamma, delta, b, c are indexed
// by the non-expansion node set; mu >= 0 after relabeling to contrast <= 1.
struct sm_system {
  Eigen::VectorXd gamma, delta, b, c;
  double mu = 0, denom = 1, c0 = 0;
  bool swapped = false;                 // true when beta_minus > beta_plus
  std::vector<int> expansion_nodes;    // local node ids on the large-coefficient side
  std::vector<int> other_nodes;        // local node ids carrying the unknowns
};

// Immersed basis on one cut element: per local node a pair of polynomials,
// one per side, continuous on the chord and with matched flux at f.
struct ife_basis {
  int elem = -1;
  poly_space_tag tag = poly_space_tag::q1;
  double beta_minus = 1, beta_plus = 1;
  interface_element_data data;
  std::vector<vec2> node_pts;
  std::vector<local_poly> piece_minus, piece_plus;
  std::vector<sm_system> systems;

  const local_poly& piece(int i, element_side s) const {
    return s == element_side::minus ? piece_minus[i] : piece_plus[i];
  }
  double eval(int i, const vec2& x, element_side s) const { return piece(i, s).eval(x); }
  vec2 grad(int i, const vec2& x, element_side s) const { return piece(i, s).grad(x); }
  int size() const { return int(piece_minus.size()); }
};

inline element_side side_of_level(double level) {
  return level <= 0 ? element_side::minus : element_side::plus;
}

inline double eval_ife(const ife_basis& b, int i, const vec2& x, const interface_curve& curve) {
  return b.eval(i, x, side_of_level(curve.level(x)));
}
inline vec2 grad_ife(const ife_basis& b, int i, const vec2& x, const interface_curve& curve) {
  return b.grad(i, x, side_of_level(curve.level(x)));
}

// family gates guaranteeing a bounded-away-from-zero coupling denominator
inline void check_unisolvence_preconditions(poly_space_tag tag, double rho, double kappa_bar,
                                            double lambda) {
  if (tag == poly_space_tag::q1) {
    if (std::sqrt(kappa_bar) >= 1.0 / (4.0 * std::sqrt(2.0)))
      throw config_error("bilinear family needs sqrt(kappa_bar) < 1/(4*sqrt(2)), i.e. kappa_bar < 0.03125");
  } else if (tag == poly_space_tag::rq1) {
    if (!(lambda > 0 && lambda < 1)) throw config_error("lambda must lie in (0,1)");
    double bound = rho * (1.0 - lambda) / (4.0 - (3.0 + lambda) * rho);
    if (std::sqrt(kappa_bar) > bound)
      throw config_error(
          "skew-harmonic family needs sqrt(kappa_bar) <= rho(1-lambda)/(4-(3+lambda)rho); "
          "reduce kappa_bar or the coefficient contrast");
  }
}

inline ife_basis build_ife_basis(const element_geometry& g, const interface_element_data& data,
                                 poly_space_tag tag, double beta_minus, double beta_plus,
                                 double kappa_bar = 0.031, double lambda = 0.5) {
  if (beta_minus <= 0 || beta_plus <= 0) throw config_error("diffusion coefficients must be positive");
  const double rho = std::min(beta_minus, beta_plus) / std::max(beta_minus, beta_plus);
  check_unisolvence_preconditions(tag, rho, kappa_bar, lambda);

  ife_basis basis;
  basis.elem = data.elem;
  basis.tag = tag;
  basis.beta_minus = beta_minus;
  basis.beta_plus = beta_plus;
  basis.data = data;
  basis.node_pts = nodes(g, tag);
  const int nd = int(basis.node_pts.size());

  std::vector<local_poly> psi = standard_shapes(g, tag);
  const local_frame frame = psi[0].frame;

  // relabel so the expanded side carries the larger coefficient; with the
  // matching sign flips of the normals every formula below sees contrast <= 1
  const bool swapped = beta_minus > beta_plus;
  const std::vector<int>& exp_nodes = swapped ? data.i_minus : data.i_plus;
  const std::vector<int>& oth_nodes = swapped ? data.i_plus : data.i_minus;
  const double sgn = swapped ? -1.0 : 1.0;
  const vec2 nf = sgn * data.nf;
  const vec2 nbar = sgn * data.cut.n_bar;
  const int m = int(oth_nodes.size());

  const double ndot = data.cut.n_bar.dot(data.nf);
  if (ndot <= 0) throw geometry_error("chord normal opposes interface normal at the flux point");
  const double mu = (1.0 / rho - 1.0) / ndot;

  // chord functional with the relabeled orientation, as a polynomial
  local_poly lpoly = affine_poly(frame, tag, nbar, data.cut.d);

  Eigen::VectorXd gamma(m), delta(m);
  for (int k = 0; k < m; ++k) {
    gamma[k] = psi[oth_nodes[k]].grad(data.f).dot(nf);
    delta[k] = lpoly.eval(basis.node_pts[oth_nodes[k]]);
  }
  const double denom = 1.0 + mu * gamma.dot(delta);
  if (std::abs(denom) < 1e-8) throw unisolvence_error(denom);

  // the rank-one solve collapses: with wj the flux of the j-th standard shape
  // at f, c = e_j - (mu/denom) wj delta and c0 = (mu/denom) wj, so scaling by
  // mu/denom (bounded as the contrast grows) keeps every intermediate at the
  // size of the result instead of letting mu-sized terms cancel
  const double scale = mu / denom;

  // chord-weighted ridge over the unknown-side shapes, shared by all j
  local_poly ridge = zero_poly(frame, tag);
  for (int k = 0; k < m; ++k) ridge.axpy(delta[k], psi[oth_nodes[k]]);

  for (int j = 0; j < nd; ++j) {
    sm_system sys;
    sys.swapped = swapped;
    sys.expansion_nodes = exp_nodes;
    sys.other_nodes = oth_nodes;
    sys.mu = mu;
    sys.gamma = gamma;
    sys.delta = delta;
    sys.denom = denom;

    const double wj = psi[j].grad(data.f).dot(nf);
    const double coupling = scale * wj;
    // flux of the prescribed expansion-side part at f
    const bool j_exp = std::find(exp_nodes.begin(), exp_nodes.end(), j) != exp_nodes.end();
    const double w = j_exp ? wj : 0.0;
    Eigen::VectorXd b(m);
    for (int k = 0; k < m; ++k) b[k] = (oth_nodes[k] == j ? 1.0 : 0.0) - mu * w * delta[k];
    Eigen::VectorXd c(m);
    for (int k = 0; k < m; ++k) c[k] = (oth_nodes[k] == j ? 1.0 : 0.0) - coupling * delta[k];
    sys.b = b;
    sys.c = c;
    sys.c0 = coupling;

    // expansion-side polynomial: prescribed values on the expansion nodes,
    // solved coefficients on the others
    local_poly pe = psi[j];
    pe.axpy(-coupling, ridge);
    local_poly po = pe;
    po.axpy(coupling, lpoly);

    if (swapped) {
      basis.piece_minus.push_back(pe);
      basis.piece_plus.push_back(po);
    } else {
      basis.piece_minus.push_back(po);
      basis.piece_plus.push_back(pe);
    }
    basis.systems.push_back(std::move(sys));
  }
  return basis;
}

// Residuals of the exact position-reproduction identities: on each side the
// weighted node positions reproduce X (value identity) and the coordinate
// directions (derivative identities), after the chord-coupling correction of
// the opposite-side nodes. xbar are arbitrary points on the chord line.
struct lambda_result {
  vec2 value;
  vec2 dx, dy;
  double max_abs() const {
    return std::max({value.cwiseAbs().maxCoeff(), dx.cwiseAbs().maxCoeff(),
                     dy.cwiseAbs().maxCoeff()});
  }
};

inline lambda_result lambda_residual(const ife_basis& basis, const vec2& x, element_side side,
                                     const std::vector<vec2>* xbar = nullptr) {
  const double rho = basis.beta_minus / basis.beta_plus;
  auto [mbar_minus, mbar_plus] = line_jump_matrices(basis.data.cut.n_bar, basis.data.nf, rho);
  const mat2 corr =
      ((side == element_side::plus ? mbar_plus : mbar_minus) - mat2::Identity()).transpose();
  const std::vector<int>& opp =
      side == element_side::plus ? basis.data.i_minus : basis.data.i_plus;

  lambda_result r;
  r.value = vec2::Zero();
  r.dx = -vec2(1, 0);
  r.dy = -vec2(0, 1);
  for (int i = 0; i < basis.size(); ++i) {
    const vec2 mi = basis.node_pts[i];
    const double phi = basis.eval(i, x, side);
    const vec2 gphi = basis.grad(i, x, side);
    r.value += (mi - x) * phi;
    r.dx += (mi - x) * gphi.x();
    r.dy += (mi - x) * gphi.y();
  }
  for (int i : opp) {
    const vec2 xb = xbar ? (*xbar)[i] : basis.data.cut.d;
    const vec2 w = corr * (basis.node_pts[i] - xb);
    r.value += w * basis.eval(i, x, side);
    const vec2 gphi = basis.grad(i, x, side);
    r.dx += w * gphi.x();
    r.dy += w * gphi.y();
  }
  return r;
}

}  // namespace ife
