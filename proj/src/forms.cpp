#include "gbhe/forms.hpp"

#include <algorithm>
#include <cmath>
#include <stdexcept>

#include "gbhe/quadrature.hpp"

namespace gbhe {

void ModelParams::validate() const {
  if (!(nu > 0.0)) throw std::invalid_argument("nu must be positive");
  if (!(alpha >= 0.0)) throw std::invalid_argument("alpha must be non-negative");
  if (!(beta >= 0.0)) throw std::invalid_argument("beta must be non-negative");
  if (!(reaction_gamma > 0.0 && reaction_gamma < 1.0)) throw std::invalid_argument("reaction gamma must lie in (0,1)");
  if (delta < 1) throw std::invalid_argument("delta must be an integer >= 1");
  if (!(eta >= 0.0)) throw std::invalid_argument("eta must be non-negative");
  if (!(penalty_gamma > 0.0)) throw std::invalid_argument("penalty gamma must be positive");
}

double reaction_value(double u, const ModelParams& p) {
  const double ud = ipow(u, p.delta);
  return u * (1.0 - ud) * (ud - p.reaction_gamma);
}

double reaction_derivative(double u, const ModelParams& p) {
  const double ud = ipow(u, p.delta);
  return (1.0 + p.reaction_gamma) * (p.delta + 1) * ud - p.reaction_gamma - (2 * p.delta + 1) * ud * ud;
}

namespace {

using Block = std::array<std::array<double, 3>, 3>;

void add_block(SparseMatrix& m, const Space::BlockPositions& pos, const Block& block) {
  auto& v = m.values();
  for (std::size_t i = 0; i < 3; ++i) {
    for (std::size_t j = 0; j < 3; ++j) v[pos[i][j]] += block[i][j];
  }
}

// Block positions of (rows of side a, cols of side b) on an edge; side 0 is plus.
const Space::BlockPositions& side_block(const Space& space, const EdgeTraceContext& ctx, std::size_t a, std::size_t b) {
  if (a == b) return space.cell_block(static_cast<std::size_t>(a == 0 ? ctx.plus : ctx.minus));
  return space.face_blocks(ctx.edge)[a];
}

}  // namespace

SparseMatrix assemble_mass(const Space& space) {
  SparseMatrix m(space.pattern());
  const auto& rule = triangle_rule(2);
  for (std::size_t c = 0; c < space.mesh().num_cells(); ++c) {
    const double det = 2.0 * space.cell(c).area;
    Block b{};
    for (std::size_t q = 0; q < rule.points.size(); ++q) {
      const auto phi = space.basis_values(rule.points[q]);
      for (std::size_t i = 0; i < 3; ++i) {
        for (std::size_t j = 0; j < 3; ++j) b[i][j] += det * rule.weights[q] * phi[i] * phi[j];
      }
    }
    add_block(m, space.cell_block(c), b);
  }
  return m;
}

SparseMatrix assemble_broken_stiffness(const Space& space) {
  SparseMatrix m(space.pattern());
  for (std::size_t c = 0; c < space.mesh().num_cells(); ++c) {
    const auto g = space.basis_gradients(c);
    const double area = space.cell(c).area;
    Block b{};
    for (std::size_t i = 0; i < 3; ++i) {
      for (std::size_t j = 0; j < 3; ++j) b[i][j] = area * dot(g[i], g[j]);
    }
    add_block(m, space.cell_block(c), b);
  }
  return m;
}

SparseMatrix assemble_stiffness_cr(const Space& space) {
  if (space.kind() != SpaceKind::CR) throw std::invalid_argument("assemble_stiffness_cr: not a CR space");
  return assemble_broken_stiffness(space);
}

SparseMatrix assemble_stiffness_dg(const Space& space, double penalty_gamma) {
  if (space.kind() != SpaceKind::DG) throw std::invalid_argument("assemble_stiffness_dg: not a DG space");
  SparseMatrix m = assemble_broken_stiffness(space);
  for (const auto& ctx : space.edge_contexts(2)) {
    const double gh = penalty_coeff(ctx, penalty_gamma);
    const auto plus = static_cast<std::size_t>(ctx.plus);
    const auto gp = space.basis_gradients(plus);
    if (ctx.is_boundary()) {
      Block b{};
      for (std::size_t q = 0; q < ctx.weights.size(); ++q) {
        const auto phi = space.basis_values(ctx.plus_points[q]);
        const double w = ctx.weights[q];
        for (std::size_t i = 0; i < 3; ++i) {
          for (std::size_t j = 0; j < 3; ++j) {
            b[i][j] += w * (-dot(gp[j], ctx.normal) * phi[i] - dot(gp[i], ctx.normal) * phi[j] + gh * phi[i] * phi[j]);
          }
        }
      }
      add_block(m, space.cell_block(plus), b);
      continue;
    }
    const auto minus = static_cast<std::size_t>(ctx.minus);
    const auto gm = space.basis_gradients(minus);
    const std::array<double, 2> sign{1.0, -1.0};
    const std::array<const std::array<Vec2, 3>*, 2> grads{&gp, &gm};
    for (std::size_t a = 0; a < 2; ++a) {
      for (std::size_t bside = 0; bside < 2; ++bside) {
        Block b{};
        for (std::size_t q = 0; q < ctx.weights.size(); ++q) {
          const auto phi_a = space.basis_values(a == 0 ? ctx.plus_points[q] : ctx.minus_points[q]);
          const auto phi_b = space.basis_values(bside == 0 ? ctx.plus_points[q] : ctx.minus_points[q]);
          const double w = ctx.weights[q];
          for (std::size_t i = 0; i < 3; ++i) {
            for (std::size_t j = 0; j < 3; ++j) {
              const double dn_j = dot((*grads[bside])[j], ctx.normal);
              const double dn_i = dot((*grads[a])[i], ctx.normal);
              b[i][j] += w * (-0.5 * dn_j * sign[a] * phi_a[i] - 0.5 * dn_i * sign[bside] * phi_b[j] +
                              gh * sign[a] * sign[bside] * phi_a[i] * phi_b[j]);
            }
          }
        }
        add_block(m, side_block(space, ctx, a, bside), b);
      }
    }
  }
  return m;
}

std::vector<double> dirichlet_load_dg(const Space& space, const SpatialFunction& g, double penalty_gamma) {
  if (space.kind() != SpaceKind::DG) throw std::invalid_argument("dirichlet_load_dg: not a DG space");
  std::vector<double> b(space.size(), 0.0);
  for (const auto& ctx : space.edge_contexts(5)) {
    if (!ctx.is_boundary()) continue;
    const double gh = penalty_coeff(ctx, penalty_gamma);
    const auto c = static_cast<std::size_t>(ctx.plus);
    const auto grads = space.basis_gradients(c);
    const auto& d = space.dofs().cell_dofs[c];
    for (std::size_t q = 0; q < ctx.weights.size(); ++q) {
      const double gq = g(ctx.points[q]);
      const auto phi = space.basis_values(ctx.plus_points[q]);
      for (std::size_t i = 0; i < 3; ++i) {
        b[static_cast<std::size_t>(d[i])] += ctx.weights[q] * gq * (-dot(grads[i], ctx.normal) + gh * phi[i]);
      }
    }
  }
  return b;
}

namespace {

// Volume part of the skew-symmetrized convection shared by both schemes:
// c [ (u^d s(u), phi_i) - (u^{d+1}, s(phi_i)) ] with s(v) = dv/dx + dv/dy.
void convection_volume(const Space& space, std::span<const double> u, const ModelParams& p, NonlinearTerm& out) {
  const double scale = p.alpha / (p.delta + 2);
  const int d = p.delta;
  const auto& rule = triangle_rule(nonlinear_quadrature_degree(d));
  for (std::size_t c = 0; c < space.mesh().num_cells(); ++c) {
    const auto& dofs = space.dofs().cell_dofs[c];
    const auto g = space.basis_gradients(c);
    const double det = 2.0 * space.cell(c).area;
    std::array<double, 3> s{};
    std::array<double, 3> ul{};
    double su = 0.0;
    for (std::size_t i = 0; i < 3; ++i) {
      s[i] = g[i].x + g[i].y;
      ul[i] = u[static_cast<std::size_t>(dofs[i])];
      su += ul[i] * s[i];
    }
    std::array<double, 3> r{};
    Block jac{};
    for (std::size_t q = 0; q < rule.points.size(); ++q) {
      const auto phi = space.basis_values(rule.points[q]);
      const double uq = ul[0] * phi[0] + ul[1] * phi[1] + ul[2] * phi[2];
      const double ud1 = ipow(uq, d - 1);
      const double ud = ud1 * uq;
      const double w = det * rule.weights[q] * scale;
      for (std::size_t i = 0; i < 3; ++i) {
        r[i] += w * (ud * su * phi[i] - ud * uq * s[i]);
        for (std::size_t j = 0; j < 3; ++j) {
          jac[i][j] += w * (d * ud1 * phi[j] * su * phi[i] + ud * s[j] * phi[i] - (d + 1) * ud * phi[j] * s[i]);
        }
      }
    }
    for (std::size_t i = 0; i < 3; ++i) out.residual[static_cast<std::size_t>(dofs[i])] += r[i];
    add_block(out.jacobian, space.cell_block(c), jac);
  }
}

}  // namespace

NonlinearTerm convection_cr(const Space& space, std::span<const double> u, const ModelParams& params) {
  if (space.kind() != SpaceKind::CR) throw std::invalid_argument("convection_cr: not a CR space");
  NonlinearTerm out{std::vector<double>(space.size(), 0.0), SparseMatrix(space.pattern())};
  convection_volume(space, u, params, out);
  return out;
}

NonlinearTerm convection_dg(const Space& space, std::span<const double> u, const ModelParams& params,
                            const SpatialFunction& boundary) {
  if (space.kind() != SpaceKind::DG) throw std::invalid_argument("convection_dg: not a DG space");
  NonlinearTerm out{std::vector<double>(space.size(), 0.0), SparseMatrix(space.pattern())};
  convection_volume(space, u, params, out);

  const double scale = params.alpha / (params.delta + 2);
  const int d = params.delta;
  const auto& cell_dofs = space.dofs().cell_dofs;
  for (const auto& ctx : space.edge_contexts(nonlinear_quadrature_degree(d))) {
    const std::array<std::size_t, 2> cells{static_cast<std::size_t>(ctx.plus),
                                           static_cast<std::size_t>(ctx.is_boundary() ? ctx.plus : ctx.minus)};
    const std::size_t n_sides = ctx.is_boundary() ? 1 : 2;
    std::array<std::array<double, 3>, 2> res{};
    std::array<std::array<Block, 2>, 2> jac{};  // jac[a][b]: rows of side a, cols of side b
    bool touched = false;
    for (std::size_t q = 0; q < ctx.weights.size(); ++q) {
      const double w = scale * ctx.weights[q];
      std::array<std::array<double, 3>, 2> phi{};
      std::array<double, 2> tr{};
      phi[0] = space.basis_values(ctx.plus_points[q]);
      tr[0] = space.evaluate(u, cells[0], ctx.plus_points[q]);
      if (ctx.is_boundary()) {
        tr[1] = boundary ? boundary(ctx.points[q]) : 0.0;
      } else {
        phi[1] = space.basis_values(ctx.minus_points[q]);
        tr[1] = space.evaluate(u, cells[1], ctx.minus_points[q]);
      }
      // Side s sees its own trace, the other trace and outward normal n_s; the
      // upwind factor min(u_s^d n_s.(1,1), 0) vanishes on outflow.
      for (std::size_t s = 0; s < n_sides; ++s) {
        const std::size_t o = 1 - s;
        const double cn = (s == 0 ? 1.0 : -1.0) * (ctx.normal.x + ctx.normal.y);
        const double m = ipow(tr[s], d) * cn;
        if (m >= 0.0) continue;
        touched = true;
        const double mp = d * ipow(tr[s], d - 1) * cn;
        const auto& ps = phi[s];
        const auto& po = phi[o];
        for (std::size_t i = 0; i < 3; ++i) {
          res[s][i] += w * m * tr[o] * ps[i];
          for (std::size_t j = 0; j < 3; ++j) jac[s][s][i][j] += w * mp * ps[j] * tr[o] * ps[i];
          if (ctx.is_boundary()) continue;
          res[o][i] -= w * m * tr[s] * po[i];
          for (std::size_t j = 0; j < 3; ++j) {
            jac[s][o][i][j] += w * m * po[j] * ps[i];
            jac[o][s][i][j] -= w * (mp * tr[s] + m) * ps[j] * po[i];
          }
        }
      }
    }
    if (!touched) continue;
    for (std::size_t a = 0; a < n_sides; ++a) {
      const auto& dofs = cell_dofs[cells[a]];
      for (std::size_t i = 0; i < 3; ++i) out.residual[static_cast<std::size_t>(dofs[i])] += res[a][i];
      for (std::size_t b = 0; b < n_sides; ++b) add_block(out.jacobian, side_block(space, ctx, a, b), jac[a][b]);
    }
  }
  return out;
}

NonlinearTerm convection(const Space& space, std::span<const double> u, const ModelParams& params,
                         const SpatialFunction& boundary) {
  return space.kind() == SpaceKind::CR ? convection_cr(space, u, params) : convection_dg(space, u, params, boundary);
}

NonlinearTerm reaction(const Space& space, std::span<const double> u, const ModelParams& params) {
  NonlinearTerm out{std::vector<double>(space.size(), 0.0), SparseMatrix(space.pattern())};
  const auto& rule = triangle_rule(nonlinear_quadrature_degree(params.delta));
  for (std::size_t c = 0; c < space.mesh().num_cells(); ++c) {
    const auto& dofs = space.dofs().cell_dofs[c];
    const double det = 2.0 * space.cell(c).area;
    std::array<double, 3> r{};
    Block jac{};
    for (std::size_t q = 0; q < rule.points.size(); ++q) {
      const auto phi = space.basis_values(rule.points[q]);
      const double uq = space.evaluate(u, c, rule.points[q]);
      const double w = params.beta * det * rule.weights[q];
      const double cv = reaction_value(uq, params);
      const double cd = reaction_derivative(uq, params);
      for (std::size_t i = 0; i < 3; ++i) {
        r[i] += w * cv * phi[i];
        for (std::size_t j = 0; j < 3; ++j) jac[i][j] += w * cd * phi[j] * phi[i];
      }
    }
    for (std::size_t i = 0; i < 3; ++i) out.residual[static_cast<std::size_t>(dofs[i])] += r[i];
    add_block(out.jacobian, space.cell_block(c), jac);
  }
  return out;
}

std::vector<double> assemble_load(const Space& space, const std::function<double(const Point&, double)>& f,
                                  double t_prev, double t_next, int spatial_degree) {
  if (!(t_next > t_prev)) throw std::invalid_argument("assemble_load: t_next must exceed t_prev");
  const double half = 0.5 * (t_next - t_prev);
  const double mid = 0.5 * (t_next + t_prev);
  const double r = std::sqrt(0.6);
  const std::array<double, 3> tq{mid - half * r, mid, mid + half * r};
  const std::array<double, 3> tw{5.0 / 18.0, 8.0 / 18.0, 5.0 / 18.0};
  const auto& rule = triangle_rule(spatial_degree);
  std::vector<double> b(space.size(), 0.0);
  for (std::size_t k = 0; k < 3; ++k) {
    for (std::size_t c = 0; c < space.mesh().num_cells(); ++c) {
      const auto& dofs = space.dofs().cell_dofs[c];
      const double det = 2.0 * space.cell(c).area;
      for (std::size_t q = 0; q < rule.points.size(); ++q) {
        const double fq = tw[k] * f(map_to_cell(space.mesh(), c, rule.points[q]), tq[k]);
        const auto phi = space.basis_values(rule.points[q]);
        for (std::size_t i = 0; i < 3; ++i) b[static_cast<std::size_t>(dofs[i])] += det * rule.weights[q] * fq * phi[i];
      }
    }
  }
  return b;
}

}  // namespace gbhe
