#include "gbhe/space.hpp"

#include <algorithm>
#include <stdexcept>

#include "gbhe/quadrature.hpp"

namespace gbhe {

const char* to_string(SpaceKind kind) { return kind == SpaceKind::CR ? "CR" : "DG"; }

DofMap cr_dof_map(const Mesh& mesh) {
  DofMap d;
  d.kind = SpaceKind::CR;
  d.n_dofs = mesh.num_edges();
  d.cell_dofs = mesh.cell_edges();
  d.dof_locations.reserve(d.n_dofs);
  for (std::size_t e = 0; e < mesh.num_edges(); ++e) {
    const auto& ed = mesh.edges()[e];
    d.dof_locations.push_back(
        0.5 * (mesh.vertices()[static_cast<std::size_t>(ed[0])] + mesh.vertices()[static_cast<std::size_t>(ed[1])]));
    if (mesh.is_boundary_edge(e)) d.boundary_dofs.push_back(static_cast<int>(e));
  }
  return d;
}

DofMap dg_dof_map(const Mesh& mesh) {
  DofMap d;
  d.kind = SpaceKind::DG;
  d.n_dofs = 3 * mesh.num_cells();
  d.cell_dofs.resize(mesh.num_cells());
  d.dof_locations.reserve(d.n_dofs);
  for (std::size_t c = 0; c < mesh.num_cells(); ++c) {
    for (int i = 0; i < 3; ++i) {
      d.cell_dofs[c][static_cast<std::size_t>(i)] = static_cast<int>(3 * c) + i;
      d.dof_locations.push_back(mesh.vertices()[static_cast<std::size_t>(mesh.cells()[c][static_cast<std::size_t>(i)])]);
    }
  }
  return d;
}

Space::Space(std::shared_ptr<const Mesh> mesh, SpaceKind kind)
    : mesh_(std::move(mesh)), dofs_(kind == SpaceKind::CR ? cr_dof_map(*mesh_) : dg_dof_map(*mesh_)) {
  const Mesh& m = *mesh_;
  geometry_.resize(m.num_cells());
  for (std::size_t c = 0; c < m.num_cells(); ++c) {
    const auto& t = m.cells()[c];
    const Point p0 = m.vertices()[static_cast<std::size_t>(t[0])];
    const Point p1 = m.vertices()[static_cast<std::size_t>(t[1])];
    const Point p2 = m.vertices()[static_cast<std::size_t>(t[2])];
    const double det = cross(p1 - p0, p2 - p0);
    auto& g = geometry_[c];
    g.area = 0.5 * det;
    // grad lambda_i = rot(p_{i+2} - p_{i+1}) / det, with rot(a) = (a.y, -a.x) rotated inward.
    const std::array<Point, 3> p{p0, p1, p2};
    for (std::size_t i = 0; i < 3; ++i) {
      const Vec2 e = p[(i + 2) % 3] - p[(i + 1) % 3];
      g.grad_lambda[i] = Vec2{-e.y / det, e.x / det};
    }
  }

  std::vector<std::vector<int>> rows(dofs_.n_dofs);
  auto couple = [&](std::size_t ca, std::size_t cb) {
    for (int i : dofs_.cell_dofs[ca]) {
      for (int j : dofs_.cell_dofs[cb]) rows[static_cast<std::size_t>(i)].push_back(j);
    }
  };
  for (std::size_t c = 0; c < m.num_cells(); ++c) couple(c, c);
  if (kind == SpaceKind::DG) {
    for (const auto& ec : m.edge_cells()) {
      if (ec[1] == Mesh::kNoCell) continue;
      couple(static_cast<std::size_t>(ec[0]), static_cast<std::size_t>(ec[1]));
      couple(static_cast<std::size_t>(ec[1]), static_cast<std::size_t>(ec[0]));
    }
  }
  pattern_ = std::make_shared<const CsrPattern>(CsrPattern::from_rows(dofs_.n_dofs, std::move(rows)));

  auto positions = [&](std::size_t ca, std::size_t cb) {
    BlockPositions b{};
    for (std::size_t i = 0; i < 3; ++i) {
      for (std::size_t j = 0; j < 3; ++j) {
        b[i][j] = static_cast<std::size_t>(pattern_->find(static_cast<std::size_t>(dofs_.cell_dofs[ca][i]),
                                                          static_cast<std::size_t>(dofs_.cell_dofs[cb][j])));
      }
    }
    return b;
  };
  cell_blocks_.reserve(m.num_cells());
  for (std::size_t c = 0; c < m.num_cells(); ++c) cell_blocks_.push_back(positions(c, c));
  if (kind == SpaceKind::DG) {
    face_blocks_.resize(m.num_edges());
    for (std::size_t e = 0; e < m.num_edges(); ++e) {
      const auto& ec = m.edge_cells()[e];
      if (ec[1] == Mesh::kNoCell) continue;
      const auto a = static_cast<std::size_t>(ec[0]);
      const auto b = static_cast<std::size_t>(ec[1]);
      face_blocks_[e] = {positions(a, b), positions(b, a)};
    }
  }
}

const std::vector<EdgeTraceContext>& Space::edge_contexts(int degree) const {
  std::lock_guard<std::mutex> lock(edge_mutex_);
  auto it = edge_cache_.find(degree);
  if (it == edge_cache_.end()) it = edge_cache_.emplace(degree, make_edge_contexts(*mesh_, degree)).first;
  return it->second;
}

std::array<double, 3> Space::basis_values(const Barycentric& lambda) const {
  if (kind() == SpaceKind::CR) return {1.0 - 2.0 * lambda[0], 1.0 - 2.0 * lambda[1], 1.0 - 2.0 * lambda[2]};
  return lambda;
}

std::array<Vec2, 3> Space::basis_gradients(std::size_t c) const {
  auto g = geometry_[c].grad_lambda;
  if (kind() == SpaceKind::CR) {
    for (auto& v : g) v *= -2.0;
  }
  return g;
}

double Space::evaluate(std::span<const double> u, std::size_t c, const Barycentric& lambda) const {
  const auto phi = basis_values(lambda);
  const auto& d = dofs_.cell_dofs[c];
  return u[static_cast<std::size_t>(d[0])] * phi[0] + u[static_cast<std::size_t>(d[1])] * phi[1] +
         u[static_cast<std::size_t>(d[2])] * phi[2];
}

Vec2 Space::gradient(std::span<const double> u, std::size_t c) const {
  const auto g = basis_gradients(c);
  const auto& d = dofs_.cell_dofs[c];
  Vec2 r;
  for (std::size_t i = 0; i < 3; ++i) r += u[static_cast<std::size_t>(d[i])] * g[i];
  return r;
}

FieldVector::FieldVector(std::shared_ptr<const Space> s, std::vector<double> v) : space(std::move(s)), values(std::move(v)) {
  if (values.size() != space->size()) throw std::invalid_argument("FieldVector: length does not match the dof map");
}

BasisEval cr_basis(const Space& space, std::size_t cell, const Barycentric& lambda) {
  if (space.kind() != SpaceKind::CR) throw std::invalid_argument("cr_basis: not a CR space");
  return {space.basis_values(lambda), space.basis_gradients(cell)};
}

FieldVector interpolate(const std::shared_ptr<const Space>& space, const SpatialFunction& g) {
  FieldVector f(space);
  const auto& loc = space->dofs().dof_locations;
  for (std::size_t i = 0; i < loc.size(); ++i) f.values[i] = g(loc[i]);
  return f;
}

FieldVector cr_interpolate(const std::shared_ptr<const Space>& space, const SpatialFunction& g) {
  if (space->kind() != SpaceKind::CR) throw std::invalid_argument("cr_interpolate: not a CR space");
  return interpolate(space, g);
}

void apply_dirichlet_cr(const DofMap& dofs, std::span<const double> boundary_values, SparseMatrix& matrix,
                        std::vector<double>& rhs) {
  if (boundary_values.size() != dofs.boundary_dofs.size()) {
    throw std::invalid_argument("apply_dirichlet_cr: one value per boundary dof expected");
  }
  std::vector<double> fixed(dofs.n_dofs, 0.0);
  std::vector<char> is_fixed(dofs.n_dofs, 0);
  for (std::size_t b = 0; b < dofs.boundary_dofs.size(); ++b) {
    const auto i = static_cast<std::size_t>(dofs.boundary_dofs[b]);
    fixed[i] = boundary_values[b];
    is_fixed[i] = 1;
  }
  const auto& off = matrix.row_offsets();
  const auto& col = matrix.col_indices();
  auto& val = matrix.values();
  for (std::size_t i = 0; i < matrix.n_rows(); ++i) {
    if (is_fixed[i]) {
      matrix.set_identity_row(i);
      rhs[i] = fixed[i];
      continue;
    }
    for (std::size_t p = off[i]; p < off[i + 1]; ++p) {
      const auto j = static_cast<std::size_t>(col[p]);
      if (is_fixed[j]) {
        rhs[i] -= val[p] * fixed[j];
        val[p] = 0.0;
      }
    }
  }
}

void apply_dirichlet_cr(const DofMap& dofs, const std::function<double(const Point&, double)>& g, double t,
                        SparseMatrix& matrix, std::vector<double>& rhs) {
  std::vector<double> values;
  values.reserve(dofs.boundary_dofs.size());
  for (int i : dofs.boundary_dofs) values.push_back(g(dofs.dof_locations[static_cast<std::size_t>(i)], t));
  apply_dirichlet_cr(dofs, values, matrix, rhs);
}

EdgeTraceContext make_edge_context(const Mesh& mesh, std::size_t edge, int degree) {
  const auto geo = edge_geometry(mesh, edge);
  const auto& rule = edge_rule(degree);
  EdgeTraceContext ctx;
  ctx.edge = edge;
  ctx.plus = mesh.edge_cells()[edge][0];
  ctx.minus = mesh.edge_cells()[edge][1];
  ctx.normal = geo.normal;
  ctx.h = geo.length;
  const auto& ev = mesh.edges()[edge];
  const Point a = mesh.vertices()[static_cast<std::size_t>(ev[0])];
  const Point b = mesh.vertices()[static_cast<std::size_t>(ev[1])];
  auto local_bary = [&](int cell, double s) {
    Barycentric lam{0.0, 0.0, 0.0};
    const auto& t = mesh.cells()[static_cast<std::size_t>(cell)];
    for (std::size_t i = 0; i < 3; ++i) {
      if (t[i] == ev[0]) lam[i] = 1.0 - s;
      if (t[i] == ev[1]) lam[i] = s;
    }
    return lam;
  };
  for (std::size_t q = 0; q < rule.points.size(); ++q) {
    const double s = rule.points[q];
    ctx.points.push_back((1.0 - s) * a + s * b);
    ctx.weights.push_back(rule.weights[q] * ctx.h);
    ctx.plus_points.push_back(local_bary(ctx.plus, s));
    if (ctx.minus >= 0) ctx.minus_points.push_back(local_bary(ctx.minus, s));
  }
  return ctx;
}

std::vector<EdgeTraceContext> make_edge_contexts(const Mesh& mesh, int degree) {
  std::vector<EdgeTraceContext> out;
  out.reserve(mesh.num_edges());
  for (std::size_t e = 0; e < mesh.num_edges(); ++e) out.push_back(make_edge_context(mesh, e, degree));
  return out;
}

TraceValues jump_average(const Space& space, const EdgeTraceContext& ctx, std::span<const double> u, std::size_t q,
                         double exterior) {
  TraceValues tv;
  tv.plus = space.evaluate(u, static_cast<std::size_t>(ctx.plus), ctx.plus_points[q]);
  if (ctx.is_boundary()) {
    tv.minus = exterior;
    tv.jump = (tv.plus - exterior) * ctx.normal;
    tv.average = tv.plus;
  } else {
    tv.minus = space.evaluate(u, static_cast<std::size_t>(ctx.minus), ctx.minus_points[q]);
    tv.jump = (tv.plus - tv.minus) * ctx.normal;
    tv.average = 0.5 * (tv.plus + tv.minus);
  }
  return tv;
}

double penalty_coeff(const EdgeTraceContext& ctx, double gamma) {
  if (!(gamma > 0.0)) throw std::invalid_argument("penalty_coeff: penalty scale must be positive");
  return gamma / ctx.h;
}

double l2_norm_sq(const Space& space, std::span<const double> u) {
  const auto& rule = triangle_rule(2);
  double s = 0.0;
  for (std::size_t c = 0; c < space.mesh().num_cells(); ++c) {
    const double det = 2.0 * space.cell(c).area;
    for (std::size_t q = 0; q < rule.points.size(); ++q) {
      const double v = space.evaluate(u, c, rule.points[q]);
      s += det * rule.weights[q] * v * v;
    }
  }
  return s;
}

double broken_gradient_norm_sq(const Space& space, std::span<const double> u) {
  double s = 0.0;
  for (std::size_t c = 0; c < space.mesh().num_cells(); ++c) {
    const Vec2 g = space.gradient(u, c);
    s += space.cell(c).area * dot(g, g);
  }
  return s;
}

double jump_penalty_sq(const Space& space, std::span<const double> u, double penalty_gamma) {
  double s = 0.0;
  for (const auto& ctx : space.edge_contexts(2)) {
    const double gh = penalty_coeff(ctx, penalty_gamma);
    for (std::size_t q = 0; q < ctx.weights.size(); ++q) {
      const auto tv = jump_average(space, ctx, u, q);
      s += gh * ctx.weights[q] * dot(tv.jump, tv.jump);
    }
  }
  return s;
}

double dg_norm_sq(const Space& space, std::span<const double> u, double penalty_gamma) {
  return broken_gradient_norm_sq(space, u) + jump_penalty_sq(space, u, penalty_gamma);
}

}  // namespace gbhe
