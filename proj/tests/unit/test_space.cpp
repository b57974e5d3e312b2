#include <doctest.h>

#include <cmath>
#include <random>
#include <set>
#include <stdexcept>

#include "gbhe/forms.hpp"
#include "gbhe/quadrature.hpp"
#include "gbhe/space.hpp"
#include "oracles.hpp"

using namespace gbhe;

namespace {

// ||grad_h (I_h g) - grad g||^2 by cell quadrature.
double broken_h1_error_sq(const Space& s, std::span<const double> u, const std::function<Vec2(const Point&)>& grad) {
  const auto& rule = triangle_rule(6);
  double e = 0.0;
  for (std::size_t c = 0; c < s.mesh().num_cells(); ++c) {
    const Vec2 gh = s.gradient(u, c);
    for (std::size_t q = 0; q < rule.points.size(); ++q) {
      const Vec2 d = gh - grad(map_to_cell(s.mesh(), c, rule.points[q]));
      e += 2.0 * s.cell(c).area * rule.weights[q] * dot(d, d);
    }
  }
  return e;
}

const auto sin_sin = [](const Point& x) { return std::sin(M_PI * x.x) * std::sin(M_PI * x.y); };
const auto sin_sin_grad = [](const Point& x) {
  return Vec2{M_PI * std::cos(M_PI * x.x) * std::sin(M_PI * x.y), M_PI * std::sin(M_PI * x.x) * std::cos(M_PI * x.y)};
};

}  // namespace

TEST_CASE("CR dof map") {
  const Mesh m1 = generate_rect_mesh(Box{}, 1);
  const DofMap d1 = cr_dof_map(m1);
  CHECK(d1.n_dofs == 5);
  CHECK(d1.boundary_dofs.size() == 4);
  const Mesh m2 = generate_rect_mesh(Box{}, 2);
  const DofMap d2 = cr_dof_map(m2);
  CHECK(d2.n_dofs == 16);
  CHECK(d2.boundary_dofs.size() == 8);
  for (const auto& row : d2.cell_dofs) {
    CHECK(std::set<int>(row.begin(), row.end()).size() == 3);
    for (int i : row) CHECK((i >= 0 && i < 16));
  }
  for (std::size_t e = 0; e < m2.num_edges(); ++e)
    CHECK(norm(d2.dof_locations[e] - edge_geometry(m2, e).midpoint) <= 1e-15);
}

TEST_CASE("DG dof map") {
  CHECK(dg_dof_map(generate_rect_mesh(Box{}, 1)).n_dofs == 6);
  const DofMap d = dg_dof_map(generate_rect_mesh(Box{}, 2));
  CHECK(d.n_dofs == 24);
  std::set<int> seen;
  for (const auto& row : d.cell_dofs) {
    for (int i : row) CHECK(seen.insert(i).second);
  }
  CHECK(d.boundary_dofs.empty());
}

TEST_CASE("CR basis") {
  const auto space = oracle::unit_space(3, SpaceKind::CR);
  const Mesh& m = space->mesh();
  std::mt19937_64 rng(5);
  std::uniform_real_distribution<double> u01(0.0, 1.0);
  for (std::size_t c = 0; c < m.num_cells(); ++c) {
    for (int k = 0; k < 4; ++k) {
      double a = u01(rng);
      double b = u01(rng);
      if (a + b > 1.0) {
        a = 1.0 - a;
        b = 1.0 - b;
      }
      const auto e = cr_basis(*space, c, {1.0 - a - b, a, b});
      CHECK(std::abs(e.values[0] + e.values[1] + e.values[2] - 1.0) <= 1e-14);
    }
    for (int j = 0; j < 3; ++j) {
      Barycentric mid{0.5, 0.5, 0.5};
      mid[static_cast<std::size_t>(j)] = 0.0;
      const auto e = cr_basis(*space, c, mid);
      for (int i = 0; i < 3; ++i) CHECK(std::abs(e.values[static_cast<std::size_t>(i)] - (i == j ? 1.0 : 0.0)) <= 1e-15);
      // Physical midpoint of local edge j carries dof j.
      const int dof = space->dofs().cell_dofs[c][static_cast<std::size_t>(j)];
      CHECK(norm(map_to_cell(m, c, mid) - space->dofs().dof_locations[static_cast<std::size_t>(dof)]) <= 1e-15);
    }
  }
}

TEST_CASE("interpolation reproduces linear functions") {
  for (SpaceKind kind : {SpaceKind::CR, SpaceKind::DG}) {
    const auto space = oracle::unit_space(4, kind);
    const auto u = interpolate(space, [](const Point& x) { return 2.0 * x.x - 3.0 * x.y + 0.5; });
    for (std::size_t c = 0; c < space->mesh().num_cells(); ++c) {
      const Vec2 g = space->gradient(u.values, c);
      CHECK(std::abs(g.x - 2.0) <= 1e-12);
      CHECK(std::abs(g.y + 3.0) <= 1e-12);
    }
    const auto s = interpolate(space, [](const Point& x) { return x.x + x.y; });
    CHECK(broken_h1_error_sq(*space, s.values, [](const Point&) { return Vec2{1.0, 1.0}; }) <= 1e-26);
    const auto z = interpolate(space, [](const Point&) { return 0.0; });
    for (double v : z.values) CHECK(v == 0.0);
  }
}

TEST_CASE("CR interpolation is first order in the broken H1 seminorm") {
  std::vector<double> err;
  for (int n : {8, 16, 32, 64}) {
    const auto space = oracle::unit_space(n, SpaceKind::CR);
    err.push_back(std::sqrt(broken_h1_error_sq(*space, cr_interpolate(space, sin_sin).values, sin_sin_grad)));
  }
  for (std::size_t i = 1; i < err.size(); ++i) CHECK(std::log2(err[i - 1] / err[i]) >= 0.95);
}

TEST_CASE("strong Dirichlet conditions") {
  const auto space = oracle::unit_space(6, SpaceKind::CR);
  const auto& dofs = space->dofs();
  {
    SparseMatrix a = assemble_stiffness_cr(*space);
    auto rhs = assemble_load(*space, [](const Point&, double) { return 1.0; }, 0.0, 1.0);
    apply_dirichlet_cr(dofs, [](const Point&, double) { return 0.0; }, 0.0, a, rhs);
    const auto u = solve(a, rhs);
    for (int i : dofs.boundary_dofs) CHECK(u[static_cast<std::size_t>(i)] == 0.0);
    CHECK(max_abs_entry_difference_with_transpose(a) <= 1e-14);
  }
  {
    SparseMatrix a = assemble_stiffness_cr(*space);
    std::vector<double> rhs(space->size(), 0.0);
    apply_dirichlet_cr(dofs, [](const Point&, double) { return 1.0; }, 0.0, a, rhs);
    for (double v : solve(a, rhs)) CHECK(std::abs(v - 1.0) <= 1e-10);
  }
  {
    const double re = 50.0;
    auto g = [re](const Point& x, double t) { return 1.0 / (1.0 + std::exp(re * (x.x + x.y - t) / 2.0)); };
    SparseMatrix a = assemble_stiffness_cr(*space);
    std::vector<double> rhs(space->size(), 0.0);
    apply_dirichlet_cr(dofs, g, 0.0, a, rhs);
    const auto u = solve(a, rhs);
    // Boundary edge next to the origin: midpoint (h/2, 0).
    bool found = false;
    for (int i : dofs.boundary_dofs) {
      const Point p = dofs.dof_locations[static_cast<std::size_t>(i)];
      const double m = p.x + p.y;
      CHECK(std::abs(u[static_cast<std::size_t>(i)] - 1.0 / (1.0 + std::exp(re * m / 2.0))) <= 1e-14);
      if (std::abs(p.y) < 1e-15 && std::abs(p.x - 1.0 / 12.0) < 1e-15) found = true;
    }
    CHECK(found);
  }
}

TEST_CASE("CR midpoint continuity and zero-mean jumps") {
  const auto space = oracle::unit_space(4, SpaceKind::CR);
  std::mt19937_64 rng(11);
  const auto u = oracle::random_vector(space->size(), rng);
  for (const auto& ctx : space->edge_contexts(3)) {
    if (ctx.is_boundary()) continue;
    double jump_integral = 0.0;
    for (std::size_t q = 0; q < ctx.points.size(); ++q) {
      const double up = space->evaluate(u, static_cast<std::size_t>(ctx.plus), ctx.plus_points[q]);
      const double um = space->evaluate(u, static_cast<std::size_t>(ctx.minus), ctx.minus_points[q]);
      jump_integral += ctx.weights[q] * (up - um);
    }
    CHECK(std::abs(jump_integral) <= 1e-12);
    const int lp = space->mesh().local_edge_index(static_cast<std::size_t>(ctx.plus), ctx.edge);
    const int lm = space->mesh().local_edge_index(static_cast<std::size_t>(ctx.minus), ctx.edge);
    Barycentric bp{0.5, 0.5, 0.5};
    Barycentric bm{0.5, 0.5, 0.5};
    bp[static_cast<std::size_t>(lp)] = 0.0;
    bm[static_cast<std::size_t>(lm)] = 0.0;
    CHECK(space->evaluate(u, static_cast<std::size_t>(ctx.plus), bp) ==
          space->evaluate(u, static_cast<std::size_t>(ctx.minus), bm));
  }
}

TEST_CASE("DG traces, jumps and averages") {
  const auto space = oracle::unit_space(4, SpaceKind::DG);
  const auto& m = space->mesh();
  const auto cont = interpolate(space, [](const Point& x) { return std::exp(x.x) * std::cos(x.y); });
  for (const auto& ctx : space->edge_contexts(4)) {
    for (std::size_t q = 0; q < ctx.points.size(); ++q) {
      CHECK(norm(map_to_cell(m, static_cast<std::size_t>(ctx.plus), ctx.plus_points[q]) - ctx.points[q]) <= 1e-13);
      if (ctx.is_boundary()) continue;
      CHECK(norm(map_to_cell(m, static_cast<std::size_t>(ctx.minus), ctx.minus_points[q]) - ctx.points[q]) <= 1e-13);
      const auto tv = jump_average(*space, ctx, cont.values, q);
      CHECK(norm(tv.jump) <= 1e-12);
      CHECK(std::abs(tv.plus - space->evaluate(cont.values, static_cast<std::size_t>(ctx.plus), ctx.plus_points[q])) <= 1e-13);
    }
  }

  // Piecewise constants 1 | 0 across a vertical interior edge.
  bool tested = false;
  for (const auto& ctx : space->edge_contexts(2)) {
    if (ctx.is_boundary() || std::abs(std::abs(ctx.normal.x) - 1.0) > 1e-14) continue;
    std::vector<double> u(space->size(), 0.0);
    for (int d : space->dofs().cell_dofs[static_cast<std::size_t>(ctx.plus)]) u[static_cast<std::size_t>(d)] = 1.0;
    const auto tv = jump_average(*space, ctx, u, 0);
    CHECK(norm(tv.jump - ctx.normal) <= 1e-14);
    CHECK(tv.average == doctest::Approx(0.5));
    tested = true;
    break;
  }
  CHECK(tested);

  for (const auto& ctx : space->edge_contexts(2)) {
    if (!ctx.is_boundary()) continue;
    const std::vector<double> two(space->size(), 2.0);
    const auto tv = jump_average(*space, ctx, two, 1);
    CHECK(norm(tv.jump - 2.0 * ctx.normal) <= 1e-14);
    CHECK(tv.average == 2.0);
  }
}

TEST_CASE("penalty coefficient") {
  const auto coarse = oracle::unit_space(2, SpaceKind::DG);
  const auto fine = oracle::unit_space(4, SpaceKind::DG);
  const auto& c0 = coarse->edge_contexts(2);
  bool tested = false;
  for (const auto& ctx : c0) {
    if (std::abs(ctx.h - 0.5) > 1e-15) continue;
    CHECK(penalty_coeff(ctx, 10.0) == doctest::Approx(20.0).epsilon(1e-15));
    tested = true;
  }
  CHECK(tested);
  const auto& ctx_fine = fine->edge_contexts(2)[0];
  const auto& ctx_coarse = c0[0];
  CHECK(penalty_coeff(ctx_fine, 40.0) == doctest::Approx(2.0 * penalty_coeff(ctx_coarse, 40.0)));
  CHECK_THROWS_AS(penalty_coeff(ctx_coarse, 0.0), std::invalid_argument);
  CHECK_THROWS_AS(penalty_coeff(ctx_coarse, -1.0), std::invalid_argument);
}

TEST_CASE("DG norm of a continuous field") {
  const auto space = oracle::unit_space(8, SpaceKind::DG);
  const auto v = interpolate(space, sin_sin);  // vanishes on the boundary
  CHECK(std::abs(dg_norm_sq(*space, v.values, 40.0) - broken_gradient_norm_sq(*space, v.values)) <= 1e-10);
  const auto w = interpolate(space, [](const Point& x) { return 1.0 + x.x; });
  // Only boundary jumps remain: sum_E gamma/h_E int_E w^2.
  double boundary = 0.0;
  for (const auto& ctx : space->edge_contexts(4)) {
    if (!ctx.is_boundary()) continue;
    for (std::size_t q = 0; q < ctx.points.size(); ++q)
      boundary += 40.0 / ctx.h * ctx.weights[q] * std::pow(1.0 + ctx.points[q].x, 2);
  }
  CHECK(dg_norm_sq(*space, w.values, 40.0) == doctest::Approx(1.0 + boundary).epsilon(1e-12));
}
