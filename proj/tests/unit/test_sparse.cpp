#include <doctest.h>

#include <random>
#include <stdexcept>

#include "gbhe/errors.hpp"
#include "gbhe/forms.hpp"
#include "gbhe/sparse.hpp"
#include "oracles.hpp"

using namespace gbhe;

namespace {

SparseMatrix random_sparse(std::size_t n, std::mt19937_64& rng, std::vector<std::vector<double>>& dense) {
  std::uniform_real_distribution<double> val(-1.0, 1.0);
  std::uniform_int_distribution<int> pick(0, 3);
  std::vector<Triplet> t;
  dense.assign(n, std::vector<double>(n, 0.0));
  for (std::size_t i = 0; i < n; ++i) {
    for (std::size_t j = 0; j < n; ++j) {
      if (i != j && pick(rng) != 0) continue;
      const double v = val(rng) + (i == j ? 10.0 : 0.0);
      t.push_back({static_cast<int>(i), static_cast<int>(j), v});
      dense[i][j] += v;
    }
  }
  return SparseMatrix::from_triplets(n, n, t);
}

}  // namespace

TEST_CASE("spmv") {
  std::mt19937_64 rng(1);
  const auto x = oracle::random_vector(50, rng);
  CHECK(spmv(SparseMatrix::identity(50), x) == x);

  std::vector<std::vector<double>> dense;
  const SparseMatrix a = random_sparse(50, rng, dense);
  const auto y = spmv(a, x);
  for (std::size_t i = 0; i < 50; ++i) {
    double s = 0.0;
    for (std::size_t j = 0; j < 50; ++j) s += dense[i][j] * x[j];
    CHECK(std::abs(y[i] - s) <= 1e-13);
  }

  const auto space = oracle::unit_space(3, SpaceKind::CR);
  const SparseMatrix m = assemble_mass(*space);
  const auto ones = std::vector<double>(space->size(), 1.0);
  const auto rs = spmv(m, ones);
  for (std::size_t i = 0; i < space->size(); ++i) {
    double row = 0.0;
    for (std::size_t p = m.row_offsets()[i]; p < m.row_offsets()[i + 1]; ++p) row += m.values()[p];
    CHECK(std::abs(rs[i] - row) <= 1e-15);
  }
  CHECK_THROWS_AS(spmv(a, std::vector<double>(49, 0.0)), std::invalid_argument);
}

TEST_CASE("triplet assembly sums duplicates and sorts columns") {
  const std::vector<Triplet> t{{0, 2, 1.0}, {0, 0, 2.0}, {0, 2, 0.5}, {1, 1, 3.0}};
  const SparseMatrix a = SparseMatrix::from_triplets(2, 3, t);
  CHECK(a.nnz() == 3);
  CHECK(a.coeff(0, 2) == 1.5);
  CHECK(a.coeff(0, 1) == 0.0);
  CHECK(a.col_indices()[0] == 0);
  CHECK(a.col_indices()[1] == 2);
  SparseMatrix b = a;
  CHECK_THROWS_AS(b.add(1, 0, 1.0), std::out_of_range);
}

TEST_CASE("direct solves") {
  const std::vector<double> b{3.0, 4.0};
  CHECK(solve(SparseMatrix::identity(2), b) == b);
  const std::vector<Triplet> t{{0, 0, 2.0}, {0, 1, 1.0}, {1, 0, 1.0}, {1, 1, 3.0}};
  const auto x = solve(SparseMatrix::from_triplets(2, 2, t), b);
  CHECK(std::abs(x[0] - 1.0) <= 1e-14);
  CHECK(std::abs(x[1] - 1.0) <= 1e-14);

  // CR Poisson on an 8 x 8 mesh: 208 unknowns.
  const auto space = oracle::unit_space(8, SpaceKind::CR);
  SparseMatrix a = assemble_stiffness_cr(*space);
  std::vector<double> rhs = assemble_load(*space, [](const Point& p, double) { return p.x * (1.0 - p.y) + 1.0; }, 0, 1);
  apply_dirichlet_cr(space->dofs(), [](const Point&, double) { return 0.0; }, 0.0, a, rhs);
  CHECK(a.n_rows() >= 200);
  CHECK(max_abs_entry_difference_with_transpose(a) <= 1e-14);
  const auto u = solve(a, rhs);
  auto r = spmv(a, u);
  for (std::size_t i = 0; i < r.size(); ++i) r[i] -= rhs[i];
  CHECK(oracle::norm(r) <= 1e-10 * (1.0 + oracle::norm(rhs)));

  // GMRES reaches the same solution.
  LinearSolver gmres(LinearSolverKind::Gmres);
  gmres.factorize(a);
  const auto ug = gmres.solve(rhs);
  auto rg = spmv(a, ug);
  for (std::size_t i = 0; i < rg.size(); ++i) rg[i] -= rhs[i];
  CHECK(oracle::norm(rg) <= 1e-10 * (1.0 + oracle::norm(rhs)));
}

TEST_CASE("singular matrices are reported") {
  const std::vector<Triplet> t{{0, 0, 1.0}, {0, 1, 2.0}, {1, 0, 2.0}, {1, 1, 4.0}};
  CHECK_THROWS_AS(solve(SparseMatrix::from_triplets(2, 2, t), std::vector<double>{1.0, 1.0}), SingularMatrixError);
  const auto space = oracle::unit_space(2, SpaceKind::CR);
  const SparseMatrix a = assemble_stiffness_cr(*space);  // constants in the kernel
  CHECK_THROWS_AS(solve(a, std::vector<double>(space->size(), 1.0)), SingularMatrixError);
}

TEST_CASE("add_scaled") {
  const auto space = oracle::unit_space(4, SpaceKind::DG);
  const SparseMatrix m = assemble_mass(*space);
  const SparseMatrix a = assemble_stiffness_dg(*space, 40.0);
  const SparseMatrix same = add_scaled(m, a, 0.0);
  CHECK(same.values() == m.values());
  const SparseMatrix zero = add_scaled(a, a, -1.0);
  for (double v : zero.values()) CHECK(v == 0.0);

  std::mt19937_64 rng(3);
  const auto x = oracle::random_vector(space->size(), rng);
  const auto y = spmv(add_scaled(m, a, 2.0), x);
  auto ref = spmv(m, x);
  spmv_add(a, x, 2.0, ref);
  CHECK(oracle::max_abs_diff(y, ref) <= 1e-13 * (1.0 + oracle::norm(ref)));

  // Different patterns combine on the union.
  const SparseMatrix i3 = SparseMatrix::identity(3);
  const SparseMatrix off = SparseMatrix::from_triplets(3, 3, std::vector<Triplet>{{0, 2, 5.0}});
  const SparseMatrix u = add_scaled(i3, off, 2.0);
  CHECK(u.coeff(0, 0) == 1.0);
  CHECK(u.coeff(0, 2) == 10.0);
  CHECK_THROWS_AS(add_scaled(i3, SparseMatrix::identity(4), 1.0), std::invalid_argument);
}
