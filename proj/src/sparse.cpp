#include "gbhe/sparse.hpp"

#include <Eigen/SparseCore>
#include <Eigen/UmfPackSupport>
#include <algorithm>
#include <cmath>
#include <stdexcept>
#include <string>

#include "gbhe/errors.hpp"

namespace gbhe {

std::ptrdiff_t CsrPattern::find(std::size_t row, std::size_t col) const {
  const auto first = col_indices.begin() + static_cast<std::ptrdiff_t>(row_offsets[row]);
  const auto last = col_indices.begin() + static_cast<std::ptrdiff_t>(row_offsets[row + 1]);
  const auto it = std::lower_bound(first, last, static_cast<int>(col));
  if (it == last || *it != static_cast<int>(col)) return -1;
  return it - col_indices.begin();
}

CsrPattern CsrPattern::from_rows(std::size_t n_cols, std::vector<std::vector<int>> rows) {
  CsrPattern p;
  p.n_rows = rows.size();
  p.n_cols = n_cols;
  p.row_offsets.reserve(rows.size() + 1);
  p.row_offsets.push_back(0);
  for (auto& r : rows) {
    std::sort(r.begin(), r.end());
    r.erase(std::unique(r.begin(), r.end()), r.end());
    for (int c : r) {
      if (c < 0 || static_cast<std::size_t>(c) >= n_cols) throw std::invalid_argument("column index out of range");
      p.col_indices.push_back(c);
    }
    p.row_offsets.push_back(p.col_indices.size());
  }
  return p;
}

SparseMatrix::SparseMatrix(std::shared_ptr<const CsrPattern> pattern)
    : pattern_(std::move(pattern)), values_(pattern_->nnz(), 0.0) {}

SparseMatrix SparseMatrix::identity(std::size_t n) {
  std::vector<std::vector<int>> rows(n);
  for (std::size_t i = 0; i < n; ++i) rows[i].push_back(static_cast<int>(i));
  SparseMatrix m(std::make_shared<const CsrPattern>(CsrPattern::from_rows(n, std::move(rows))));
  std::fill(m.values_.begin(), m.values_.end(), 1.0);
  return m;
}

SparseMatrix SparseMatrix::from_triplets(std::size_t n_rows, std::size_t n_cols, std::span<const Triplet> triplets) {
  std::vector<std::vector<int>> rows(n_rows);
  for (const auto& t : triplets) {
    if (t.row < 0 || static_cast<std::size_t>(t.row) >= n_rows) throw std::invalid_argument("row index out of range");
    rows[static_cast<std::size_t>(t.row)].push_back(t.col);
  }
  SparseMatrix m(std::make_shared<const CsrPattern>(CsrPattern::from_rows(n_cols, std::move(rows))));
  for (const auto& t : triplets) m.add(static_cast<std::size_t>(t.row), static_cast<std::size_t>(t.col), t.value);
  return m;
}

double SparseMatrix::coeff(std::size_t row, std::size_t col) const {
  const auto pos = pattern_->find(row, col);
  return pos < 0 ? 0.0 : values_[static_cast<std::size_t>(pos)];
}

void SparseMatrix::add(std::size_t row, std::size_t col, double value) {
  const auto pos = pattern_->find(row, col);
  if (pos < 0) throw std::out_of_range("entry (" + std::to_string(row) + "," + std::to_string(col) + ") not in pattern");
  values_[static_cast<std::size_t>(pos)] += value;
}

void SparseMatrix::set_zero() { std::fill(values_.begin(), values_.end(), 0.0); }

void SparseMatrix::set_identity_row(std::size_t row) {
  for (std::size_t p = pattern_->row_offsets[row]; p < pattern_->row_offsets[row + 1]; ++p) {
    values_[p] = pattern_->col_indices[p] == static_cast<int>(row) ? 1.0 : 0.0;
  }
}

std::vector<double> spmv(const SparseMatrix& a, std::span<const double> x) {
  std::vector<double> y(a.n_rows(), 0.0);
  spmv_add(a, x, 1.0, y);
  return y;
}

void spmv_add(const SparseMatrix& a, std::span<const double> x, double c, std::span<double> y) {
  if (x.size() != a.n_cols() || y.size() != a.n_rows()) throw std::invalid_argument("spmv: dimension mismatch");
  const auto& off = a.row_offsets();
  const auto& col = a.col_indices();
  const auto& val = a.values();
  for (std::size_t i = 0; i < a.n_rows(); ++i) {
    double s = 0.0;
    for (std::size_t p = off[i]; p < off[i + 1]; ++p) s += val[p] * x[static_cast<std::size_t>(col[p])];
    y[i] += c * s;
  }
}

SparseMatrix add_scaled(const SparseMatrix& accumulator, const SparseMatrix& a, double c) {
  if (accumulator.n_rows() != a.n_rows() || accumulator.n_cols() != a.n_cols()) {
    throw std::invalid_argument("add_scaled: dimension mismatch");
  }
  if (accumulator.pattern() == a.pattern() || *accumulator.pattern() == *a.pattern()) {
    SparseMatrix out = accumulator;
    for (std::size_t p = 0; p < out.nnz(); ++p) out.values()[p] += c * a.values()[p];
    return out;
  }
  std::vector<std::vector<int>> rows(a.n_rows());
  for (const SparseMatrix* m : {&accumulator, &a}) {
    for (std::size_t i = 0; i < m->n_rows(); ++i) {
      for (std::size_t p = m->row_offsets()[i]; p < m->row_offsets()[i + 1]; ++p) rows[i].push_back(m->col_indices()[p]);
    }
  }
  SparseMatrix out(std::make_shared<const CsrPattern>(CsrPattern::from_rows(a.n_cols(), std::move(rows))));
  for (std::size_t i = 0; i < a.n_rows(); ++i) {
    for (std::size_t p = accumulator.row_offsets()[i]; p < accumulator.row_offsets()[i + 1]; ++p) {
      out.add(i, static_cast<std::size_t>(accumulator.col_indices()[p]), accumulator.values()[p]);
    }
    for (std::size_t p = a.row_offsets()[i]; p < a.row_offsets()[i + 1]; ++p) {
      out.add(i, static_cast<std::size_t>(a.col_indices()[p]), c * a.values()[p]);
    }
  }
  return out;
}

void add_scaled_inplace(SparseMatrix& accumulator, const SparseMatrix& a, double c) {
  if (accumulator.pattern() != a.pattern() && !(*accumulator.pattern() == *a.pattern())) {
    throw std::invalid_argument("add_scaled_inplace: patterns differ");
  }
  auto& v = accumulator.values();
  const auto& w = a.values();
  for (std::size_t p = 0; p < v.size(); ++p) v[p] += c * w[p];
}

double norm2(std::span<const double> x) {
  double s = 0.0;
  for (double v : x) s += v * v;
  return std::sqrt(s);
}

double max_abs_entry_difference_with_transpose(const SparseMatrix& a) {
  double d = 0.0;
  for (std::size_t i = 0; i < a.n_rows(); ++i) {
    for (std::size_t p = a.row_offsets()[i]; p < a.row_offsets()[i + 1]; ++p) {
      const auto j = static_cast<std::size_t>(a.col_indices()[p]);
      d = std::max(d, std::abs(a.values()[p] - a.coeff(j, i)));
    }
  }
  return d;
}

namespace {

using EigenMatrix = Eigen::SparseMatrix<double, Eigen::ColMajor, int>;

double residual_norm(const SparseMatrix& a, std::span<const double> x, std::span<const double> b) {
  std::vector<double> r(b.begin(), b.end());
  spmv_add(a, x, -1.0, r);
  return norm2(r);
}

// Restarted right-preconditioned GMRES with a Jacobi preconditioner.
std::vector<double> gmres(const SparseMatrix& a, std::span<const double> b, double tol, int restart, int max_iter) {
  const std::size_t n = b.size();
  std::vector<double> inv_diag(n, 1.0);
  for (std::size_t i = 0; i < n; ++i) {
    const double d = a.coeff(i, i);
    if (d != 0.0) inv_diag[i] = 1.0 / d;
  }
  std::vector<double> x(n, 0.0);
  int total = 0;
  while (total < max_iter) {
    std::vector<double> r(b.begin(), b.end());
    spmv_add(a, x, -1.0, r);
    double beta = norm2(r);
    if (beta <= tol) break;
    const auto m = static_cast<std::size_t>(restart);
    std::vector<std::vector<double>> v(m + 1, std::vector<double>(n, 0.0));
    std::vector<std::vector<double>> h(m + 1, std::vector<double>(m, 0.0));
    std::vector<double> cs(m, 0.0), sn(m, 0.0), g(m + 1, 0.0);
    for (std::size_t i = 0; i < n; ++i) v[0][i] = r[i] / beta;
    g[0] = beta;
    std::size_t k = 0;
    for (; k < m && total < max_iter; ++k, ++total) {
      std::vector<double> z(n);
      for (std::size_t i = 0; i < n; ++i) z[i] = inv_diag[i] * v[k][i];
      std::vector<double> w = spmv(a, z);
      for (std::size_t j = 0; j <= k; ++j) {
        double hj = 0.0;
        for (std::size_t i = 0; i < n; ++i) hj += w[i] * v[j][i];
        h[j][k] = hj;
        for (std::size_t i = 0; i < n; ++i) w[i] -= hj * v[j][i];
      }
      h[k + 1][k] = norm2(w);
      if (h[k + 1][k] > 0.0) {
        for (std::size_t i = 0; i < n; ++i) v[k + 1][i] = w[i] / h[k + 1][k];
      }
      for (std::size_t j = 0; j < k; ++j) {
        const double t = cs[j] * h[j][k] + sn[j] * h[j + 1][k];
        h[j + 1][k] = -sn[j] * h[j][k] + cs[j] * h[j + 1][k];
        h[j][k] = t;
      }
      const double den = std::hypot(h[k][k], h[k + 1][k]);
      cs[k] = den == 0.0 ? 1.0 : h[k][k] / den;
      sn[k] = den == 0.0 ? 0.0 : h[k + 1][k] / den;
      h[k][k] = den;
      h[k + 1][k] = 0.0;
      g[k + 1] = -sn[k] * g[k];
      g[k] = cs[k] * g[k];
      if (std::abs(g[k + 1]) <= tol) {
        ++k;
        ++total;
        break;
      }
    }
    std::vector<double> y(k, 0.0);
    for (std::size_t jj = k; jj-- > 0;) {
      double s = g[jj];
      for (std::size_t l = jj + 1; l < k; ++l) s -= h[jj][l] * y[l];
      y[jj] = h[jj][jj] == 0.0 ? 0.0 : s / h[jj][jj];
    }
    for (std::size_t j = 0; j < k; ++j) {
      for (std::size_t i = 0; i < n; ++i) x[i] += inv_diag[i] * y[j] * v[j][i];
    }
  }
  return x;
}

}  // namespace

struct LinearSolver::Impl {
  LinearSolverKind kind;
  const SparseMatrix* matrix = nullptr;
  SparseMatrix copy;
  std::shared_ptr<const CsrPattern> analysed;
  EigenMatrix eigen;
  std::vector<int> csr_to_csc;  // CSR storage position -> Eigen value index
  Eigen::UmfPackLU<EigenMatrix> lu;
};

LinearSolver::LinearSolver(LinearSolverKind kind) : impl_(std::make_unique<Impl>()) { impl_->kind = kind; }
LinearSolver::~LinearSolver() = default;
LinearSolver::LinearSolver(LinearSolver&&) noexcept = default;
LinearSolver& LinearSolver::operator=(LinearSolver&&) noexcept = default;

void LinearSolver::factorize(const SparseMatrix& a) {
  if (a.n_rows() != a.n_cols()) throw std::invalid_argument("LinearSolver: matrix must be square");
  auto& s = *impl_;
  s.copy = a;
  if (s.kind == LinearSolverKind::Gmres) return;

  const bool same_pattern = s.analysed && (s.analysed == a.pattern() || *s.analysed == *a.pattern());
  if (!same_pattern) {
    const auto n = static_cast<int>(a.n_rows());
    std::vector<Eigen::Triplet<double>> trips;
    trips.reserve(a.nnz());
    // Store the CSR position in the value slot to recover the permutation.
    for (std::size_t i = 0; i < a.n_rows(); ++i) {
      for (std::size_t p = a.row_offsets()[i]; p < a.row_offsets()[i + 1]; ++p) {
        trips.emplace_back(static_cast<int>(i), a.col_indices()[p], static_cast<double>(p));
      }
    }
    s.eigen.resize(n, n);
    s.eigen.setFromTriplets(trips.begin(), trips.end());
    s.eigen.makeCompressed();
    s.csr_to_csc.assign(a.nnz(), 0);
    for (int k = 0; k < static_cast<int>(s.eigen.nonZeros()); ++k) {
      s.csr_to_csc[static_cast<std::size_t>(s.eigen.valuePtr()[k])] = k;
    }
    s.analysed = a.pattern();
    for (std::size_t p = 0; p < a.nnz(); ++p) s.eigen.valuePtr()[s.csr_to_csc[p]] = a.values()[p];
    s.lu.analyzePattern(s.eigen);
  } else {
    for (std::size_t p = 0; p < a.nnz(); ++p) s.eigen.valuePtr()[s.csr_to_csc[p]] = a.values()[p];
  }
  s.lu.factorize(s.eigen);
  if (s.lu.info() != Eigen::Success) {
    throw SingularMatrixError("sparse LU factorization failed");
  }
}

std::vector<double> LinearSolver::solve(std::span<const double> b) {
  auto& s = *impl_;
  if (b.size() != s.copy.n_rows()) throw std::invalid_argument("LinearSolver::solve: dimension mismatch");
  const double target = 1e-10 * (1.0 + norm2(b));
  if (s.kind == LinearSolverKind::Gmres) {
    auto x = gmres(s.copy, b, 1e-2 * target, 50, 20000);
    if (!(residual_norm(s.copy, x, b) <= target)) throw SingularMatrixError("GMRES did not reach the residual tolerance");
    return x;
  }
  Eigen::Map<const Eigen::VectorXd> rhs(b.data(), static_cast<Eigen::Index>(b.size()));
  Eigen::VectorXd x = s.lu.solve(rhs);
  std::vector<double> out(x.data(), x.data() + x.size());
  // A couple of refinement sweeps absorb pivot growth on stiff Newton matrices.
  for (int sweep = 0; sweep < 3; ++sweep) {
    std::vector<double> r(b.begin(), b.end());
    spmv_add(s.copy, out, -1.0, r);
    const double rn = norm2(r);
    if (!std::isfinite(rn)) break;
    if (rn <= target) return out;
    Eigen::Map<const Eigen::VectorXd> rv(r.data(), static_cast<Eigen::Index>(r.size()));
    Eigen::VectorXd dx = s.lu.solve(rv);
    for (std::size_t i = 0; i < out.size(); ++i) out[i] += dx[static_cast<Eigen::Index>(i)];
  }
  const double rn = residual_norm(s.copy, out, b);
  if (!(rn <= target)) throw SingularMatrixError("linear solve residual " + std::to_string(rn) + " above tolerance");
  return out;
}

std::vector<double> solve(const SparseMatrix& a, std::span<const double> b) {
  LinearSolver s;
  s.factorize(a);
  return s.solve(b);
}

}  // namespace gbhe
