#pragma once

#include <cstddef>
#include <memory>
#include <span>
#include <vector>

namespace gbhe {

/// Compressed-row sparsity structure: sorted, duplicate-free column indices per row.
struct CsrPattern {
  std::size_t n_rows = 0;
  std::size_t n_cols = 0;
  std::vector<std::size_t> row_offsets;
  std::vector<int> col_indices;

  std::size_t nnz() const { return col_indices.size(); }
  /// Storage position of (row, col), or -1 when the entry is not in the pattern.
  std::ptrdiff_t find(std::size_t row, std::size_t col) const;

  /// Builds a pattern from per-row column lists (sorted and deduplicated here).
  static CsrPattern from_rows(std::size_t n_cols, std::vector<std::vector<int>> rows);
  friend bool operator==(const CsrPattern&, const CsrPattern&) = default;
};

struct Triplet {
  int row;
  int col;
  double value;
};

/// CSR matrix whose structure may be shared between matrices assembled on the same space.
class SparseMatrix {
 public:
  SparseMatrix() = default;
  explicit SparseMatrix(std::shared_ptr<const CsrPattern> pattern);

  static SparseMatrix identity(std::size_t n);
  /// Duplicate (row, col) entries are summed.
  static SparseMatrix from_triplets(std::size_t n_rows, std::size_t n_cols, std::span<const Triplet> triplets);

  std::size_t n_rows() const { return pattern_ ? pattern_->n_rows : 0; }
  std::size_t n_cols() const { return pattern_ ? pattern_->n_cols : 0; }
  std::size_t nnz() const { return values_.size(); }
  const std::vector<std::size_t>& row_offsets() const { return pattern_->row_offsets; }
  const std::vector<int>& col_indices() const { return pattern_->col_indices; }
  const std::vector<double>& values() const { return values_; }
  std::vector<double>& values() { return values_; }
  const std::shared_ptr<const CsrPattern>& pattern() const { return pattern_; }

  /// Entry (row, col); zero when outside the pattern.
  double coeff(std::size_t row, std::size_t col) const;
  /// Adds into an existing pattern entry; throws std::out_of_range otherwise.
  void add(std::size_t row, std::size_t col, double value);
  void set_zero();
  /// Replaces row `row` by the unit row e_row (keeps the pattern).
  void set_identity_row(std::size_t row);

 private:
  std::shared_ptr<const CsrPattern> pattern_;
  std::vector<double> values_;
};

std::vector<double> spmv(const SparseMatrix& a, std::span<const double> x);
/// y += c * A x
void spmv_add(const SparseMatrix& a, std::span<const double> x, double c, std::span<double> y);

/// accumulator + c * A. Identical patterns combine entrywise; otherwise the
/// result lives on the union pattern.
SparseMatrix add_scaled(const SparseMatrix& accumulator, const SparseMatrix& a, double c);
/// In-place variant; requires identical patterns.
void add_scaled_inplace(SparseMatrix& accumulator, const SparseMatrix& a, double c);

double norm2(std::span<const double> x);
double max_abs_entry_difference_with_transpose(const SparseMatrix& a);

enum class LinearSolverKind { SparseLU, Gmres };

/// Direct (UMFPACK sparse LU) or GMRES(50) with Jacobi preconditioning.
/// Reuses the symbolic analysis while the pattern stays the same.
class LinearSolver {
 public:
  explicit LinearSolver(LinearSolverKind kind = LinearSolverKind::SparseLU);
  ~LinearSolver();
  LinearSolver(LinearSolver&&) noexcept;
  LinearSolver& operator=(LinearSolver&&) noexcept;

  /// Throws SingularMatrixError when the factorization breaks down.
  void factorize(const SparseMatrix& a);
  /// Solution with ||Ax - b|| <= 1e-10 (1 + ||b||); throws SingularMatrixError otherwise.
  std::vector<double> solve(std::span<const double> b);

 private:
  struct Impl;
  std::unique_ptr<Impl> impl_;
};

/// One-shot direct solve.
std::vector<double> solve(const SparseMatrix& a, std::span<const double> b);

}  // namespace gbhe
