#pragma once

#include <array>
#include <functional>
#include <map>
#include <memory>
#include <mutex>
#include <span>
#include <vector>

#include "gbhe/geometry.hpp"
#include "gbhe/mesh.hpp"
#include "gbhe/sparse.hpp"

namespace gbhe {

enum class SpaceKind { CR, DG };

const char* to_string(SpaceKind kind);

/// Degree-of-freedom layout. CR: one dof per edge (the edge midpoint value);
/// DG: three vertex-Lagrange dofs per cell.
struct DofMap {
  SpaceKind kind = SpaceKind::CR;
  std::size_t n_dofs = 0;
  std::vector<std::array<int, 3>> cell_dofs;
  std::vector<Point> dof_locations;
  /// CR only: dofs living on boundary edges.
  std::vector<int> boundary_dofs;
};

DofMap cr_dof_map(const Mesh& mesh);
DofMap dg_dof_map(const Mesh& mesh);

using SpatialFunction = std::function<double(const Point&)>;

/// Face data for one edge: plus side is the edge's first cell, the normal points from plus to minus.
struct EdgeTraceContext {
  std::size_t edge = 0;
  int plus = -1;
  int minus = -1;  // Mesh::kNoCell on the boundary
  Vec2 normal;
  double h = 0.0;
  std::vector<Point> points;
  std::vector<double> weights;  // physical weights (sum to h)
  std::vector<Barycentric> plus_points;
  std::vector<Barycentric> minus_points;

  bool is_boundary() const { return minus < 0; }
};

EdgeTraceContext make_edge_context(const Mesh& mesh, std::size_t edge, int degree);
std::vector<EdgeTraceContext> make_edge_contexts(const Mesh& mesh, int degree);

struct CellGeometry {
  double area = 0.0;
  std::array<Vec2, 3> grad_lambda;  // gradients of the barycentric coordinates
};

/// Finite element space (CR or DG P1) over a shared mesh; owns the dof map,
/// per-cell affine geometry and the assembly sparsity pattern.
class Space {
 public:
  Space(std::shared_ptr<const Mesh> mesh, SpaceKind kind);

  SpaceKind kind() const { return dofs_.kind; }
  const Mesh& mesh() const { return *mesh_; }
  const std::shared_ptr<const Mesh>& mesh_ptr() const { return mesh_; }
  const DofMap& dofs() const { return dofs_; }
  std::size_t size() const { return dofs_.n_dofs; }
  const CellGeometry& cell(std::size_t c) const { return geometry_[c]; }
  /// Couplings of every bilinear form on this space (DG includes face neighbours).
  const std::shared_ptr<const CsrPattern>& pattern() const { return pattern_; }

  /// Basis values at barycentric point: CR 1 - 2 lambda_i, DG lambda_i.
  std::array<double, 3> basis_values(const Barycentric& lambda) const;
  std::array<Vec2, 3> basis_gradients(std::size_t c) const;

  double evaluate(std::span<const double> u, std::size_t c, const Barycentric& lambda) const;
  Vec2 gradient(std::span<const double> u, std::size_t c) const;

  /// Edge contexts of every edge at the given edge-rule degree, built on first use.
  const std::vector<EdgeTraceContext>& edge_contexts(int degree) const;

  using BlockPositions = std::array<std::array<std::size_t, 3>, 3>;
  /// CSR positions of the (cell dofs x cell dofs) block of cell c.
  const BlockPositions& cell_block(std::size_t c) const { return cell_blocks_[c]; }
  /// DG interior edge e: positions of the (plus rows, minus cols) and (minus rows, plus cols) blocks.
  const std::array<BlockPositions, 2>& face_blocks(std::size_t e) const { return face_blocks_[e]; }

 private:
  std::shared_ptr<const Mesh> mesh_;
  DofMap dofs_;
  std::vector<CellGeometry> geometry_;
  std::shared_ptr<const CsrPattern> pattern_;
  std::vector<BlockPositions> cell_blocks_;
  std::vector<std::array<BlockPositions, 2>> face_blocks_;
  mutable std::mutex edge_mutex_;
  mutable std::map<int, std::vector<EdgeTraceContext>> edge_cache_;
};

/// Coefficient vector of a discrete field on a space.
struct FieldVector {
  std::shared_ptr<const Space> space;
  std::vector<double> values;

  FieldVector() = default;
  explicit FieldVector(std::shared_ptr<const Space> s) : space(std::move(s)), values(space->size(), 0.0) {}
  FieldVector(std::shared_ptr<const Space> s, std::vector<double> v);
};

struct BasisEval {
  std::array<double, 3> values;
  std::array<Vec2, 3> gradients;
};

/// CR basis on `cell` at a barycentric point; phi_i is 1 at the midpoint of local edge i.
BasisEval cr_basis(const Space& space, std::size_t cell, const Barycentric& lambda);

/// Nodal interpolation: CR at edge midpoints, DG at each cell's vertices.
FieldVector interpolate(const std::shared_ptr<const Space>& space, const SpatialFunction& g);
FieldVector cr_interpolate(const std::shared_ptr<const Space>& space, const SpatialFunction& g);

/// Strong Dirichlet rows for CR: boundary rows become identity rows with
/// rhs = g(midpoint, t); boundary columns are eliminated from the interior
/// rows with the matching rhs compensation.
void apply_dirichlet_cr(const DofMap& dofs, const std::function<double(const Point&, double)>& g, double t,
                        SparseMatrix& matrix, std::vector<double>& rhs);
/// Same with explicit per-boundary-dof values (indexed like dofs.boundary_dofs).
void apply_dirichlet_cr(const DofMap& dofs, std::span<const double> boundary_values, SparseMatrix& matrix,
                        std::vector<double>& rhs);

struct TraceValues {
  Vec2 jump;
  double average = 0.0;
  double plus = 0.0;
  double minus = 0.0;  // exterior datum on boundary edges
};

/// Jump [[u]] = u+ n+ + u- n- and average {{u}} at quadrature point q. On the
/// boundary the exterior trace is `exterior` and {{u}} = u+.
TraceValues jump_average(const Space& space, const EdgeTraceContext& ctx, std::span<const double> u, std::size_t q,
                         double exterior = 0.0);

/// gamma / h_E; throws std::invalid_argument for gamma <= 0.
double penalty_coeff(const EdgeTraceContext& ctx, double gamma);

double l2_norm_sq(const Space& space, std::span<const double> u);
double broken_gradient_norm_sq(const Space& space, std::span<const double> u);
/// sum_E gamma_h ||[[u]]||^2 over all edges (boundary jumps against zero).
double jump_penalty_sq(const Space& space, std::span<const double> u, double penalty_gamma);
/// |||u|||_DG^2 = broken gradient part + jump penalty part.
double dg_norm_sq(const Space& space, std::span<const double> u, double penalty_gamma);

}  // namespace gbhe
