#pragma once

#include <array>
#include <cstddef>
#include <string>
#include <vector>

#include "gbhe/geometry.hpp"

namespace gbhe {

/// Per-edge geometry. The normal points out of the edge's first adjacent cell
/// (towards the second one on interior edges).
struct EdgeGeometry {
  Vec2 normal;
  double length = 0.0;
  Point midpoint;
};

/// Conforming 2D triangulation with full edge topology.
///
/// Local edge `i` of a cell is the edge opposite its local vertex `i`. Cells are
/// stored counterclockwise. Immutable once built.
class Mesh {
 public:
  static constexpr int kNoCell = -1;

  /// Builds topology from vertices and cells; throws std::invalid_argument on a
  /// cell with non-positive signed area or an edge shared by more than two cells.
  Mesh(std::vector<Point> vertices, std::vector<std::array<int, 3>> cells, Box domain);

  std::size_t num_vertices() const { return vertices_.size(); }
  std::size_t num_cells() const { return cells_.size(); }
  std::size_t num_edges() const { return edges_.size(); }

  const std::vector<Point>& vertices() const { return vertices_; }
  const std::vector<std::array<int, 3>>& cells() const { return cells_; }
  const std::vector<std::array<int, 2>>& edges() const { return edges_; }
  const std::vector<std::array<int, 3>>& cell_edges() const { return cell_edges_; }
  /// Second entry is kNoCell for boundary edges.
  const std::vector<std::array<int, 2>>& edge_cells() const { return edge_cells_; }
  const std::vector<bool>& boundary_flags() const { return boundary_; }
  const Box& domain_box() const { return box_; }

  bool is_boundary_edge(std::size_t e) const { return boundary_[e]; }
  double cell_area(std::size_t c) const;
  Point cell_centroid(std::size_t c) const;
  /// Position of edge `e` within the local edge list of cell `c`, or -1.
  int local_edge_index(std::size_t c, std::size_t e) const;
  /// Longest edge length over the mesh.
  double max_edge_length() const;

 private:
  void build_topology();

  std::vector<Point> vertices_;
  std::vector<std::array<int, 3>> cells_;
  std::vector<std::array<int, 2>> edges_;
  std::vector<std::array<int, 3>> cell_edges_;
  std::vector<std::array<int, 2>> edge_cells_;
  std::vector<bool> boundary_;
  Box box_;
};

/// Structured n x n mesh of `box`; every quad is split by its lower-left to
/// upper-right diagonal. Deterministic numbering (row-major vertices).
Mesh generate_rect_mesh(const Box& box, int n);

/// Midpoint refinement: each triangle becomes four congruent children.
Mesh refine_uniform(const Mesh& mesh);

EdgeGeometry edge_geometry(const Mesh& mesh, std::size_t edge_index);

/// Writes the bare triangulation as legacy ASCII VTK.
void write_vtk_mesh(const Mesh& mesh, const std::string& path);

}  // namespace gbhe
