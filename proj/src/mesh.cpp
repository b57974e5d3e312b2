#include "gbhe/mesh.hpp"

#include <algorithm>
#include <cstdint>
#include <fstream>
#include <iomanip>
#include <stdexcept>
#include <unordered_map>

namespace gbhe {

namespace {

double signed_area(const Point& a, const Point& b, const Point& c) { return 0.5 * cross(b - a, c - a); }

std::uint64_t edge_key(int a, int b) {
  auto lo = static_cast<std::uint64_t>(std::min(a, b));
  auto hi = static_cast<std::uint64_t>(std::max(a, b));
  return (lo << 32) | hi;
}

}  // namespace

Mesh::Mesh(std::vector<Point> vertices, std::vector<std::array<int, 3>> cells, Box domain)
    : vertices_(std::move(vertices)), cells_(std::move(cells)), box_(domain) {
  if (cells_.empty()) throw std::invalid_argument("mesh has no cells");
  const auto nv = static_cast<int>(vertices_.size());
  for (std::size_t c = 0; c < cells_.size(); ++c) {
    for (int v : cells_[c]) {
      if (v < 0 || v >= nv) throw std::invalid_argument("cell " + std::to_string(c) + " references an invalid vertex");
    }
    if (!(cell_area(c) > 0.0)) {
      throw std::invalid_argument("cell " + std::to_string(c) + " has non-positive signed area");
    }
  }
  build_topology();
}

void Mesh::build_topology() {
  std::unordered_map<std::uint64_t, int> index;
  index.reserve(cells_.size() * 2);
  cell_edges_.resize(cells_.size());
  for (std::size_t c = 0; c < cells_.size(); ++c) {
    const auto& cell = cells_[c];
    for (int i = 0; i < 3; ++i) {
      const int a = cell[(i + 1) % 3];
      const int b = cell[(i + 2) % 3];
      auto [it, inserted] = index.try_emplace(edge_key(a, b), static_cast<int>(edges_.size()));
      if (inserted) {
        edges_.push_back({a, b});
        edge_cells_.push_back({static_cast<int>(c), kNoCell});
      } else {
        auto& owners = edge_cells_[static_cast<std::size_t>(it->second)];
        if (owners[1] != kNoCell) throw std::invalid_argument("edge shared by more than two cells");
        owners[1] = static_cast<int>(c);
      }
      cell_edges_[c][static_cast<std::size_t>(i)] = it->second;
    }
  }
  boundary_.resize(edges_.size());
  for (std::size_t e = 0; e < edges_.size(); ++e) boundary_[e] = edge_cells_[e][1] == kNoCell;
}

double Mesh::cell_area(std::size_t c) const {
  const auto& t = cells_[c];
  return signed_area(vertices_[static_cast<std::size_t>(t[0])], vertices_[static_cast<std::size_t>(t[1])],
                     vertices_[static_cast<std::size_t>(t[2])]);
}

Point Mesh::cell_centroid(std::size_t c) const {
  const auto& t = cells_[c];
  Point s;
  for (int v : t) s += vertices_[static_cast<std::size_t>(v)];
  return (1.0 / 3.0) * s;
}

int Mesh::local_edge_index(std::size_t c, std::size_t e) const {
  for (int i = 0; i < 3; ++i) {
    if (cell_edges_[c][static_cast<std::size_t>(i)] == static_cast<int>(e)) return i;
  }
  return -1;
}

double Mesh::max_edge_length() const {
  double h = 0.0;
  for (const auto& e : edges_) {
    h = std::max(h, norm(vertices_[static_cast<std::size_t>(e[1])] - vertices_[static_cast<std::size_t>(e[0])]));
  }
  return h;
}

Mesh generate_rect_mesh(const Box& box, int n) {
  if (n < 1) throw std::invalid_argument("generate_rect_mesh: n must be >= 1");
  if (!(box.width() > 0.0) || !(box.height() > 0.0)) {
    throw std::invalid_argument("generate_rect_mesh: degenerate box");
  }
  const int m = n + 1;
  std::vector<Point> vertices;
  vertices.reserve(static_cast<std::size_t>(m * m));
  for (int j = 0; j < m; ++j) {
    for (int i = 0; i < m; ++i) {
      // Pin the far boundary exactly so domain coordinates carry no rounding.
      const double x = i == n ? box.xmax : box.xmin + box.width() * i / n;
      const double y = j == n ? box.ymax : box.ymin + box.height() * j / n;
      vertices.push_back({x, y});
    }
  }
  std::vector<std::array<int, 3>> cells;
  cells.reserve(static_cast<std::size_t>(2 * n * n));
  for (int j = 0; j < n; ++j) {
    for (int i = 0; i < n; ++i) {
      const int v00 = j * m + i;
      const int v10 = v00 + 1;
      const int v01 = v00 + m;
      const int v11 = v01 + 1;
      cells.push_back({v00, v10, v11});
      cells.push_back({v00, v11, v01});
    }
  }
  return Mesh(std::move(vertices), std::move(cells), box);
}

Mesh refine_uniform(const Mesh& mesh) {
  std::vector<Point> vertices = mesh.vertices();
  const auto nv = static_cast<int>(vertices.size());
  for (const auto& e : mesh.edges()) {
    vertices.push_back(0.5 * (mesh.vertices()[static_cast<std::size_t>(e[0])] +
                              mesh.vertices()[static_cast<std::size_t>(e[1])]));
  }
  std::vector<std::array<int, 3>> cells;
  cells.reserve(4 * mesh.num_cells());
  for (std::size_t c = 0; c < mesh.num_cells(); ++c) {
    const auto& t = mesh.cells()[c];
    const auto& ce = mesh.cell_edges()[c];
    // m_i is the midpoint of the edge opposite vertex i.
    const int m0 = nv + ce[0];
    const int m1 = nv + ce[1];
    const int m2 = nv + ce[2];
    cells.push_back({t[0], m2, m1});
    cells.push_back({m2, t[1], m0});
    cells.push_back({m1, m0, t[2]});
    cells.push_back({m0, m1, m2});
  }
  return Mesh(std::move(vertices), std::move(cells), mesh.domain_box());
}

EdgeGeometry edge_geometry(const Mesh& mesh, std::size_t edge_index) {
  if (edge_index >= mesh.num_edges()) throw std::invalid_argument("edge_geometry: edge index out of range");
  const auto& e = mesh.edges()[edge_index];
  const Point a = mesh.vertices()[static_cast<std::size_t>(e[0])];
  const Point b = mesh.vertices()[static_cast<std::size_t>(e[1])];
  const Vec2 d = b - a;
  EdgeGeometry g;
  g.length = norm(d);
  g.midpoint = 0.5 * (a + b);
  g.normal = Vec2{d.y / g.length, -d.x / g.length};
  const Point centroid = mesh.cell_centroid(static_cast<std::size_t>(mesh.edge_cells()[edge_index][0]));
  if (dot(g.normal, g.midpoint - centroid) < 0.0) g.normal = -1.0 * g.normal;
  return g;
}

void write_vtk_mesh(const Mesh& mesh, const std::string& path) {
  std::ofstream out(path);
  if (!out) throw std::runtime_error("cannot open " + path);
  out << std::setprecision(17);
  out << "# vtk DataFile Version 3.0\ngbhe mesh\nASCII\nDATASET UNSTRUCTURED_GRID\n";
  out << "POINTS " << mesh.num_vertices() << " double\n";
  for (const auto& p : mesh.vertices()) out << p.x << ' ' << p.y << " 0\n";
  out << "CELLS " << mesh.num_cells() << ' ' << 4 * mesh.num_cells() << '\n';
  for (const auto& t : mesh.cells()) out << "3 " << t[0] << ' ' << t[1] << ' ' << t[2] << '\n';
  out << "CELL_TYPES " << mesh.num_cells() << '\n';
  for (std::size_t c = 0; c < mesh.num_cells(); ++c) out << "5\n";
}

}  // namespace gbhe
