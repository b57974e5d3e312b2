#pragma once

#include <functional>
#include <vector>

#include "gbhe/geometry.hpp"
#include "gbhe/mesh.hpp"

namespace gbhe {

/// Quadrature on the reference triangle (barycentric points, weights summing to 1/2).
struct TriangleRule {
  int degree = 0;
  std::vector<Barycentric> points;
  std::vector<double> weights;
};

/// Quadrature on [0, 1] (weights summing to 1).
struct EdgeRule {
  int degree = 0;
  std::vector<double> points;
  std::vector<double> weights;
};

inline constexpr int kMaxQuadratureDegree = 10;

/// Positive-weight rule exact for total degree <= `degree` (1..10).
const TriangleRule& triangle_rule(int degree);

/// Gauss-Legendre rule on [0,1] exact for degree <= `degree` (1..10).
const EdgeRule& edge_rule(int degree);

/// Gauss-Legendre nodes/weights on [-1, 1].
void gauss_legendre(int n, std::vector<double>& nodes, std::vector<double>& weights);

/// Physical point of barycentric coordinates inside cell `cell`.
Point map_to_cell(const Mesh& mesh, std::size_t cell, const Barycentric& lambda);

/// Affine-mapped sum  sum_q w_q |det J| f(x_q).
double integrate_cell(const Mesh& mesh, std::size_t cell, const std::function<double(const Point&)>& integrand,
                      const TriangleRule& rule);

/// Sum of integrate_cell over all cells.
double integrate_mesh(const Mesh& mesh, const std::function<double(const Point&)>& integrand, const TriangleRule& rule);

/// Spatial quadrature degree for the nonlinear convection/reaction terms:
/// max(2*delta + 3, 4), capped at the highest tabulated degree.
constexpr int nonlinear_quadrature_degree(int delta) {
  const int d = 2 * delta + 3 > 4 ? 2 * delta + 3 : 4;
  return d < kMaxQuadratureDegree ? d : kMaxQuadratureDegree;
}

}  // namespace gbhe
