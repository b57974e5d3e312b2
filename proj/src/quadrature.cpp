#include "gbhe/quadrature.hpp"

#include <algorithm>
#include <array>
#include <cmath>
#include <numbers>
#include <stdexcept>
#include <string>

namespace gbhe {

void gauss_legendre(int n, std::vector<double>& nodes, std::vector<double>& weights) {
  if (n < 1) throw std::invalid_argument("gauss_legendre: n must be >= 1");
  nodes.assign(static_cast<std::size_t>(n), 0.0);
  weights.assign(static_cast<std::size_t>(n), 0.0);
  for (int i = 0; i < (n + 1) / 2; ++i) {
    double x = std::cos(std::numbers::pi * (i + 0.75) / (n + 0.5));
    double dp = 1.0;
    for (int it = 0; it < 100; ++it) {
      // Legendre recurrence: p1 = P_n(x), p0 = P_{n-1}(x).
      double p0 = 1.0;
      double p1 = x;
      for (int k = 2; k <= n; ++k) {
        const double p2 = ((2.0 * k - 1.0) * x * p1 - (k - 1.0) * p0) / k;
        p0 = p1;
        p1 = p2;
      }
      if (n == 1) {
        p0 = 1.0;
        p1 = x;
      }
      dp = n * (x * p1 - p0) / (x * x - 1.0);
      const double dx = p1 / dp;
      x -= dx;
      if (std::abs(dx) <= 1e-15 * std::max(1.0, std::abs(x))) break;
    }
    const double w = 2.0 / ((1.0 - x * x) * dp * dp);
    nodes[static_cast<std::size_t>(i)] = -x;
    nodes[static_cast<std::size_t>(n - 1 - i)] = x;
    weights[static_cast<std::size_t>(i)] = w;
    weights[static_cast<std::size_t>(n - 1 - i)] = w;
  }
  if (n % 2 == 1) nodes[static_cast<std::size_t>(n / 2)] = 0.0;
}

namespace {

void add_orbit3(TriangleRule& r, double a, double w) {
  const double b = 1.0 - 2.0 * a;
  r.points.push_back({b, a, a});
  r.points.push_back({a, b, a});
  r.points.push_back({a, a, b});
  for (int i = 0; i < 3; ++i) r.weights.push_back(0.5 * w);
}

// Collapsed (Duffy) product of Gauss-Legendre rules, averaged over the three cyclic
// relabelings of the vertices; positive weights, exact to 2n-2.
TriangleRule conical_rule(int degree) {
  const int n = (degree + 3) / 2;
  std::vector<double> x, w;
  gauss_legendre(n, x, w);
  TriangleRule r;
  r.degree = degree;
  for (int i = 0; i < n; ++i) {
    const double s = 0.5 * (x[static_cast<std::size_t>(i)] + 1.0);
    const double ws = 0.5 * w[static_cast<std::size_t>(i)];
    for (int j = 0; j < n; ++j) {
      const double t = 0.5 * (x[static_cast<std::size_t>(j)] + 1.0);
      const double wt = 0.5 * w[static_cast<std::size_t>(j)];
      const double px = s;
      const double py = t * (1.0 - s);
      const double l0 = 1.0 - px - py;
      const double wq = ws * wt * (1.0 - s) / 3.0;
      for (const Barycentric& b : {Barycentric{l0, px, py}, Barycentric{py, l0, px}, Barycentric{px, py, l0}}) {
        r.points.push_back(b);
        r.weights.push_back(wq);
      }
    }
  }
  return r;
}

TriangleRule make_triangle_rule(int degree) {
  TriangleRule r;
  r.degree = degree;
  switch (degree) {
    case 1:
      r.points.push_back({1.0 / 3.0, 1.0 / 3.0, 1.0 / 3.0});
      r.weights.push_back(0.5);
      return r;
    case 2:
      add_orbit3(r, 1.0 / 6.0, 1.0 / 3.0);
      return r;
    case 3:
    case 4:
      // Strang-Fix / Dunavant six-point rule.
      add_orbit3(r, 0.44594849091596488632, 0.22338158967801146570);
      add_orbit3(r, 0.091576213509770743460, 0.10995174365532186764);
      return r;
    case 5: {
      const double s15 = std::sqrt(15.0);
      r.points.push_back({1.0 / 3.0, 1.0 / 3.0, 1.0 / 3.0});
      r.weights.push_back(0.5 * 9.0 / 40.0);
      add_orbit3(r, (6.0 - s15) / 21.0, (155.0 - s15) / 1200.0);
      add_orbit3(r, (6.0 + s15) / 21.0, (155.0 + s15) / 1200.0);
      return r;
    }
    default:
      return conical_rule(degree);
  }
}

}  // namespace

const TriangleRule& triangle_rule(int degree) {
  static const auto rules = [] {
    std::array<TriangleRule, kMaxQuadratureDegree + 1> all{};
    for (int d = 1; d <= kMaxQuadratureDegree; ++d) all[static_cast<std::size_t>(d)] = make_triangle_rule(d);
    return all;
  }();
  if (degree < 1 || degree > kMaxQuadratureDegree) {
    throw std::invalid_argument("triangle_rule: unsupported degree " + std::to_string(degree));
  }
  return rules[static_cast<std::size_t>(degree)];
}

const EdgeRule& edge_rule(int degree) {
  static const auto rules = [] {
    std::array<EdgeRule, kMaxQuadratureDegree + 1> all{};
    for (int d = 1; d <= kMaxQuadratureDegree; ++d) {
      auto& r = all[static_cast<std::size_t>(d)];
      r.degree = d;
      std::vector<double> x, w;
      gauss_legendre((d + 2) / 2, x, w);
      for (std::size_t i = 0; i < x.size(); ++i) {
        r.points.push_back(0.5 * (x[i] + 1.0));
        r.weights.push_back(0.5 * w[i]);
      }
    }
    return all;
  }();
  if (degree < 1 || degree > kMaxQuadratureDegree) {
    throw std::invalid_argument("edge_rule: unsupported degree " + std::to_string(degree));
  }
  return rules[static_cast<std::size_t>(degree)];
}

Point map_to_cell(const Mesh& mesh, std::size_t cell, const Barycentric& lambda) {
  const auto& t = mesh.cells()[cell];
  Point p;
  for (int i = 0; i < 3; ++i) {
    p += lambda[static_cast<std::size_t>(i)] * mesh.vertices()[static_cast<std::size_t>(t[static_cast<std::size_t>(i)])];
  }
  return p;
}

double integrate_cell(const Mesh& mesh, std::size_t cell, const std::function<double(const Point&)>& integrand,
                      const TriangleRule& rule) {
  const double det = 2.0 * mesh.cell_area(cell);
  double sum = 0.0;
  for (std::size_t q = 0; q < rule.points.size(); ++q) {
    sum += rule.weights[q] * integrand(map_to_cell(mesh, cell, rule.points[q]));
  }
  return det * sum;
}

double integrate_mesh(const Mesh& mesh, const std::function<double(const Point&)>& integrand, const TriangleRule& rule) {
  double sum = 0.0;
  for (std::size_t c = 0; c < mesh.num_cells(); ++c) sum += integrate_cell(mesh, c, integrand, rule);
  return sum;
}

}  // namespace gbhe
