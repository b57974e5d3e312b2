#pragma once

// Reference computations shared by the unit and acceptance tests. They avoid the
// library's own formulas on purpose.

#include <algorithm>
#include <cmath>
#include <functional>
#include <memory>
#include <random>
#include <vector>

#include "gbhe/mesh.hpp"
#include "gbhe/space.hpp"

namespace oracle {

/// Tanh-sinh quadrature of f over [a, b]. f receives the point and its distances
/// to both endpoints, so integrands singular at an endpoint keep full precision.
inline double tanh_sinh(const std::function<double(double x, double from_a, double to_b)>& f, double a, double b,
                        double step = 1.0 / 64.0) {
  const double half = 0.5 * (b - a);
  if (half <= 0.0) return 0.0;
  const double pi2 = 0.5 * M_PI;
  double sum = 0.0;
  for (int k = 0;; ++k) {
    const double tau = k * step;
    const double u = pi2 * std::sinh(tau);
    const double c = 1.0 / (1.0 + std::exp(2.0 * u));  // (1 - x) / 2
    const double ch = std::cosh(u);
    const double w = pi2 * std::cosh(tau) / (ch * ch) * half;
    if (!(c > 1e-300) || w < 1e-300) break;
    const double d = 2.0 * half * c;
    if (k == 0) {
      sum += w * f(a + half, half, half);
    } else {
      sum += w * f(b - d, 2.0 * half - d, d);
      sum += w * f(a + d, d, 2.0 * half - d);
    }
  }
  return sum * step;
}

/// dt^-2 int_{t_{k-1}}^{t_k} int_{t_{j-1}}^{min(t, t_j)} (t - s)^-mu ds dt by nested
/// tanh-sinh rules, written in the lag variable d = t - s so the singularity sits at d = 0.
inline double power_weight(double mu, double dt, int k, int j) {
  const double tk0 = (k - 1) * dt;
  auto inner = [&](double t, double t_from_left) {
    // d ranges over [t - min(t, t_j), t - t_{j-1}].
    double d0;
    double d1;
    if (j == k) {
      d0 = 0.0;
      d1 = t_from_left;
    } else {
      d0 = t - j * dt;
      d1 = t - (j - 1) * dt;
      if (j == k - 1) {
        d0 = t_from_left;
        d1 = t_from_left + dt;
      }
    }
    return tanh_sinh([mu](double d, double, double) { return d > 0.0 ? std::pow(d, -mu) : 0.0; }, d0, d1);
  };
  const double outer = tanh_sinh([&](double t, double from_a, double) { return inner(t, from_a); }, tk0, k * dt,
                                 1.0 / 32.0);
  return outer / (dt * dt);
}

inline std::vector<double> random_vector(std::size_t n, std::mt19937_64& rng, double lo = -1.0, double hi = 1.0) {
  std::uniform_real_distribution<double> dist(lo, hi);
  std::vector<double> v(n);
  for (auto& x : v) x = dist(rng);
  return v;
}

inline std::shared_ptr<const gbhe::Space> unit_space(int n, gbhe::SpaceKind kind) {
  auto mesh = std::make_shared<const gbhe::Mesh>(gbhe::generate_rect_mesh(gbhe::Box{}, n));
  return std::make_shared<const gbhe::Space>(mesh, kind);
}

inline double max_abs_diff(const std::vector<double>& a, const std::vector<double>& b) {
  double m = 0.0;
  for (std::size_t i = 0; i < a.size(); ++i) m = std::max(m, std::abs(a[i] - b[i]));
  return m;
}

inline double norm(const std::vector<double>& a) {
  double s = 0.0;
  for (double x : a) s += x * x;
  return std::sqrt(s);
}

/// Relative mismatch between J w and a central difference of F along w.
template <class F, class J>
double directional_fd_error(const F& residual, const J& jacobian_times, const std::vector<double>& u,
                            const std::vector<double>& w, double eps = 1e-6) {
  std::vector<double> up = u;
  std::vector<double> um = u;
  for (std::size_t i = 0; i < u.size(); ++i) {
    up[i] += eps * w[i];
    um[i] -= eps * w[i];
  }
  const auto rp = residual(up);
  const auto rm = residual(um);
  const std::vector<double> jw = jacobian_times(w);
  std::vector<double> diff(u.size());
  for (std::size_t i = 0; i < u.size(); ++i) diff[i] = (rp[i] - rm[i]) / (2.0 * eps) - jw[i];
  return norm(diff) / std::max(norm(jw), 1e-300);
}

}  // namespace oracle
