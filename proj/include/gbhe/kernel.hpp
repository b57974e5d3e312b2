#pragma once

#include <functional>
#include <span>
#include <string>
#include <vector>

namespace gbhe {

enum class KernelKind { PowerLaw, Constant, Tabulated };

/// Memory kernel K(t). PowerLaw: t^-mu with mu in [0,1); Constant: K = value;
/// Tabulated: piecewise linear through (times, values), constant past the last node.
struct KernelSpec {
  KernelKind kind = KernelKind::PowerLaw;
  double mu = 0.5;
  double value = 1.0;
  std::vector<double> times;
  std::vector<double> values;

  static KernelSpec power_law(double mu);
  static KernelSpec constant(double value);
  static KernelSpec tabulated(std::vector<double> times, std::vector<double> values);

  /// Throws std::invalid_argument on mu outside [0,1), negative values or a malformed table.
  void validate() const;

  double operator()(double t) const;
  /// F(x) = int_0^x K.
  double antiderivative(double x) const;
  /// G(x) = int_0^x (x - s) K(s) ds, so G'' = K and G(0) = G'(0) = 0.
  double double_antiderivative(double x) const;

  /// Short identifier of the weight formula, written into output metadata.
  std::string formula_id() const;
};

/// Lower-triangular weights w_kj (1 <= j <= k <= N). Stationary kernels make
/// w_kj depend only on k - j, so storage is one entry per lag.
class KernelWeights {
 public:
  KernelWeights() = default;
  KernelWeights(double delta_t, int n_steps, std::vector<double> by_lag);

  double delta_t() const { return delta_t_; }
  int n_steps() const { return n_steps_; }
  /// w_kj; throws std::out_of_range unless 1 <= j <= k <= N.
  double at(int k, int j) const;
  double lag(int m) const { return by_lag_.at(static_cast<std::size_t>(m)); }
  const std::vector<double>& by_lag() const { return by_lag_; }

 private:
  double delta_t_ = 0.0;
  int n_steps_ = 0;
  std::vector<double> by_lag_;
};

/// w_kj = dt^-2 int_{t_{k-1}}^{t_k} int_{t_{j-1}}^{min(t, t_j)} K(t - s) ds dt from the exact
/// double antiderivative.
KernelWeights memory_weights(const KernelSpec& spec, double delta_t, int n_steps);

/// Weights of the power-law kernel t^-mu_c applied to difference quotients:
/// d_t^mu u(t_k) ~ Gamma(1 - mu_c)^-1 sum_j w_kj (u^j - u^{j-1}).
KernelWeights caputo_weights(double mu_c, double delta_t, int n_steps);

/// sum_k sum_{j<=k} w_kj dt^2 v^j v^k over v^1..v^N (v[0] is v^1).
double discrete_quadratic_form(const KernelWeights& w, std::span<const double> v);

/// Time profile g(t) = sum_i coeff_i t^power_i.
struct PowerSeries {
  std::vector<double> coeffs;
  std::vector<double> powers;

  double operator()(double t) const;
  /// g'(t) as a power series (constant terms drop out).
  PowerSeries derivative() const;
};

/// int_0^t K(t - s) g(s) ds in closed form through the Beta identity. Power-law and
/// constant kernels only (UnsupportedCase otherwise); throws std::invalid_argument for a power <= -1.
double convolve_power(const PowerSeries& g, const KernelSpec& spec, double t);

/// Same convolution for an arbitrary smooth g by composite Gauss-Legendre after the
/// substitution r = (t - s)^(1 - mu), which removes the endpoint singularity.
double convolve_numeric(const std::function<double(double)>& g, const KernelSpec& spec, double t, int panels = 8);

}  // namespace gbhe
