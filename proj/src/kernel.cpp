#include "gbhe/kernel.hpp"

#include <algorithm>
#include <cmath>
#include <sstream>
#include <stdexcept>

#include "gbhe/errors.hpp"
#include "gbhe/quadrature.hpp"

namespace gbhe {

KernelSpec KernelSpec::power_law(double mu) {
  KernelSpec k;
  k.kind = KernelKind::PowerLaw;
  k.mu = mu;
  k.validate();
  return k;
}

KernelSpec KernelSpec::constant(double value) {
  KernelSpec k;
  k.kind = KernelKind::Constant;
  k.mu = 0.0;
  k.value = value;
  k.validate();
  return k;
}

KernelSpec KernelSpec::tabulated(std::vector<double> times, std::vector<double> values) {
  KernelSpec k;
  k.kind = KernelKind::Tabulated;
  k.mu = 0.0;
  k.times = std::move(times);
  k.values = std::move(values);
  k.validate();
  return k;
}

void KernelSpec::validate() const {
  switch (kind) {
    case KernelKind::PowerLaw:
      if (!(mu >= 0.0 && mu < 1.0)) throw std::invalid_argument("kernel exponent mu must lie in [0,1)");
      break;
    case KernelKind::Constant:
      if (!(value >= 0.0) || !std::isfinite(value)) throw std::invalid_argument("constant kernel must be >= 0");
      break;
    case KernelKind::Tabulated:
      if (times.size() < 2 || times.size() != values.size())
        throw std::invalid_argument("tabulated kernel needs >= 2 matching (time, value) pairs");
      if (times.front() != 0.0) throw std::invalid_argument("tabulated kernel must start at t = 0");
      for (std::size_t i = 1; i < times.size(); ++i) {
        if (!(times[i] > times[i - 1])) throw std::invalid_argument("tabulated kernel times must increase");
      }
      for (double v : values) {
        if (!(v >= 0.0) || !std::isfinite(v)) throw std::invalid_argument("tabulated kernel values must be >= 0");
      }
      break;
  }
}

namespace {

// Index of the table segment containing t (clamped to the last one).
std::size_t segment_of(const std::vector<double>& times, double t) {
  const auto it = std::upper_bound(times.begin(), times.end(), t);
  const auto i = static_cast<std::size_t>(std::max<std::ptrdiff_t>(it - times.begin() - 1, 0));
  return std::min(i, times.size() - 2);
}

}  // namespace

double KernelSpec::operator()(double t) const {
  switch (kind) {
    case KernelKind::PowerLaw:
      return mu == 0.0 ? 1.0 : std::pow(t, -mu);
    case KernelKind::Constant:
      return value;
    case KernelKind::Tabulated: {
      if (t >= times.back()) return values.back();
      const std::size_t i = segment_of(times, t);
      const double s = (t - times[i]) / (times[i + 1] - times[i]);
      return (1.0 - s) * values[i] + s * values[i + 1];
    }
  }
  return 0.0;
}

double KernelSpec::antiderivative(double x) const {
  if (x <= 0.0) return 0.0;
  switch (kind) {
    case KernelKind::PowerLaw:
      return std::pow(x, 1.0 - mu) / (1.0 - mu);
    case KernelKind::Constant:
      return value * x;
    case KernelKind::Tabulated: {
      double sum = 0.0;
      for (std::size_t i = 0; i + 1 < times.size() && times[i] < x; ++i) {
        const double b = std::min(times[i + 1], x);
        const double len = b - times[i];
        const double slope = (values[i + 1] - values[i]) / (times[i + 1] - times[i]);
        sum += values[i] * len + 0.5 * slope * len * len;
      }
      if (x > times.back()) sum += values.back() * (x - times.back());
      return sum;
    }
  }
  return 0.0;
}

double KernelSpec::double_antiderivative(double x) const {
  if (x <= 0.0) return 0.0;
  switch (kind) {
    case KernelKind::PowerLaw:
      return std::pow(x, 2.0 - mu) / ((1.0 - mu) * (2.0 - mu));
    case KernelKind::Constant:
      return 0.5 * value * x * x;
    case KernelKind::Tabulated: {
      // int_a^b (x - s)(K_a + m (s - a)) ds per segment
      double sum = 0.0;
      for (std::size_t i = 0; i + 1 < times.size() && times[i] < x; ++i) {
        const double a = times[i];
        const double len = std::min(times[i + 1], x) - a;
        const double xa = x - a;
        const double slope = (values[i + 1] - values[i]) / (times[i + 1] - a);
        sum += values[i] * (xa * len - 0.5 * len * len) + slope * (0.5 * xa * len * len - len * len * len / 3.0);
      }
      if (x > times.back()) {
        const double len = x - times.back();
        sum += 0.5 * values.back() * len * len;
      }
      return sum;
    }
  }
  return 0.0;
}

std::string KernelSpec::formula_id() const {
  std::ostringstream os;
  os.precision(17);
  switch (kind) {
    case KernelKind::PowerLaw:
      os << "powerlaw-G2diff(mu=" << mu << ")";
      break;
    case KernelKind::Constant:
      os << "constant-G2diff(K=" << value << ")";
      break;
    case KernelKind::Tabulated:
      os << "tabulated-pl-G2diff(n=" << times.size() << ")";
      break;
  }
  return os.str();
}

KernelWeights::KernelWeights(double delta_t, int n_steps, std::vector<double> by_lag)
    : delta_t_(delta_t), n_steps_(n_steps), by_lag_(std::move(by_lag)) {
  if (by_lag_.size() != static_cast<std::size_t>(n_steps_)) throw std::invalid_argument("KernelWeights: lag table size");
}

double KernelWeights::at(int k, int j) const {
  if (j < 1 || j > k || k > n_steps_) throw std::out_of_range("KernelWeights::at: need 1 <= j <= k <= N");
  return by_lag_[static_cast<std::size_t>(k - j)];
}

KernelWeights memory_weights(const KernelSpec& spec, double delta_t, int n_steps) {
  spec.validate();
  if (!(delta_t > 0.0)) throw std::invalid_argument("memory_weights: delta_t must be positive");
  if (n_steps < 1) throw std::invalid_argument("memory_weights: n_steps must be >= 1");
  std::vector<double> w(static_cast<std::size_t>(n_steps));
  const double inv = 1.0 / (delta_t * delta_t);
  if (spec.kind == KernelKind::PowerLaw) {
    // Scale out dt^{2-mu} so the second difference is taken on O(1) numbers.
    const double mu = spec.mu;
    const double c = 1.0 / ((1.0 - mu) * (2.0 - mu));
    auto g = [&](double m) { return m <= 0.0 ? 0.0 : c * std::pow(m, 2.0 - mu); };
    const double scale = std::pow(delta_t, -mu);
    w[0] = scale * g(1.0);
    for (int m = 1; m < n_steps; ++m) w[static_cast<std::size_t>(m)] = scale * (g(m + 1.0) - 2.0 * g(m) + g(m - 1.0));
  } else {
    auto g = [&](int m) { return spec.double_antiderivative(m * delta_t); };
    w[0] = inv * g(1);
    for (int m = 1; m < n_steps; ++m) w[static_cast<std::size_t>(m)] = inv * (g(m + 1) - 2.0 * g(m) + g(m - 1));
  }
  for (double v : w) {
    if (!std::isfinite(v) || v < 0.0) throw std::runtime_error("memory_weights: non-positive weight produced");
  }
  return KernelWeights(delta_t, n_steps, std::move(w));
}

KernelWeights caputo_weights(double mu_c, double delta_t, int n_steps) {
  if (!(mu_c > 0.0 && mu_c < 1.0)) throw std::invalid_argument("Caputo order must lie in (0,1)");
  return memory_weights(KernelSpec::power_law(mu_c), delta_t, n_steps);
}

double discrete_quadratic_form(const KernelWeights& w, std::span<const double> v) {
  const int n = static_cast<int>(v.size());
  if (n > w.n_steps()) throw std::invalid_argument("discrete_quadratic_form: trajectory longer than weight table");
  const double dt2 = w.delta_t() * w.delta_t();
  double sum = 0.0;
  for (int k = 1; k <= n; ++k) {
    for (int j = 1; j <= k; ++j) sum += w.at(k, j) * dt2 * v[static_cast<std::size_t>(j - 1)] * v[static_cast<std::size_t>(k - 1)];
  }
  return sum;
}

double PowerSeries::operator()(double t) const {
  double s = 0.0;
  for (std::size_t i = 0; i < coeffs.size(); ++i) s += coeffs[i] * (powers[i] == 0.0 ? 1.0 : std::pow(t, powers[i]));
  return s;
}

PowerSeries PowerSeries::derivative() const {
  PowerSeries d;
  for (std::size_t i = 0; i < coeffs.size(); ++i) {
    if (powers[i] == 0.0) continue;
    d.coeffs.push_back(coeffs[i] * powers[i]);
    d.powers.push_back(powers[i] - 1.0);
  }
  return d;
}

double convolve_power(const PowerSeries& g, const KernelSpec& spec, double t) {
  if (g.coeffs.size() != g.powers.size()) throw std::invalid_argument("convolve_power: mismatched series");
  for (double p : g.powers) {
    if (!(p > -1.0)) throw std::invalid_argument("convolve_power: powers must exceed -1");
  }
  double mu = 0.0;
  double scale = 1.0;
  if (spec.kind == KernelKind::PowerLaw) {
    mu = spec.mu;
  } else if (spec.kind == KernelKind::Constant) {
    scale = spec.value;
  } else {
    throw UnsupportedCase("convolve_power: tabulated kernels have no closed-form convolution");
  }
  if (t <= 0.0) return 0.0;
  double sum = 0.0;
  for (std::size_t i = 0; i < g.coeffs.size(); ++i) {
    const double p = g.powers[i];
    sum += g.coeffs[i] * std::pow(t, p + 1.0 - mu) * std::beta(1.0 - mu, p + 1.0);
  }
  return scale * sum;
}

double convolve_numeric(const std::function<double(double)>& g, const KernelSpec& spec, double t, int panels) {
  if (t <= 0.0) return 0.0;
  std::vector<double> x;
  std::vector<double> w;
  gauss_legendre(10, x, w);
  // Composite rule for int_a^b h(r) dr.
  auto composite = [&](double a, double b, const std::function<double(double)>& h) {
    const double len = (b - a) / panels;
    double s = 0.0;
    for (int p = 0; p < panels; ++p) {
      const double lo = a + p * len;
      for (std::size_t q = 0; q < x.size(); ++q) s += 0.5 * len * w[q] * h(lo + 0.5 * len * (x[q] + 1.0));
    }
    return s;
  };
  switch (spec.kind) {
    case KernelKind::PowerLaw: {
      const double e = 1.0 - spec.mu;
      return composite(0.0, std::pow(t, e), [&](double r) { return g(t - std::pow(r, 1.0 / e)); }) / e;
    }
    case KernelKind::Constant:
      return spec.value * composite(0.0, t, g);
    case KernelKind::Tabulated: {
      // Split at the kernel nodes (in the lag variable r = t - s).
      double s = 0.0;
      double lo = 0.0;
      for (std::size_t i = 1; i <= spec.times.size() && lo < t; ++i) {
        const double hi = i < spec.times.size() ? std::min(spec.times[i], t) : t;
        s += composite(lo, hi, [&](double r) { return spec(r) * g(t - r); });
        lo = hi;
      }
      return s;
    }
  }
  return 0.0;
}

}  // namespace gbhe
