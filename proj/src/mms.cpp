#include "gbhe/mms.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <memory>
#include <numbers>
#include <random>
#include <stdexcept>
#include <unordered_map>

#include "gbhe/errors.hpp"
#include "gbhe/quadrature.hpp"

namespace gbhe {

namespace {

using std::numbers::pi;

ManufacturedCase separable(std::string name, PowerSeries profile, double freq) {
  ManufacturedCase c;
  c.name = std::move(name);
  const double k = freq * pi;
  const PowerSeries dp = profile.derivative();
  c.time_profile = profile;
  c.spatial = [k](const Point& x) { return std::sin(k * x.x) * std::sin(k * x.y); };
  c.spatial_gradient = [k](const Point& x) {
    return Vec2{k * std::cos(k * x.x) * std::sin(k * x.y), k * std::sin(k * x.x) * std::cos(k * x.y)};
  };
  c.spatial_laplacian = [k](const Point& x) { return -2.0 * k * k * std::sin(k * x.x) * std::sin(k * x.y); };
  c.u = [profile, k](const Point& x, double t) { return profile(t) * std::sin(k * x.x) * std::sin(k * x.y); };
  c.u_t = [dp, k](const Point& x, double t) { return dp(t) * std::sin(k * x.x) * std::sin(k * x.y); };
  c.gradient = [profile, k](const Point& x, double t) {
    const double p = profile(t);
    return Vec2{p * k * std::cos(k * x.x) * std::sin(k * x.y), p * k * std::sin(k * x.x) * std::cos(k * x.y)};
  };
  c.laplacian = [profile, k](const Point& x, double t) {
    return -2.0 * k * k * profile(t) * std::sin(k * x.x) * std::sin(k * x.y);
  };
  c.length_scale = 1.0 / freq;
  return c;
}

}  // namespace

ManufacturedCase type_one() { return separable("TypeI", PowerSeries{{1.0, -1.0, 1.0}, {3.0, 2.0, 0.0}}, 1.0); }

ManufacturedCase type_two() { return separable("TypeII", PowerSeries{{1.0}, {1.5}}, 2.0); }

ManufacturedCase traveling_wave(double re) {
  if (!(re > 0.0)) throw std::invalid_argument("traveling_wave: Reynolds number must be positive");
  ManufacturedCase c;
  c.name = "TravelingWave(Re=" + std::to_string(static_cast<int>(re)) + ")";
  const double a = 0.5 * re;
  // sigma(z) = 1 / (1 + e^z), sigma' = -sigma (1 - sigma), sigma'' = sigma' (2 sigma - 1)
  auto sigma = [a](const Point& x, double t) {
    const double z = a * (x.x + x.y - t);
    if (z > 0.0) {
      const double e = std::exp(-z);
      return e / (1.0 + e);
    }
    return 1.0 / (1.0 + std::exp(z));
  };
  c.u = sigma;
  c.u_t = [a, sigma](const Point& x, double t) {
    const double s = sigma(x, t);
    return a * s * (1.0 - s);
  };
  c.gradient = [a, sigma](const Point& x, double t) {
    const double s = sigma(x, t);
    const double d = -a * s * (1.0 - s);
    return Vec2{d, d};
  };
  c.laplacian = [a, sigma](const Point& x, double t) {
    const double s = sigma(x, t);
    const double d1 = -s * (1.0 - s);
    return 2.0 * a * a * d1 * (2.0 * s - 1.0);
  };
  c.numeric_convolution = true;
  c.wave_direction = Vec2{1.0, 1.0};
  c.homogeneous_boundary = false;
  c.length_scale = 1.0 / a;
  return c;
}

ManufacturedCase zero_case() {
  ManufacturedCase c;
  c.name = "Zero";
  c.time_profile = PowerSeries{};
  c.spatial = [](const Point&) { return 0.0; };
  c.spatial_gradient = [](const Point&) { return Vec2{}; };
  c.spatial_laplacian = [](const Point&) { return 0.0; };
  c.u = [](const Point&, double) { return 0.0; };
  c.u_t = [](const Point&, double) { return 0.0; };
  c.gradient = [](const Point&, double) { return Vec2{}; };
  c.laplacian = [](const Point&, double) { return 0.0; };
  return c;
}

double self_consistency_error(const ManufacturedCase& mc, std::uint64_t seed, int probes) {
  std::mt19937_64 rng(seed);
  std::uniform_real_distribution<double> space01(0.05, 0.95);
  std::uniform_real_distribution<double> time01(0.1, 1.0);
  const double h = 1e-2 * mc.length_scale;
  const double ht = 1e-2 * std::min(1.0, mc.length_scale);
  // Richardson-extrapolated central differences, O(h^4).
  auto d1 = [](auto&& f, double hh) {
    const double a = (f(hh) - f(-hh)) / (2.0 * hh);
    const double b = (f(0.5 * hh) - f(-0.5 * hh)) / hh;
    return (4.0 * b - a) / 3.0;
  };
  auto d2 = [](auto&& f, double hh) {
    const double a = (f(hh) - 2.0 * f(0.0) + f(-hh)) / (hh * hh);
    const double q = 0.5 * hh;
    const double b = (f(q) - 2.0 * f(0.0) + f(-q)) / (q * q);
    return (4.0 * b - a) / 3.0;
  };
  auto rel = [](double exact, double approx, double scale) { return std::abs(exact - approx) / (1.0 + scale); };
  double worst = 0.0;
  for (int i = 0; i < probes; ++i) {
    const Point x{space01(rng), space01(rng)};
    const double t = time01(rng);
    auto fx = [&](double s) { return mc.u({x.x + s, x.y}, t); };
    auto fy = [&](double s) { return mc.u({x.x, x.y + s}, t); };
    auto ft = [&](double s) { return mc.u(x, t + s); };
    const Vec2 g = mc.gradient(x, t);
    const double gscale = norm(g);
    const double lap = mc.laplacian(x, t);
    const double ut = mc.u_t(x, t);
    worst = std::max(worst, rel(g.x, d1(fx, h), gscale));
    worst = std::max(worst, rel(g.y, d1(fy, h), gscale));
    worst = std::max(worst, rel(lap, d2(fx, h) + d2(fy, h), std::abs(lap)));
    worst = std::max(worst, rel(ut, d1(ft, ht), std::abs(ut)));
    if (mc.time_profile && mc.spatial && mc.spatial_laplacian) {
      const double p = (*mc.time_profile)(t);
      worst = std::max(worst, rel(mc.u(x, t), p * mc.spatial(x), std::abs(mc.u(x, t))));
      worst = std::max(worst, rel(lap, p * mc.spatial_laplacian(x), std::abs(lap)));
    }
  }
  return worst;
}

void check_self_consistency(const ManufacturedCase& mc, double tol) {
  const double e = self_consistency_error(mc);
  if (!(e <= tol)) {
    throw std::runtime_error("manufactured case " + mc.name + " fails the derivative self-consistency gate (" +
                             std::to_string(e) + ")");
  }
}

SpaceTimeFunction forcing(const ManufacturedCase& mc, const ModelParams& params, const KernelSpec& kernel,
                          std::optional<double> caputo_order) {
  params.validate();
  const bool memory = params.eta > 0.0;
  const bool closed = mc.time_profile.has_value() && mc.spatial && mc.spatial_gradient && mc.spatial_laplacian;
  if ((memory || caputo_order) && !closed && !mc.numeric_convolution) {
    throw UnsupportedCase("case " + mc.name + " has no decomposable time profile for the convolution terms");
  }
  if (memory) kernel.validate();
  std::optional<KernelSpec> caputo_kernel;
  if (caputo_order) {
    if (!(*caputo_order > 0.0 && *caputo_order < 1.0)) throw std::invalid_argument("Caputo order must lie in (0,1)");
    caputo_kernel = KernelSpec::power_law(*caputo_order);
  }
  const double caputo_scale = caputo_order ? 1.0 / std::tgamma(1.0 - *caputo_order) : 0.0;

  if (closed) {
    // u = p(t) S(x): every time factor is shared by all points of one time level.
    struct TimeFactors {
      double t = std::numeric_limits<double>::quiet_NaN();
      double p = 0.0;
      double dp = 0.0;
      double memory = 0.0;
      double caputo = 0.0;
    };
    const PowerSeries profile = *mc.time_profile;
    const PowerSeries dprofile = profile.derivative();
    auto cache = std::make_shared<TimeFactors>();
    return [mc, params, kernel, memory, caputo_kernel, caputo_scale, profile, dprofile, cache](const Point& x,
                                                                                            double t) {
      TimeFactors& tf = *cache;
      if (tf.t != t) {
        tf.t = t;
        tf.p = profile(t);
        tf.dp = dprofile(t);
        tf.memory = memory ? convolve_power(profile, kernel, t) : 0.0;
        tf.caputo = caputo_kernel ? convolve_power(dprofile, *caputo_kernel, t) : 0.0;
      }
      const double s = mc.spatial(x);
      const double lap = mc.spatial_laplacian(x);
      const Vec2 g = tf.p * mc.spatial_gradient(x);
      const double u = tf.p * s;
      double f = tf.dp * s - params.nu * tf.p * lap + params.alpha * ipow(u, params.delta) * (g.x + g.y) -
                 params.beta * reaction_value(u, params);
      if (memory) f -= params.eta * lap * tf.memory;
      if (caputo_kernel) f += caputo_scale * s * tf.caputo;
      return f;
    };
  }

  // Convolution terms of one time level, keyed by the wave coordinate when there is one.
  struct FrontCache {
    double t = std::numeric_limits<double>::quiet_NaN();
    std::unordered_map<std::int64_t, std::pair<double, double>> values;
  };
  auto cache = std::make_shared<FrontCache>();
  return [mc, params, kernel, memory, caputo_kernel, caputo_scale, cache](const Point& x, double t) {
    const double u = mc.u(x, t);
    const Vec2 g = mc.gradient(x, t);
    double f = mc.u_t(x, t) - params.nu * mc.laplacian(x, t) +
               params.alpha * ipow(u, params.delta) * (g.x + g.y) - params.beta * reaction_value(u, params);
    if (!memory && !caputo_kernel) return f;
    auto convolutions = [&] {
      std::pair<double, double> c{0.0, 0.0};
      if (memory) c.first = convolve_numeric([&](double s) { return mc.laplacian(x, s); }, kernel, t);
      if (caputo_kernel) c.second = convolve_numeric([&](double s) { return mc.u_t(x, s); }, *caputo_kernel, t);
      return c;
    };
    std::pair<double, double> c;
    if (mc.wave_direction) {
      if (cache->t != t) {
        cache->t = t;
        cache->values.clear();
      }
      // Points on one front agree to roundoff; 2^-36 buckets merge them.
      const double xi = dot(*mc.wave_direction, Vec2{x.x, x.y});
      const auto key = static_cast<std::int64_t>(std::llround(std::ldexp(xi, 36)));
      auto it = cache->values.find(key);
      if (it == cache->values.end()) it = cache->values.emplace(key, convolutions()).first;
      c = it->second;
    } else {
      c = convolutions();
    }
    f -= params.eta * c.first;
    f += caputo_scale * c.second;
    return f;
  };
}

double error_l2(const Space& space, std::span<const double> uh, const SpaceTimeFunction& exact, double t) {
  const auto& rule = triangle_rule(6);
  double s = 0.0;
  for (std::size_t c = 0; c < space.mesh().num_cells(); ++c) {
    const double det = 2.0 * space.cell(c).area;
    for (std::size_t q = 0; q < rule.points.size(); ++q) {
      const double e = space.evaluate(uh, c, rule.points[q]) - exact(map_to_cell(space.mesh(), c, rule.points[q]), t);
      s += det * rule.weights[q] * e * e;
    }
  }
  return std::sqrt(s);
}

double error_l2_inf(const Trajectory& traj, const ManufacturedCase& mc) {
  if (traj.u.size() != traj.times.size()) throw std::invalid_argument("error_l2_inf: trajectory fields were not kept");
  double m = 0.0;
  for (std::size_t k = 0; k < traj.u.size(); ++k) m = std::max(m, error_l2(*traj.space, traj.u[k], mc.u, traj.times[k]));
  return m;
}

double error_energy(const Trajectory& traj, const ManufacturedCase& mc, double penalty_gamma) {
  if (traj.u.size() != traj.times.size()) throw std::invalid_argument("error_energy: trajectory fields were not kept");
  const Space& space = *traj.space;
  const auto& mesh = space.mesh();
  const auto& rule = triangle_rule(6);
  const bool dg = space.kind() == SpaceKind::DG;
  const std::vector<EdgeTraceContext> none;
  const auto& edges = dg ? space.edge_contexts(4) : none;
  double total = 0.0;
  for (std::size_t k = 1; k < traj.u.size(); ++k) {
    const double t = traj.times[k];
    const double dt = traj.times[k] - traj.times[k - 1];
    const auto& uh = traj.u[k];
    double s = 0.0;
    for (std::size_t c = 0; c < mesh.num_cells(); ++c) {
      const Vec2 gh = space.gradient(uh, c);
      const double det = 2.0 * space.cell(c).area;
      for (std::size_t q = 0; q < rule.points.size(); ++q) {
        const Vec2 e = gh - mc.gradient(map_to_cell(mesh, c, rule.points[q]), t);
        s += det * rule.weights[q] * dot(e, e);
      }
    }
    if (dg) {
      for (const auto& ctx : edges) {
        const double gh = penalty_coeff(ctx, penalty_gamma);
        for (std::size_t q = 0; q < ctx.weights.size(); ++q) {
          const double exact = mc.u(ctx.points[q], t);
          const double up = space.evaluate(uh, static_cast<std::size_t>(ctx.plus), ctx.plus_points[q]);
          const double um = ctx.is_boundary() ? exact
                                              : space.evaluate(uh, static_cast<std::size_t>(ctx.minus), ctx.minus_points[q]);
          const double j = up - um;
          s += gh * ctx.weights[q] * j * j;
        }
      }
    }
    total += dt * s;
  }
  return std::sqrt(total);
}

Problem make_mms_problem(const StudyConfig& cfg, int n) {
  auto mesh = std::make_shared<const Mesh>(generate_rect_mesh(Box{0.0, 0.0, 1.0, 1.0}, n));
  Problem p;
  p.space = std::make_shared<const Space>(mesh, cfg.scheme);
  p.params = cfg.params;
  p.kernel = cfg.kernel;
  p.caputo_order = cfg.caputo_order;
  const double h = 1.0 / n;
  const int steps = std::max(1, static_cast<int>(std::lround(cfg.t_final / (cfg.dt_ratio * h))));
  p.grid = TimeGrid{cfg.t_final, steps};
  const auto exact = cfg.mcase.u;
  p.initial = [exact](const Point& x) { return exact(x, 0.0); };
  p.forcing = forcing(cfg.mcase, cfg.params, cfg.kernel, cfg.caputo_order);
  if (!cfg.mcase.homogeneous_boundary) p.dirichlet = exact;
  p.newton = cfg.newton;
  return p;
}

std::vector<ConvergenceRow> convergence_study(const StudyConfig& cfg,
                                              const std::function<void(const ConvergenceRow&)>& on_row) {
  if (cfg.levels.size() < 3) throw std::invalid_argument("convergence_study: at least three levels are required");
  check_self_consistency(cfg.mcase);
  std::vector<ConvergenceRow> rows;
  for (std::size_t l = 0; l < cfg.levels.size(); ++l) {
    const int n = cfg.levels[l];
    const Problem problem = make_mms_problem(cfg, n);
    const Trajectory traj = run(problem);
    ConvergenceRow row;
    row.level = static_cast<int>(l);
    row.h = 1.0 / n;
    row.dt = problem.grid.delta_t();
    row.dofs = problem.space->size();
    row.err_l2_inf = error_l2_inf(traj, cfg.mcase);
    row.err_energy = error_energy(traj, cfg.mcase, cfg.params.penalty_gamma);
    row.newton_max = traj.newton_max();
    const double nan = std::numeric_limits<double>::quiet_NaN();
    row.rate_l2 = l == 0 ? nan : std::log2(rows.back().err_l2_inf / row.err_l2_inf);
    row.rate_energy = l == 0 ? nan : std::log2(rows.back().err_energy / row.err_energy);
    if (cfg.stability) row.stability = stability_check(traj, problem);
    if (on_row) on_row(row);
    rows.push_back(std::move(row));
  }
  return rows;
}

}  // namespace gbhe
