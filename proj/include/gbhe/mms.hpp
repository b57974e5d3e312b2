#pragma once

#include <cstdint>
#include <functional>
#include <optional>
#include <string>
#include <vector>

#include "gbhe/kernel.hpp"
#include "gbhe/solver.hpp"

namespace gbhe {

using VectorSpaceTimeFunction = std::function<Vec2(const Point&, double)>;

/// Exact solution with its derivatives. Separable cases u = p(t) S(x) carry the
/// time profile p so memory and Caputo terms have closed forms.
struct ManufacturedCase {
  std::string name;
  SpaceTimeFunction u;
  SpaceTimeFunction u_t;
  VectorSpaceTimeFunction gradient;
  SpaceTimeFunction laplacian;

  std::optional<PowerSeries> time_profile;
  SpatialFunction spatial;
  std::function<Vec2(const Point&)> spatial_gradient;
  SpatialFunction spatial_laplacian;

  /// Allows quadrature in time for memory/Caputo terms of non-separable cases.
  bool numeric_convolution = false;
  /// Set when u depends on x only through wave_direction . x; numeric convolutions
  /// are then shared by all points of one wave front.
  std::optional<Vec2> wave_direction;
  bool homogeneous_boundary = true;
  /// Width of the finest feature; sets the finite-difference probe step.
  double length_scale = 1.0;
};

/// (t^3 - t^2 + 1) sin(pi x) sin(pi y)
ManufacturedCase type_one();
/// t^{3/2} sin(2 pi x) sin(2 pi y)
ManufacturedCase type_two();
/// 1 / (1 + exp(Re (x + y - t) / 2)), used with nu = 1/Re.
ManufacturedCase traveling_wave(double reynolds);
/// u = 0.
ManufacturedCase zero_case();

/// Largest relative mismatch between the exact derivatives and Richardson-extrapolated
/// central differences at random probes in (0,1)^2 x [0.1, 1].
double self_consistency_error(const ManufacturedCase& mcase, std::uint64_t seed = 7, int probes = 32);
/// Throws std::runtime_error when self_consistency_error exceeds `tol`.
void check_self_consistency(const ManufacturedCase& mcase, double tol = 1e-6);

/// f = u_t - nu Lap u + alpha u^delta (u_x + u_y) - beta c(u) - eta (K * Lap u)
///     [+ Gamma(1 - mu_c)^-1 (t^-mu_c * u_t)].
/// Throws UnsupportedCase when a convolution is needed but neither closed form nor
/// numeric quadrature is allowed.
SpaceTimeFunction forcing(const ManufacturedCase& mcase, const ModelParams& params, const KernelSpec& kernel,
                          std::optional<double> caputo_order = std::nullopt);

/// ||u_h - u(t)||_{L2} by degree-6 cell quadrature.
double error_l2(const Space& space, std::span<const double> uh, const SpaceTimeFunction& exact, double t);

/// sqrt(dt sum_k (||grad_h u_h^k - grad u(t_k)||^2 [+ sum_E gamma_h ||[[u_h^k - u(t_k)]]||^2 for DG])).
double error_energy(const Trajectory& traj, const ManufacturedCase& mcase, double penalty_gamma);

/// max_k ||u_h^k - u(t_k)||_{L2} over the time nodes.
double error_l2_inf(const Trajectory& traj, const ManufacturedCase& mcase);

struct StudyConfig {
  ManufacturedCase mcase;
  SpaceKind scheme = SpaceKind::CR;
  ModelParams params;
  KernelSpec kernel = KernelSpec::power_law(0.5);
  std::optional<double> caputo_order;
  std::vector<int> levels{8, 16, 32, 64};  // cells per side of the unit square
  double t_final = 1.0;
  double dt_ratio = 0.25;                  // dt = dt_ratio * h
  NewtonOptions newton;
  bool stability = false;                  // evaluate the stability estimate per level
};

struct ConvergenceRow {
  int level = 0;
  double h = 0.0;
  double dt = 0.0;
  std::size_t dofs = 0;
  double err_l2_inf = 0.0;
  double err_energy = 0.0;
  double rate_l2 = 0.0;      // NaN on the first level
  double rate_energy = 0.0;  // NaN on the first level
  int newton_max = 0;
  std::optional<StabilityReport> stability;
};

/// Builds the problem for one level of a study.
Problem make_mms_problem(const StudyConfig& cfg, int n);

/// Runs every level (after the self-consistency gate); rates are log2 ratios of successive levels.
std::vector<ConvergenceRow> convergence_study(const StudyConfig& cfg,
                                              const std::function<void(const ConvergenceRow&)>& on_row = {});

}  // namespace gbhe
