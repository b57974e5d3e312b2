#pragma once

#include <functional>
#include <memory>
#include <optional>
#include <vector>

#include "gbhe/forms.hpp"
#include "gbhe/kernel.hpp"
#include "gbhe/space.hpp"
#include "gbhe/sparse.hpp"

namespace gbhe {

/// Uniform steps t_k = k T / N.
struct TimeGrid {
  double t_final = 1.0;
  int n_steps = 1;

  double delta_t() const { return t_final / n_steps; }
  double time(int k) const { return k == n_steps ? t_final : k * delta_t(); }
  void validate() const;
};

struct NewtonOptions {
  double tolerance = 1e-10;
  int max_iterations = 25;
  LinearSolverKind linear_solver = LinearSolverKind::SparseLU;
};

using SpaceTimeFunction = std::function<double(const Point&, double)>;

/// Recovery variable v_t = eps (u - rho v), coupled as + v in the u equation.
struct FhnParams {
  double eps = 0.0;
  double rho = 0.0;
  SpatialFunction initial_v;  // zero when empty
};

struct Problem {
  std::shared_ptr<const Space> space;
  ModelParams params;
  KernelSpec kernel = KernelSpec::power_law(0.5);
  std::optional<double> caputo_order;
  TimeGrid grid;
  SpatialFunction initial;      // zero when empty
  SpaceTimeFunction forcing;    // zero when empty
  SpaceTimeFunction dirichlet;  // homogeneous when empty
  std::optional<FhnParams> fhn;
  NewtonOptions newton;
};

struct StepDiagnostics {
  int step = 0;
  double time = 0.0;
  int newton_iterations = 0;
  double residual = 0.0;
  std::vector<double> residual_history;  // ||R|| before the first and after every Newton update
  double l2_norm = 0.0;
  double gradient_norm = 0.0;  // broken gradient
  double energy = 0.0;         // dt sum_{j<=k} |||u^j|||^2 (CR: broken gradient, DG: with jump penalty)
};

struct Trajectory {
  std::shared_ptr<const Space> space;
  std::vector<double> times;
  /// u^0..u^N (only the last one when fields are not kept).
  std::vector<std::vector<double>> u;
  std::vector<std::vector<double>> v;
  std::vector<StepDiagnostics> diagnostics;  // diagnostics[k] belongs to t_k; entry 0 describes u^0

  int newton_max() const;
};

/// Backward Euler + Newton for the generalized Burgers-Huxley equation with
/// memory, optional Caputo term and optional FitzHugh-Nagumo coupling.
class TimeStepper {
 public:
  explicit TimeStepper(Problem problem);

  const Problem& problem() const { return problem_; }
  int steps_taken() const { return k_; }
  double time() const { return problem_.grid.time(k_); }
  const std::vector<double>& current() const { return u_; }
  const std::vector<double>& current_v() const { return v_; }
  /// Diagnostics of the initial state (step 0).
  StepDiagnostics initial_diagnostics() const;

  /// Advances to t_{k+1}; throws StepFailure when Newton hits the cap.
  StepDiagnostics step();

  /// Assembles the data of step k+1 (load, history, boundary values); step() calls it.
  void prepare_step();
  /// Full nonlinear residual of step k+1 at a trial state (after the Dirichlet
  /// lift for CR) and its Jacobian. Valid after prepare_step().
  std::vector<double> residual(std::span<const double> u, SparseMatrix* jacobian = nullptr) const;

 private:
  double energy_density(std::span<const double> u) const;

  Problem problem_;
  const Space& space_;
  SparseMatrix mass_;
  SparseMatrix stiffness_;
  SparseMatrix linear_;  // constant part of the Newton matrix
  KernelWeights memory_;
  KernelWeights caputo_;
  double caputo_scale_ = 0.0;  // 1 / Gamma(1 - mu_c)
  double fhn_gain_ = 0.0;      // dv^k / du^k
  LinearSolver solver_;

  int k_ = 0;
  std::vector<double> u_;
  std::vector<double> v_;
  std::vector<std::vector<double>> u_hist_;      // Caputo needs differences of all past states
  std::vector<std::vector<double>> memory_hist_; // A u^j - b_g(t_j), j >= 1
  double energy_ = 0.0;

  // Data of the step currently being solved.
  std::vector<double> rhs_;
  std::vector<double> boundary_load_;
  SpatialFunction boundary_;
  std::vector<double> boundary_values_;
};

using StepObserver = std::function<void(const TimeStepper&, const StepDiagnostics&)>;

/// Runs all N steps. With keep_fields = false only the final u (and v) are stored.
Trajectory run(const Problem& problem, const StepObserver& observer = {}, bool keep_fields = true);

struct StabilityReport {
  double lhs = 0.0;  // sup_k ||u^k||^2 + nu dt sum_k |||u^k|||^2
  double rhs = 0.0;  // (||u^0||^2 + nu^-1 int_0^T ||f||^2) exp(beta (1 + gamma^2) T)
  bool holds = false;
};

/// Energy stability estimate for a homogeneous-boundary trajectory (needs all fields).
StabilityReport stability_check(const Trajectory& traj, const Problem& problem);

}  // namespace gbhe
