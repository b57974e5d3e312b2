#include "gbhe/solver.hpp"

#include <algorithm>
#include <cmath>
#include <stdexcept>

#include "gbhe/errors.hpp"
#include "gbhe/quadrature.hpp"

namespace gbhe {

void TimeGrid::validate() const {
  if (!(t_final > 0.0)) throw std::invalid_argument("final time must be positive");
  if (n_steps < 1) throw std::invalid_argument("number of time steps must be >= 1");
}

int Trajectory::newton_max() const {
  int m = 0;
  for (const auto& d : diagnostics) m = std::max(m, d.newton_iterations);
  return m;
}

namespace {

void axpy(double a, std::span<const double> x, std::span<double> y) {
  for (std::size_t i = 0; i < y.size(); ++i) y[i] += a * x[i];
}

}  // namespace

TimeStepper::TimeStepper(Problem problem)
    : problem_(std::move(problem)),
      space_(*problem_.space),
      solver_(problem_.newton.linear_solver) {
  if (!problem_.space) throw std::invalid_argument("TimeStepper: problem has no space");
  problem_.params.validate();
  problem_.grid.validate();
  if (problem_.newton.max_iterations < 1) throw std::invalid_argument("Newton iteration cap must be >= 1");
  if (!(problem_.newton.tolerance > 0.0)) throw std::invalid_argument("Newton tolerance must be positive");

  const auto& p = problem_.params;
  const double dt = problem_.grid.delta_t();
  const int n = problem_.grid.n_steps;

  mass_ = assemble_mass(space_);
  stiffness_ = space_.kind() == SpaceKind::CR ? assemble_stiffness_cr(space_)
                                              : assemble_stiffness_dg(space_, p.penalty_gamma);

  double mass_coeff = 1.0 / dt;
  double stiff_coeff = p.nu;
  if (p.eta > 0.0) {
    memory_ = memory_weights(problem_.kernel, dt, n);
    stiff_coeff += p.eta * dt * memory_.lag(0);
  }
  if (problem_.caputo_order) {
    caputo_ = caputo_weights(*problem_.caputo_order, dt, n);
    caputo_scale_ = 1.0 / std::tgamma(1.0 - *problem_.caputo_order);
    mass_coeff += caputo_scale_ * caputo_.lag(0);
  }
  if (problem_.fhn) {
    const auto& f = *problem_.fhn;
    if (!(f.eps >= 0.0) || !(f.rho >= 0.0)) throw std::invalid_argument("FitzHugh-Nagumo eps and rho must be >= 0");
    fhn_gain_ = dt * f.eps / (1.0 + dt * f.eps * f.rho);
    mass_coeff += fhn_gain_;
  }
  linear_ = SparseMatrix(space_.pattern());
  add_scaled_inplace(linear_, mass_, mass_coeff);
  add_scaled_inplace(linear_, stiffness_, stiff_coeff);

  u_ = problem_.initial ? interpolate(problem_.space, problem_.initial).values : std::vector<double>(space_.size(), 0.0);
  if (problem_.fhn) {
    v_ = problem_.fhn->initial_v ? interpolate(problem_.space, problem_.fhn->initial_v).values
                                 : std::vector<double>(space_.size(), 0.0);
  }
  if (problem_.caputo_order) u_hist_.push_back(u_);
}

double TimeStepper::energy_density(std::span<const double> u) const {
  return space_.kind() == SpaceKind::CR ? broken_gradient_norm_sq(space_, u)
                                        : dg_norm_sq(space_, u, problem_.params.penalty_gamma);
}

StepDiagnostics TimeStepper::initial_diagnostics() const {
  StepDiagnostics d;
  d.step = 0;
  d.time = 0.0;
  d.l2_norm = std::sqrt(l2_norm_sq(space_, u_));
  d.gradient_norm = std::sqrt(broken_gradient_norm_sq(space_, u_));
  return d;
}

void TimeStepper::prepare_step() {
  const auto& p = problem_.params;
  const int k = k_ + 1;
  const double dt = problem_.grid.delta_t();
  const double t = problem_.grid.time(k);
  const std::size_t n = space_.size();

  boundary_ = {};
  boundary_load_.assign(n, 0.0);
  boundary_values_.clear();
  if (problem_.dirichlet) {
    const auto g = problem_.dirichlet;
    boundary_ = [g, t](const Point& x) { return g(x, t); };
    if (space_.kind() == SpaceKind::DG) {
      boundary_load_ = dirichlet_load_dg(space_, boundary_, p.penalty_gamma);
    } else {
      for (int i : space_.dofs().boundary_dofs) boundary_values_.push_back(boundary_(space_.dofs().dof_locations[static_cast<std::size_t>(i)]));
    }
  }
  if (space_.kind() == SpaceKind::CR && boundary_values_.empty()) boundary_values_.assign(space_.dofs().boundary_dofs.size(), 0.0);

  rhs_ = problem_.forcing ? assemble_load(space_, problem_.forcing, problem_.grid.time(k - 1), t)
                          : std::vector<double>(n, 0.0);
  spmv_add(mass_, u_, 1.0 / dt, rhs_);

  double stiff_coeff = p.nu;
  if (p.eta > 0.0) {
    stiff_coeff += p.eta * dt * memory_.lag(0);
    std::vector<double> hist(n, 0.0);
    for (int j = 1; j < k; ++j) axpy(memory_.at(k, j), memory_hist_[static_cast<std::size_t>(j - 1)], hist);
    axpy(-p.eta * dt, hist, rhs_);
  }
  axpy(stiff_coeff, boundary_load_, rhs_);

  if (problem_.caputo_order) {
    std::vector<double> d(u_.begin(), u_.end());
    for (auto& x : d) x *= caputo_.lag(0);
    for (int j = 1; j < k; ++j) {
      const double w = caputo_.at(k, j);
      const auto& a = u_hist_[static_cast<std::size_t>(j)];
      const auto& b = u_hist_[static_cast<std::size_t>(j - 1)];
      for (std::size_t i = 0; i < n; ++i) d[i] -= w * (a[i] - b[i]);
    }
    spmv_add(mass_, d, caputo_scale_, rhs_);
  }
  if (problem_.fhn) spmv_add(mass_, v_, -1.0 / (1.0 + dt * problem_.fhn->eps * problem_.fhn->rho), rhs_);
}

std::vector<double> TimeStepper::residual(std::span<const double> u, SparseMatrix* jacobian) const {
  const auto& p = problem_.params;
  std::vector<double> r = spmv(linear_, u);
  axpy(-1.0, rhs_, r);
  if (jacobian) *jacobian = linear_;
  if (p.alpha != 0.0) {
    const auto b = convection(space_, u, p, boundary_);
    axpy(1.0, b.residual, r);
    if (jacobian) add_scaled_inplace(*jacobian, b.jacobian, 1.0);
  }
  if (p.beta != 0.0) {
    const auto c = reaction(space_, u, p);
    axpy(-1.0, c.residual, r);
    if (jacobian) add_scaled_inplace(*jacobian, c.jacobian, -1.0);
  }
  if (space_.kind() == SpaceKind::CR) {
    for (int i : space_.dofs().boundary_dofs) r[static_cast<std::size_t>(i)] = 0.0;
    if (jacobian) {
      std::vector<double> dummy(space_.size(), 0.0);
      std::vector<double> zeros(space_.dofs().boundary_dofs.size(), 0.0);
      apply_dirichlet_cr(space_.dofs(), zeros, *jacobian, dummy);
    }
  }
  return r;
}

StepDiagnostics TimeStepper::step() {
  if (k_ >= problem_.grid.n_steps) throw std::logic_error("TimeStepper::step: time grid exhausted");
  prepare_step();
  const int k = k_ + 1;
  const auto& opt = problem_.newton;

  std::vector<double> u = u_;
  if (space_.kind() == SpaceKind::CR) {
    const auto& bd = space_.dofs().boundary_dofs;
    for (std::size_t b = 0; b < bd.size(); ++b) u[static_cast<std::size_t>(bd[b])] = boundary_values_[b];
  }

  StepDiagnostics d;
  d.step = k;
  d.time = problem_.grid.time(k);
  SparseMatrix jac;
  std::vector<double> r = residual(u, &jac);
  double rn = norm2(r);
  d.residual_history.push_back(rn);
  int it = 0;
  while (true) {
    solver_.factorize(jac);
    for (auto& x : r) x = -x;
    const auto du = solver_.solve(r);
    axpy(1.0, du, u);
    ++it;
    r = residual(u, &jac);
    rn = norm2(r);
    d.residual_history.push_back(rn);
    if (!std::isfinite(rn)) throw StepFailure(k, it, rn);
    if (rn <= opt.tolerance) break;
    if (it >= opt.max_iterations) throw StepFailure(k, it, rn);
  }
  d.newton_iterations = it;
  d.residual = rn;

  const double dt = problem_.grid.delta_t();
  if (problem_.fhn) {
    const auto& f = *problem_.fhn;
    for (std::size_t i = 0; i < v_.size(); ++i) v_[i] = (v_[i] + dt * f.eps * u[i]) / (1.0 + dt * f.eps * f.rho);
  }
  if (problem_.params.eta > 0.0) {
    auto y = spmv(stiffness_, u);
    axpy(-1.0, boundary_load_, y);
    memory_hist_.push_back(std::move(y));
  }
  u_ = std::move(u);
  if (problem_.caputo_order) u_hist_.push_back(u_);
  k_ = k;

  d.l2_norm = std::sqrt(l2_norm_sq(space_, u_));
  const double g2 = broken_gradient_norm_sq(space_, u_);
  d.gradient_norm = std::sqrt(g2);
  energy_ += dt * (space_.kind() == SpaceKind::CR ? g2 : energy_density(u_));
  d.energy = energy_;
  return d;
}

Trajectory run(const Problem& problem, const StepObserver& observer, bool keep_fields) {
  TimeStepper stepper(problem);
  Trajectory traj;
  traj.space = problem.space;
  traj.times.push_back(0.0);
  traj.u.push_back(stepper.current());
  if (problem.fhn) traj.v.push_back(stepper.current_v());
  auto d0 = stepper.initial_diagnostics();
  if (observer) observer(stepper, d0);
  traj.diagnostics.push_back(std::move(d0));
  for (int k = 1; k <= problem.grid.n_steps; ++k) {
    auto d = stepper.step();
    traj.times.push_back(d.time);
    if (!keep_fields) {
      traj.u.clear();
      traj.v.clear();
    }
    traj.u.push_back(stepper.current());
    if (problem.fhn) traj.v.push_back(stepper.current_v());
    if (observer) observer(stepper, d);
    traj.diagnostics.push_back(std::move(d));
  }
  return traj;
}

StabilityReport stability_check(const Trajectory& traj, const Problem& problem) {
  if (traj.u.size() != traj.times.size()) throw std::invalid_argument("stability_check: trajectory fields were not kept");
  const Space& space = *traj.space;
  const auto& p = problem.params;
  const double dt = problem.grid.delta_t();

  double sup = 0.0;
  double energy = 0.0;
  for (std::size_t k = 1; k < traj.u.size(); ++k) {
    sup = std::max(sup, l2_norm_sq(space, traj.u[k]));
    energy += dt * (space.kind() == SpaceKind::CR ? broken_gradient_norm_sq(space, traj.u[k])
                                                  : dg_norm_sq(space, traj.u[k], p.penalty_gamma));
  }
  StabilityReport rep;
  rep.lhs = sup + p.nu * energy;

  double f2 = 0.0;
  if (problem.forcing) {
    const auto& rule = triangle_rule(5);
    const double r = std::sqrt(0.6);
    const std::array<double, 3> tq{-r, 0.0, r};
    const std::array<double, 3> tw{5.0 / 9.0, 8.0 / 9.0, 5.0 / 9.0};
    for (int k = 1; k <= problem.grid.n_steps; ++k) {
      const double mid = 0.5 * (problem.grid.time(k - 1) + problem.grid.time(k));
      for (std::size_t s = 0; s < 3; ++s) {
        const double t = mid + 0.5 * dt * tq[s];
        const double fl2 = integrate_mesh(
            space.mesh(), [&](const Point& x) { const double f = problem.forcing(x, t); return f * f; }, rule);
        f2 += 0.5 * dt * tw[s] * fl2;
      }
    }
  }
  const double u0 = l2_norm_sq(space, traj.u.front());
  const double g = p.reaction_gamma;
  rep.rhs = (u0 + f2 / p.nu) * std::exp(p.beta * (1.0 + g * g) * problem.grid.t_final);
  rep.holds = rep.lhs <= rep.rhs;
  return rep;
}

}  // namespace gbhe
