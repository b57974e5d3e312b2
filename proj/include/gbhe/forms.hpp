#pragma once

#include <functional>
#include <span>
#include <vector>

#include "gbhe/space.hpp"
#include "gbhe/sparse.hpp"

namespace gbhe {

/// Coefficients of  u_t - nu Lap u + alpha u^delta sum_i du/dx_i - beta u(1-u^delta)(u^delta-gamma)
///                  - eta int K(t-s) Lap u(s) ds.
struct ModelParams {
  double nu = 1.0;
  double alpha = 1.0;
  double beta = 1.0;
  double reaction_gamma = 0.5;
  int delta = 1;
  double eta = 0.0;
  double penalty_gamma = 40.0;  ///< DG interior-penalty scale (gamma_h = penalty_gamma / h_E)

  /// Throws std::invalid_argument when a coefficient is out of range.
  void validate() const;
};

/// Integer power for the nonlinear terms.
inline double ipow(double x, int n) {
  double r = 1.0;
  while (n > 0) {
    if (n & 1) r *= x;
    x *= x;
    n >>= 1;
  }
  return r;
}

/// Huxley reaction c(u) = u (1 - u^delta)(u^delta - gamma) and its derivative.
double reaction_value(double u, const ModelParams& p);
double reaction_derivative(double u, const ModelParams& p);

struct NonlinearTerm {
  std::vector<double> residual;
  SparseMatrix jacobian;
};

SparseMatrix assemble_mass(const Space& space);
SparseMatrix assemble_stiffness_cr(const Space& space);
/// Symmetric interior penalty form including boundary faces.
SparseMatrix assemble_stiffness_dg(const Space& space, double penalty_gamma);
/// Broken H1 form (grad_h u, grad_h v) on either space.
SparseMatrix assemble_broken_stiffness(const Space& space);

/// Boundary-data vector for the SIPG form with exterior trace g:
/// b_i = sum_{E on boundary} int_E g (-grad phi_i . n + gamma_h phi_i).
std::vector<double> dirichlet_load_dg(const Space& space, const SpatialFunction& g, double penalty_gamma);

/// alpha * b_CR(u; u, phi_i) with the skew-symmetrized trilinear form, and its Jacobian.
NonlinearTerm convection_cr(const Space& space, std::span<const double> u, const ModelParams& params);

/// alpha * b_DG(w; u, phi_i) with w = u^delta (1,1), upwind faces, exterior trace
/// `boundary` on the domain boundary (zero when empty).
NonlinearTerm convection_dg(const Space& space, std::span<const double> u, const ModelParams& params,
                            const SpatialFunction& boundary = {});

/// Scheme-dispatching convection.
NonlinearTerm convection(const Space& space, std::span<const double> u, const ModelParams& params,
                         const SpatialFunction& boundary = {});

/// beta * (c(u), phi_i) and its Jacobian.
NonlinearTerm reaction(const Space& space, std::span<const double> u, const ModelParams& params);

/// Load vector (f^k, phi_i) of the time average f^k = (t_next - t_prev)^{-1} int f dt,
/// computed with a 3-point Gauss rule in time.
std::vector<double> assemble_load(const Space& space, const std::function<double(const Point&, double)>& f,
                                  double t_prev, double t_next, int spatial_degree = 5);

}  // namespace gbhe
