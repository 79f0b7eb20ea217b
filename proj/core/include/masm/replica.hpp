#pragma once

#include <complex>
#include <utility>
#include <vector>

#include "masm/detector.hpp"
#include "masm/spectral.hpp"

namespace masm::replica {

/// Scalar decoupled setting: input x = psi * s with psi ~ Bernoulli(eta) and
/// s uniform on the alphabet, output y = x + theta(c, q) z with z ~ CN(0, 1),
/// estimator argmin over X0 of (1/tau(c)) |y - v|^2 + f_reg(v).
struct DecoupledConfig {
  double eta = 0.125;
  double p = 1.0;
  double sigma2 = 0.0;
  spectral::SpectralModel spectral = spectral::SpectralModel::marcenko_pastur(0.5);
  detect::Regularizer reg = detect::Regularizer::l1(0.0);
  detect::FeasibleSet feasible = detect::FeasibleSet::box(0.0, 1.0);
  detect::Decision decision = detect::Decision::threshold_ssk(0.5, 1.0);
  std::vector<std::complex<double>> alphabet = {std::complex<double>(1.0, 0.0)};
  int quadrature_order = 96;
};

/// tau(c) = 1/R(-c) and theta(c, q) = tau(c) sqrt(d/dc [(sigma^2 c - q) R(-c)]),
/// with the derivative expanded analytically to
/// sigma^2 R(-c) - (sigma^2 c - q) R'(-c).
struct ReplicaState {
  double c = 0.0;
  double q = 0.0;
  double tau = 0.0;
  double theta = 0.0;
  bool theta_clamped = false;  // sqrt argument was negative and clamped to 0

  static ReplicaState make(double c, double q, const DecoupledConfig& cfg);
};

struct Expectations {
  double e_cross = 0.0;  // E[Re{(x*(c,q) - x) z^*}]
  double e_mse = 0.0;    // E|x*(c,q) - x|^2
};

struct ReplicaSolution {
  double c_star = 0.0;
  double q_star = 0.0;
  double gamma = 0.0;  // predicted MSE
  double q_e = 0.0;    // predicted error rate
  bool converged = false;
  std::pair<double, double> residuals{0.0, 0.0};  // fixed-point eq. residuals
  int iters = 0;
  bool ambiguous = false;  // multi-start solutions disagree
};

struct FixedPointOptions {
  double c0 = 0.1;
  double q0 = -1.0;  // negative means the all-zero-estimator MSE eta * P
  double damping = 0.5;
  double tol = 1e-10;
  int max_iters = 1000;
};

/// Closed form of the decoupled box-LASSO estimate: soft threshold at
/// theta_lambda = tau * lambda / 2 clipped to [lo, hi]. Only the real part of
/// the decoupled output matters for a real feasible set, so y is real here.
double decoupled_estimate_box_lasso(double y, double tau, double lambda, double lo,
                                    double hi);

/// Generic scalar estimator: golden-section refinement over a 1024-point
/// bracketing grid on an interval (absolute tolerance 1e-10), exhaustive
/// minimum with lowest-index tie break on a discrete set.
std::complex<double> decoupled_estimate_generic(double y, double tau,
                                                const detect::Regularizer& reg,
                                                const detect::FeasibleSet& feasible);

/// Both fixed-point expectations at the given state. For L1/None regularizers
/// on a box the piecewise-linear estimator makes these sums of Gaussian
/// integrals, evaluated exactly (erf-based, order-independent); other
/// configurations integrate Re z by Gauss-Hermite of the given order.
Expectations expectations(const ReplicaState& state, const DecoupledConfig& cfg,
                          int order = 96);

/// The raw Gauss-Hermite path, exposed for cross-checks against the exact
/// evaluation. Kinks of the estimator limit it to ~1e-4 absolute accuracy.
Expectations expectations_gauss_hermite(const ReplicaState& state,
                                        const DecoupledConfig& cfg, int order);

/// Pr{f_dec(x*(c,q)) != x}. ThresholdSSK on a box estimator reduces to normal
/// CDFs (exact); anything else falls back to quadrature of the indicator.
double error_probability(const ReplicaState& state, const DecoupledConfig& cfg);

/// Damped fixed-point iteration of the coupled equations: q is relaxed toward
/// E|x* - x|^2 and c re-solved from c theta(c,q) = tau(c) E[Re{(x*-x)z^*}]
/// by bracketed root search over (c_min, c_max], expanding geometrically.
ReplicaSolution solve_fixed_point(const DecoupledConfig& cfg,
                                  const FixedPointOptions& opts = {});

/// solve_fixed_point from three spread initializations; flags disagreement
/// between converged solutions instead of silently picking one.
ReplicaSolution solve_replica(const DecoupledConfig& cfg,
                              const FixedPointOptions& opts = {});

struct TunePoint {
  double lambda = 0.0;
  ReplicaSolution solution;
};

struct TuneResult {
  double lambda_star = 0.0;
  double gamma_min = 0.0;
  ReplicaSolution at_star;
  std::vector<TunePoint> grid;
  std::vector<double> excluded;  // lambdas whose fixed point did not converge
};

/// Minimizes the predicted MSE over a lambda grid, warm-starting each solve
/// from the previous grid point; optional golden-section refinement inside
/// the bracketing interval.
TuneResult tune_lambda(const DecoupledConfig& cfg, const std::vector<double>& lambda_grid,
                       bool refine);

}  // namespace masm::replica
