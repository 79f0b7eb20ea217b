#pragma once

#include <Eigen/Dense>

#include <complex>
#include <functional>
#include <limits>
#include <vector>

#include "masm/sm_codec.hpp"

namespace masm::detect {

/// Separable regularization term of the RLS objective ||y - Hv||^2 + f_reg(v).
struct Regularizer {
  enum class Kind { None, L1, Custom };

  Kind kind = Kind::L1;
  double lambda = 0.0;  // L1 weight

  /// Custom: penalty on one real coordinate, plus its proximal map
  /// prox(w, step) = argmin_u step * penalty(u) + (u - w)^2 / 2. The penalty
  /// is assumed symmetric-ish enough that clamping its prox to the box stays
  /// exact (true for anything nondecreasing in |u| and minimized at 0).
  std::function<double(double)> penalty;
  std::function<double(double, double)> prox;

  static Regularizer none() { return {Kind::None, 0.0, nullptr, nullptr}; }
  static Regularizer l1(double lambda);
  static Regularizer custom(std::function<double(double)> penalty,
                            std::function<double(double, double)> prox);
};

struct FeasibleSet {
  enum class Kind { Box, FullComplex, Discrete };

  Kind kind = Kind::Box;
  double lo = 0.0;  // -ell
  double hi = 1.0;  // u
  std::vector<std::complex<double>> points;  // Discrete

  /// Real interval [lo, hi]; must contain 0 since inactive antennas send 0.
  /// Infinite bounds are allowed (standard LASSO is box(-inf, inf)).
  static FeasibleSet box(double lo, double hi);
  static FeasibleSet full_complex();
  static FeasibleSet discrete(std::vector<std::complex<double>> points);
};

struct Decision {
  enum class Kind { ThresholdSsk, NearestSymbol, Identity };

  Kind kind = Kind::ThresholdSsk;
  double epsilon = 0.5;
  double p = 1.0;
  std::vector<std::complex<double>> alphabet;

  /// x -> sqrt(P) 1{Re x >= eps}. The boundary maps to active.
  static Decision threshold_ssk(double epsilon, double p);
  /// Nearest point of {0} union alphabet, ties to the earlier candidate.
  static Decision nearest_symbol(std::vector<std::complex<double>> alphabet);
  static Decision identity();
};

struct SolverParams {
  int max_iters = 2000;
  double rel_tolerance = 1e-10;
  bool acceleration = true;  // FISTA momentum; plain proximal gradient if off
};
// The solver stops once the relative objective decrease falls below
// rel_tolerance AND the prox fixed point x = prox(x - step grad(x)) holds to
// 1e-8 entrywise; `converged` certifies both. Hitting max_iters first leaves
// converged = false (not fatal, the estimate is still returned).

struct DetectorSpec {
  Regularizer reg = Regularizer::l1(0.0);
  FeasibleSet feasible = FeasibleSet::box(0.0, 1.0);
  Decision decision = Decision::threshold_ssk(0.5, 1.0);
  SolverParams solver;
};

struct SoftEstimate {
  Eigen::VectorXcd x_star;
  double objective = 0.0;
  int iters_used = 0;
  bool converged = false;
  double step = 0.0;  // proximal gradient step actually used
  std::vector<double> objective_trace;
};

/// Scalar proximal map of threshold * |.| plus the indicator of [lo, hi]:
/// clamp(soft_threshold(v, threshold), lo, hi). Exact because both terms are
/// separable and the box contains zero.
double prox_l1_box(double v, double threshold, double lo, double hi);

/// Box-LASSO: argmin over real v in [lo, hi]^M of ||y - Hv||^2 + lambda ||v||_1.
/// Proximal gradient with step 0.99 / (2 lambda_max(H^H H)) from power
/// iteration; the per-iteration prox threshold is step * lambda, which puts
/// the identity-channel fixed point at soft_threshold(y, lambda / 2).
SoftEstimate solve_box_lasso(const Eigen::VectorXcd& y, const Eigen::MatrixXcd& h,
                             double lambda, double lo, double hi,
                             const SolverParams& params = {});

/// General entry point dispatching on the spec's feasible set / regularizer.
SoftEstimate solve(const Eigen::VectorXcd& y, const Eigen::MatrixXcd& h,
                   const DetectorSpec& spec);

/// Entrywise decision function, soft estimate -> vector over S0.
Eigen::VectorXcd decide(const Eigen::VectorXcd& x_star, const Decision& rule);

/// Exhaustive ML search over all valid MA-SM vectors (= MAP under the uniform
/// message prior, so sigma2 does not enter). The terminal count is
/// h.cols() / codebook.m_u. Tiny-scale oracle; refuses search spaces beyond
/// 2^20 candidates.
sm::TransmitVector brute_force_map(const Eigen::VectorXcd& y, const Eigen::MatrixXcd& h,
                                   const sm::SmCodebook& codebook, double sigma2);

}  // namespace masm::detect
