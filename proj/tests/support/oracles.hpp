#pragma once

// Independent oracles for the test suites. Everything here is derived from
// first principles (closed forms, exhaustive search, plain Monte Carlo) and
// deliberately avoids the library's own computational paths.

#include <Eigen/Dense>

#include <complex>
#include <cstdint>
#include <functional>
#include <vector>

namespace oracle {

/// Stieltjes transform of the limiting eigenvalue law of J = H^H H for an
/// N x M matrix with i.i.d. entries of variance 1/M, xi = N/M. Root of
/// z G^2 + (z + 1 - xi) G + 1 = 0 with Im G > 0.
std::complex<double> mp_stieltjes(double xi, std::complex<double> z);

/// CDF of the same law: atom max(1 - xi, 0) at zero plus the bulk on
/// [(1 - sqrt(xi))^2, (1 + sqrt(xi))^2], integrated numerically.
double mp_cdf(double xi, double x);

/// Kolmogorov-Smirnov distance between a sample and a reference CDF.
/// Tie-aware, so laws with atoms are handled correctly.
double ks_distance(std::vector<double> samples, const std::function<double(double)>& cdf);

/// Eigenvalues of H^H H with numerical zeros (|eig| < 1e-9) snapped to 0,
/// matching the rank deficiency of tall transmit dimensions.
std::vector<double> gram_eigenvalues(const Eigen::MatrixXcd& h);

/// Exhaustive box-LASSO minimum of ||y - Hv||^2 + lambda ||v||_1 over the
/// product grid of `points` equispaced values per coordinate. Intended for
/// M = 4-ish problems only.
double grid_search_box_lasso(const Eigen::VectorXcd& y, const Eigen::MatrixXcd& h,
                             double lambda, double lo, double hi, int points = 201);

struct McExpectations {
  double e_cross = 0.0;
  double e_mse = 0.0;
  double se_cross = 0.0;
  double se_mse = 0.0;
};

/// Plain Monte Carlo estimate of the decoupled expectations
/// E[(x* - x) Re z] and E|x* - x|^2 for the box-LASSO estimator, with its own
/// inline soft-threshold-and-clip (independent of the library path).
McExpectations scalar_mc_expectations(double eta, double p, double theta,
                                      double theta_lambda, double lo, double hi,
                                      std::int64_t samples, std::uint64_t seed);

/// Same sampler, error probability of the SSK threshold decision.
struct McErrorRate {
  double q_e = 0.0;
  double se = 0.0;
};
McErrorRate scalar_mc_error(double eta, double p, double theta, double theta_lambda,
                            double lo, double hi, double epsilon, std::int64_t samples,
                            std::uint64_t seed);

/// Centered finite difference.
double central_difference(const std::function<double(double)>& f, double x, double step);

/// Smallest eigenvalue of Re(H^H H); positive value certifies that the real
/// noiseless system has a unique box-feasible solution.
double min_eig_real_gram(const Eigen::MatrixXcd& h);

}  // namespace oracle
