#pragma once

#include <complex>
#include <functional>
#include <span>

namespace masm::spectral {

/// Analytic description of the limiting eigenvalue law of J = H^H H through
/// its R-transform. The fixed-point layer only ever evaluates R and R' on the
/// real axis, so models supply both as closed-form callables; no numerical
/// transform inversion happens anywhere.
struct SpectralModel {
  enum class Kind { MarcenkoPastur, Custom };

  Kind kind = Kind::MarcenkoPastur;
  double xi = 1.0;  // channel load N/M, meaningful for MarcenkoPastur only

  std::function<double(double)> r_transform;
  std::function<double(double)> r_transform_deriv;

  /// R(-c) is evaluated for c in (c_min, +inf); iterates are clamped away
  /// from c_min by a small margin. Marcenko-Pastur has its pole at c = -1.
  double c_min = -1.0;

  /// Law of H^H H for an N x M matrix with i.i.d. entries of variance 1/M,
  /// xi = N/M. R(w) = xi / (1 - w).
  static SpectralModel marcenko_pastur(double xi);

  static SpectralModel custom(std::function<double(double)> r,
                              std::function<double(double)> r_deriv,
                              double c_min);
};

/// Dimension bookkeeping for the large-system limit: xi = N/M, alpha = K/N.
struct ChannelLoad {
  double xi;
  double alpha;

  static ChannelLoad from_dimensions(int k, int m_u, int n);
};

/// R-transform of the Marcenko-Pastur law: xi / (1 - omega).
/// Throws std::domain_error at the pole omega = 1.
double mp_r_transform(double xi, double omega);

/// d/dw of the above: xi / (1 - omega)^2.
double mp_r_transform_deriv(double xi, double omega);

/// Empirical Stieltjes transform (1/n) sum 1/(lambda_i - z), Im z > 0.
/// Validation-only: used to check sampled ensembles against analytic laws.
std::complex<double> empirical_stieltjes(std::span<const double> eigenvalues,
                                         std::complex<double> z);

}  // namespace masm::spectral
