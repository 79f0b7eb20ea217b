#pragma once

#include <Eigen/Dense>

#include <functional>
#include <vector>

#include "masm/rng.hpp"
#include "masm/sm_codec.hpp"

namespace masm::channel {

/// Random N x M channel ensembles. Entry variance defaults to 1/M so that
/// the Gram spectrum of H^H H follows the Marcenko-Pastur law with load
/// xi = N/M in the i.i.d. cases.
struct ChannelEnsemble {
  enum class Kind { IidComplexGaussian, IidRealPm1, IidCustom, BiUnitary };

  Kind kind = Kind::IidComplexGaussian;
  int n_rx = 0;
  int m_tx = 0;
  double entry_variance = 0.0;  // 0 means default 1/M

  /// IidCustom: per-entry sampler.
  std::function<std::complex<double>(RngStream&)> sampler;

  /// BiUnitary: singular values of H (length min(N, M)); H = U diag(s) V^H
  /// with independent Haar U, V.
  std::vector<double> singular_values;

  static ChannelEnsemble iid_gaussian(int n_rx, int m_tx);
  static ChannelEnsemble iid_pm1(int n_rx, int m_tx);
  static ChannelEnsemble iid_custom(int n_rx, int m_tx,
                                    std::function<std::complex<double>(RngStream&)> sampler);
  static ChannelEnsemble bi_unitary(int n_rx, int m_tx, std::vector<double> singular_values);
};

/// One noisy channel use: y = H x + n, n ~ CN(0, sigma2 I).
struct Observation {
  Eigen::VectorXcd y;
  Eigen::MatrixXcd h;
  sm::TransmitVector x_true;
  double sigma2 = 0.0;
};

/// Haar-distributed unitary via QR of an i.i.d. complex Gaussian matrix with
/// the R diagonal rotated to be real positive.
Eigen::MatrixXcd sample_haar_unitary(int n, RngStream& rng);

Eigen::MatrixXcd sample_channel(const ChannelEnsemble& ensemble, RngStream& rng);

Observation transmit(const Eigen::MatrixXcd& h, sm::TransmitVector x, double sigma2,
                     RngStream& rng);

/// sigma^2 from SNR = P / sigma^2 in dB.
inline double sigma2_from_snr_db(double p, double snr_db) {
  return p * std::pow(10.0, -snr_db / 10.0);
}

}  // namespace masm::channel
