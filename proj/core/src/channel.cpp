#include "masm/channel.hpp"

#include <cmath>
#include <stdexcept>

namespace masm::channel {

namespace {

void check_dims(int n_rx, int m_tx) {
  if (n_rx < 1 || m_tx < 1)
    throw std::invalid_argument("ChannelEnsemble: dimensions must be positive");
}

}  // namespace

ChannelEnsemble ChannelEnsemble::iid_gaussian(int n_rx, int m_tx) {
  check_dims(n_rx, m_tx);
  ChannelEnsemble e;
  e.kind = Kind::IidComplexGaussian;
  e.n_rx = n_rx;
  e.m_tx = m_tx;
  return e;
}

ChannelEnsemble ChannelEnsemble::iid_pm1(int n_rx, int m_tx) {
  check_dims(n_rx, m_tx);
  ChannelEnsemble e;
  e.kind = Kind::IidRealPm1;
  e.n_rx = n_rx;
  e.m_tx = m_tx;
  return e;
}

ChannelEnsemble ChannelEnsemble::iid_custom(
    int n_rx, int m_tx, std::function<std::complex<double>(RngStream&)> sampler) {
  check_dims(n_rx, m_tx);
  if (!sampler) throw std::invalid_argument("ChannelEnsemble: custom sampler missing");
  ChannelEnsemble e;
  e.kind = Kind::IidCustom;
  e.n_rx = n_rx;
  e.m_tx = m_tx;
  e.sampler = std::move(sampler);
  return e;
}

ChannelEnsemble ChannelEnsemble::bi_unitary(int n_rx, int m_tx,
                                            std::vector<double> singular_values) {
  check_dims(n_rx, m_tx);
  if (static_cast<int>(singular_values.size()) != std::min(n_rx, m_tx))
    throw std::invalid_argument("ChannelEnsemble: need min(N, M) singular values");
  ChannelEnsemble e;
  e.kind = Kind::BiUnitary;
  e.n_rx = n_rx;
  e.m_tx = m_tx;
  e.singular_values = std::move(singular_values);
  return e;
}

Eigen::MatrixXcd sample_haar_unitary(int n, RngStream& rng) {
  Eigen::MatrixXcd g(n, n);
  for (int i = 0; i < n; ++i)
    for (int j = 0; j < n; ++j) g(i, j) = rng.complex_normal(1.0);
  Eigen::HouseholderQR<Eigen::MatrixXcd> qr(g);
  Eigen::MatrixXcd q = qr.householderQ();
  const Eigen::MatrixXcd r = qr.matrixQR().triangularView<Eigen::Upper>();
  // Rotate columns so R's diagonal is real positive; this makes Q Haar.
  for (int j = 0; j < n; ++j) {
    const std::complex<double> d = r(j, j);
    const double a = std::abs(d);
    if (a > 0.0) q.col(j) *= d / a;
  }
  return q;
}

Eigen::MatrixXcd sample_channel(const ChannelEnsemble& ensemble, RngStream& rng) {
  const int n = ensemble.n_rx;
  const int m = ensemble.m_tx;
  const double variance =
      ensemble.entry_variance > 0.0 ? ensemble.entry_variance : 1.0 / m;

  Eigen::MatrixXcd h(n, m);
  switch (ensemble.kind) {
    case ChannelEnsemble::Kind::IidComplexGaussian:
      for (int i = 0; i < n; ++i)
        for (int j = 0; j < m; ++j) h(i, j) = rng.complex_normal(variance);
      return h;
    case ChannelEnsemble::Kind::IidRealPm1: {
      const double s = std::sqrt(variance);
      for (int i = 0; i < n; ++i)
        for (int j = 0; j < m; ++j)
          h(i, j) = (rng.next_u64() & 1u) ? s : -s;
      return h;
    }
    case ChannelEnsemble::Kind::IidCustom:
      for (int i = 0; i < n; ++i)
        for (int j = 0; j < m; ++j) h(i, j) = ensemble.sampler(rng);
      return h;
    case ChannelEnsemble::Kind::BiUnitary: {
      const Eigen::MatrixXcd u = sample_haar_unitary(n, rng);
      const Eigen::MatrixXcd v = sample_haar_unitary(m, rng);
      Eigen::MatrixXcd sigma = Eigen::MatrixXcd::Zero(n, m);
      for (int i = 0; i < std::min(n, m); ++i) sigma(i, i) = ensemble.singular_values[i];
      return u * sigma * v.adjoint();
    }
  }
  throw std::logic_error("sample_channel: unknown ensemble kind");
}

Observation transmit(const Eigen::MatrixXcd& h, sm::TransmitVector x, double sigma2,
                     RngStream& rng) {
  if (h.cols() != x.entries.size())
    throw std::invalid_argument("transmit: dimension mismatch between H and x");
  if (sigma2 < 0.0) throw std::invalid_argument("transmit: sigma2 must be >= 0");

  Observation obs;
  obs.y = h * x.entries;
  if (sigma2 > 0.0) {
    for (Eigen::Index i = 0; i < obs.y.size(); ++i)
      obs.y(i) += rng.complex_normal(sigma2);
  }
  obs.h = h;
  obs.x_true = std::move(x);
  obs.sigma2 = sigma2;
  return obs;
}

}  // namespace masm::channel
