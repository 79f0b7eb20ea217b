#include <doctest.h>

#include <Eigen/Dense>

#include <complex>
#include <vector>

#include "masm/channel.hpp"
#include "masm/rng.hpp"
#include "masm/spectral.hpp"
#include "oracles.hpp"

using namespace masm;
using std::complex;

TEST_CASE("Marcenko-Pastur R-transform values") {
  CHECK(spectral::mp_r_transform(0.5, 0.0) == doctest::Approx(0.5));    // R(0) = xi
  CHECK(spectral::mp_r_transform(0.5, -1.0) == doctest::Approx(0.25));
  CHECK(spectral::mp_r_transform(0.5, 0.9) == doctest::Approx(5.0));
  CHECK_THROWS_AS(spectral::mp_r_transform(0.5, 1.0), std::domain_error);
  CHECK_THROWS_AS(spectral::mp_r_transform(-1.0, 0.0), std::invalid_argument);
}

TEST_CASE("R' matches centered finite differences") {
  const auto model = spectral::SpectralModel::marcenko_pastur(0.5);
  for (double w : {-5.0, -1.0, -0.1, 0.0, 0.5}) {
    const double fd = oracle::central_difference(model.r_transform, w, 1e-6);
    CHECK(model.r_transform_deriv(w) == doctest::Approx(fd).epsilon(1e-4));
  }

  // custom model with its own closed forms gets the same check
  const auto custom = spectral::SpectralModel::custom(
      [](double w) { return 2.0 / (1.0 - 0.5 * w); },
      [](double w) { return 1.0 / ((1.0 - 0.5 * w) * (1.0 - 0.5 * w)); }, -2.0);
  for (double w : {-5.0, -1.0, -0.1, 0.0, 0.5}) {
    const double fd = oracle::central_difference(custom.r_transform, w, 1e-6);
    CHECK(custom.r_transform_deriv(w) == doctest::Approx(fd).epsilon(1e-4));
  }
}

TEST_CASE("channel load bookkeeping") {
  const auto load = spectral::ChannelLoad::from_dimensions(20, 8, 80);
  CHECK(load.xi == doctest::Approx(0.5));
  CHECK(load.alpha == doctest::Approx(0.25));
  CHECK(load.xi == doctest::Approx(1.0 / (load.alpha * 8)));  // xi = 1/(alpha Mu)
}

TEST_CASE("empirical Stieltjes transform, closed cases") {
  const complex<double> i{0.0, 1.0};
  std::vector<double> eq{1.0, 1.0, 1.0};
  const auto g = spectral::empirical_stieltjes(eq, i);
  CHECK(g.real() == doctest::Approx(0.5));  // 1/(1-i) = (1+i)/2
  CHECK(g.imag() == doctest::Approx(0.5));

  std::vector<double> single{2.0};
  const auto g2 = spectral::empirical_stieltjes(single, i);
  CHECK(g2.real() == doctest::Approx(0.4));  // 1/(2-i) = (2+i)/5
  CHECK(g2.imag() == doctest::Approx(0.2));

  CHECK_THROWS_AS(spectral::empirical_stieltjes(std::vector<double>{}, i),
                  std::invalid_argument);
  CHECK_THROWS_AS(spectral::empirical_stieltjes(single, complex<double>{0.5, 0.0}),
                  std::invalid_argument);
}

TEST_CASE("MP oracle self-consistency") {
  // CDF reaches 1 at the upper edge and carries the 1 - xi atom at zero.
  CHECK(oracle::mp_cdf(0.5, 0.0) == doctest::Approx(0.5));
  CHECK(oracle::mp_cdf(0.5, 3.0) == doctest::Approx(1.0).epsilon(1e-9));

  // Stieltjes branch vs direct numerical integration of the law.
  const complex<double> z{0.5, 0.1};
  complex<double> direct = 0.5 / (0.0 - z);  // atom at zero
  const double a = (1.0 - std::sqrt(0.5)) * (1.0 - std::sqrt(0.5));
  const double b = (1.0 + std::sqrt(0.5)) * (1.0 + std::sqrt(0.5));
  const int n = 200000;
  for (int k = 0; k < n; ++k) {
    const double x = a + (b - a) * (k + 0.5) / n;
    const double f = std::sqrt((b - x) * (x - a)) / (2.0 * M_PI * x);
    direct += f * (b - a) / static_cast<double>(n) / (x - z);
  }
  const auto g = oracle::mp_stieltjes(0.5, z);
  CHECK(g.real() == doctest::Approx(direct.real()).epsilon(1e-4));
  CHECK(g.imag() == doctest::Approx(direct.imag()).epsilon(1e-4));
}

TEST_CASE("sampled Gram spectra: mean eigenvalue and transform convergence") {
  // trace(J)/M -> xi within 2% at N = 80
  RngStream rng(404);
  const auto ens = channel::ChannelEnsemble::iid_gaussian(80, 160);
  const Eigen::MatrixXcd h = channel::sample_channel(ens, rng);
  const double mean_eig = (h.adjoint() * h).real().trace() / 160.0;
  CHECK(mean_eig == doctest::Approx(0.5).epsilon(0.02));

  // a sampled 80 x 160 Gram matches the analytic transform pointwise
  {
    Eigen::SelfAdjointEigenSolver<Eigen::MatrixXcd> es(h.adjoint() * h);
    std::vector<double> eigs(es.eigenvalues().data(), es.eigenvalues().data() + 160);
    const complex<double> z{0.5, 0.1};
    CHECK(std::abs(spectral::empirical_stieltjes(eigs, z) - oracle::mp_stieltjes(0.5, z)) <
          0.05);
  }

  // empirical Stieltjes approaches the analytic MP transform as N doubles
  std::vector<complex<double>> grid;
  for (int k = 0; k < 10; ++k) grid.emplace_back(0.3 + 0.3 * k, 0.5);

  auto max_deviation = [&](int n_rx) {
    const int m = 2 * n_rx;
    double dev = 0.0;
    const int draws = 5;
    for (int d = 0; d < draws; ++d) {
      RngStream r = RngStream::derive(7, n_rx, d);
      const auto e = channel::ChannelEnsemble::iid_gaussian(n_rx, m);
      const Eigen::MatrixXcd hh = channel::sample_channel(e, r);
      Eigen::SelfAdjointEigenSolver<Eigen::MatrixXcd> es(hh.adjoint() * hh);
      std::vector<double> eigs(es.eigenvalues().data(), es.eigenvalues().data() + m);
      double local = 0.0;
      for (const auto& z : grid)
        local = std::max(local,
                         std::abs(spectral::empirical_stieltjes(eigs, z) -
                                  oracle::mp_stieltjes(0.5, z)));
      dev += local;
    }
    return dev / draws;
  };

  const double d40 = max_deviation(40);
  const double d80 = max_deviation(80);
  const double d160 = max_deviation(160);
  CHECK(d80 < d40);
  CHECK(d160 < d80);
}
