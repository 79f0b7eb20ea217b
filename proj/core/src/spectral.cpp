#include "masm/spectral.hpp"

#include <cmath>
#include <stdexcept>

namespace masm::spectral {

double mp_r_transform(double xi, double omega) {
  if (xi <= 0.0) throw std::invalid_argument("mp_r_transform: xi must be positive");
  if (omega == 1.0) throw std::domain_error("mp_r_transform: pole at omega = 1");
  return xi / (1.0 - omega);
}

double mp_r_transform_deriv(double xi, double omega) {
  if (xi <= 0.0) throw std::invalid_argument("mp_r_transform_deriv: xi must be positive");
  if (omega == 1.0) throw std::domain_error("mp_r_transform_deriv: pole at omega = 1");
  const double d = 1.0 - omega;
  return xi / (d * d);
}

SpectralModel SpectralModel::marcenko_pastur(double xi) {
  if (xi <= 0.0) throw std::invalid_argument("SpectralModel: xi must be positive");
  SpectralModel m;
  m.kind = Kind::MarcenkoPastur;
  m.xi = xi;
  m.r_transform = [xi](double w) { return mp_r_transform(xi, w); };
  m.r_transform_deriv = [xi](double w) { return mp_r_transform_deriv(xi, w); };
  m.c_min = -1.0;  // R(-c) = xi/(1+c)
  return m;
}

SpectralModel SpectralModel::custom(std::function<double(double)> r,
                                    std::function<double(double)> r_deriv,
                                    double c_min) {
  if (!r || !r_deriv) throw std::invalid_argument("SpectralModel: custom model needs R and R'");
  SpectralModel m;
  m.kind = Kind::Custom;
  m.xi = 0.0;
  m.r_transform = std::move(r);
  m.r_transform_deriv = std::move(r_deriv);
  m.c_min = c_min;
  return m;
}

ChannelLoad ChannelLoad::from_dimensions(int k, int m_u, int n) {
  if (k <= 0 || m_u <= 0 || n <= 0)
    throw std::invalid_argument("ChannelLoad: dimensions must be positive");
  const double m = static_cast<double>(k) * m_u;
  return ChannelLoad{static_cast<double>(n) / m, static_cast<double>(k) / n};
}

std::complex<double> empirical_stieltjes(std::span<const double> eigenvalues,
                                         std::complex<double> z) {
  if (eigenvalues.empty())
    throw std::invalid_argument("empirical_stieltjes: empty eigenvalue list");
  if (z.imag() <= 0.0)
    throw std::invalid_argument("empirical_stieltjes: need Im z > 0");
  std::complex<double> acc{0.0, 0.0};
  for (double lambda : eigenvalues) acc += 1.0 / (lambda - z);
  return acc / static_cast<double>(eigenvalues.size());
}

}  // namespace masm::spectral
