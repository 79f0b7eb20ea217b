#pragma once

#include <vector>

namespace masm::quad {

struct GaussHermiteRule {
  std::vector<double> nodes;    // roots of H_n (physicists' convention)
  std::vector<double> weights;  // sum w_i f(x_i) ~ integral f(x) exp(-x^2) dx
};

/// Gauss-Hermite rule of the given order, computed by Golub-Welsch and
/// cached. Thread-safe.
const GaussHermiteRule& gauss_hermite(int order);

/// E[f(t)] for t ~ N(0, 1/2), i.e. (1/sqrt(pi)) * sum w_i f(x_i).
/// The real part of a unit-variance complex Gaussian has exactly this law.
template <typename F>
double expect_normal_half(const GaussHermiteRule& rule, F&& f) {
  double acc = 0.0;
  for (std::size_t i = 0; i < rule.nodes.size(); ++i)
    acc += rule.weights[i] * f(rule.nodes[i]);
  return acc * 0.56418958354775628694807945156077;  // 1/sqrt(pi)
}

}  // namespace masm::quad
