#include "masm/detector.hpp"

#include <algorithm>
#include <cmath>
#include <stdexcept>

namespace masm::detect {

namespace {

constexpr double kInf = std::numeric_limits<double>::infinity();

// convergence is only declared once the prox fixed point holds this tightly
constexpr double kProxResidualTol = 1e-8;

void check_finite(const Eigen::VectorXcd& y, const Eigen::MatrixXcd& h) {
  if (!y.allFinite() || !h.allFinite())
    throw std::invalid_argument("solver: non-finite inputs");
  if (y.size() != h.rows())
    throw std::invalid_argument("solver: y length != rows of H");
}

/// Largest eigenvalue of J = H^H H by power iteration (30 rounds, relative
/// tolerance 1e-6), as the Lipschitz source for the gradient step.
double lambda_max_gram(const Eigen::MatrixXcd& j) {
  const Eigen::Index m = j.rows();
  Eigen::VectorXcd v = Eigen::VectorXcd::Constant(m, std::complex<double>(1.0, 0.0));
  v.normalize();
  double lambda = 0.0;
  for (int it = 0; it < 30; ++it) {
    Eigen::VectorXcd w = j * v;
    const double nw = w.norm();
    if (nw == 0.0) return 0.0;
    const double next = nw;  // Rayleigh quotient of PSD J equals ||Jv|| at the limit
    v = w / nw;
    if (it > 0 && std::abs(next - lambda) <= 1e-6 * next) {
      lambda = next;
      break;
    }
    lambda = next;
  }
  return lambda;
}

double box_penalty_value(const Regularizer& reg, const Eigen::VectorXd& v) {
  switch (reg.kind) {
    case Regularizer::Kind::None:
      return 0.0;
    case Regularizer::Kind::L1:
      return reg.lambda * v.lpNorm<1>();
    case Regularizer::Kind::Custom: {
      double acc = 0.0;
      for (Eigen::Index i = 0; i < v.size(); ++i) acc += reg.penalty(v(i));
      return acc;
    }
  }
  return 0.0;
}

double apply_prox(const Regularizer& reg, double w, double step, double lo, double hi) {
  switch (reg.kind) {
    case Regularizer::Kind::None:
      return std::clamp(w, lo, hi);
    case Regularizer::Kind::L1:
      return prox_l1_box(w, step * reg.lambda, lo, hi);
    case Regularizer::Kind::Custom:
      return std::clamp(reg.prox(w, step), lo, hi);
  }
  return w;
}

/// Real-variable solver core. For real v the data fit is
/// ||y - Hv||^2 = ||y||^2 - 2 b^T v + v^T A v with A = Re(H^H H) and
/// b = Re(H^H y), and its gradient is 2(Av - b) = 2 Re(H^H (Hv - y)).
SoftEstimate solve_box_real(const Eigen::VectorXcd& y, const Eigen::MatrixXcd& h,
                            const Regularizer& reg, double lo, double hi,
                            const SolverParams& params) {
  check_finite(y, h);
  if (!(lo <= 0.0 && 0.0 <= hi))
    throw std::invalid_argument("solver: box must contain 0");
  if (reg.kind == Regularizer::Kind::L1 && reg.lambda < 0.0)
    throw std::invalid_argument("solver: lambda must be >= 0");

  const Eigen::Index m = h.cols();
  const Eigen::MatrixXcd j = h.adjoint() * h;
  const Eigen::MatrixXd a = j.real();
  const Eigen::VectorXd b = (h.adjoint() * y).real();
  const double y2 = y.squaredNorm();

  const double lmax = lambda_max_gram(j);
  const double step = 0.99 / std::max(2.0 * lmax, 1e-300);

  Eigen::VectorXd v = Eigen::VectorXd::Zero(m);
  Eigen::VectorXd v_prev = v;
  double t_momentum = 1.0;

  SoftEstimate out;
  out.step = step;
  out.objective_trace.reserve(std::min(params.max_iters, 4096));

  auto objective_at = [&](const Eigen::VectorXd& u, const Eigen::VectorXd& au) {
    return y2 - 2.0 * b.dot(u) + u.dot(au) + box_penalty_value(reg, u);
  };

  double f_prev = objective_at(v, a * v);
  out.objective_trace.push_back(f_prev);

  // certifies the prox fixed point x = prox(x - step grad(x)) entrywise
  auto residual_at = [&](const Eigen::VectorXd& u, const Eigen::VectorXd& au) {
    double res = 0.0;
    for (Eigen::Index i = 0; i < m; ++i) {
      const double g = 2.0 * (au(i) - b(i));
      res = std::max(res, std::abs(apply_prox(reg, u(i) - step * g, step, lo, hi) - u(i)));
    }
    return res;
  };

  int iters = 0;
  bool converged = false;
  for (; iters < params.max_iters; ++iters) {
    Eigen::VectorXd z = v;
    if (params.acceleration && iters > 0) {
      const double t_next = 0.5 * (1.0 + std::sqrt(1.0 + 4.0 * t_momentum * t_momentum));
      z = v + ((t_momentum - 1.0) / t_next) * (v - v_prev);
      t_momentum = t_next;
    }
    const Eigen::VectorXd grad = 2.0 * (a * z - b);
    Eigen::VectorXd v_next(m);
    for (Eigen::Index i = 0; i < m; ++i)
      v_next(i) = apply_prox(reg, z(i) - step * grad(i), step, lo, hi);

    const Eigen::VectorXd av_next = a * v_next;
    const double f = objective_at(v_next, av_next);
    out.objective_trace.push_back(f);
    v_prev = v;
    v = v_next;

    const double rel = std::abs(f_prev - f) / std::max(1.0, std::abs(f_prev));
    f_prev = f;
    if (rel < params.rel_tolerance && residual_at(v, av_next) <= kProxResidualTol) {
      converged = true;
      ++iters;
      break;
    }
  }

  out.x_star = v.cast<std::complex<double>>();
  out.objective = f_prev;
  out.iters_used = iters;
  out.converged = converged;
  return out;
}

/// Complex path for FullComplex + L1: magnitude soft thresholding. Kept as an
/// extension; the decoupled analysis in this project only exercises real
/// feasible sets.
SoftEstimate solve_complex_l1(const Eigen::VectorXcd& y, const Eigen::MatrixXcd& h,
                              double lambda, const SolverParams& params) {
  check_finite(y, h);
  const Eigen::Index m = h.cols();
  const Eigen::MatrixXcd j = h.adjoint() * h;
  const Eigen::VectorXcd b = h.adjoint() * y;
  const double y2 = y.squaredNorm();
  const double lmax = lambda_max_gram(j);
  const double step = 0.99 / std::max(2.0 * lmax, 1e-300);

  Eigen::VectorXcd v = Eigen::VectorXcd::Zero(m);
  Eigen::VectorXcd v_prev = v;
  double t_momentum = 1.0;

  SoftEstimate out;
  out.step = step;

  auto objective_at = [&](const Eigen::VectorXcd& u) {
    return y2 - 2.0 * (b.dot(u)).real() + (u.dot(j * u)).real() + lambda * u.lpNorm<1>();
  };

  auto shrink = [&](const std::complex<double>& w) {
    const double mag = std::abs(w);
    const double shrunk = std::max(mag - step * lambda, 0.0);
    return mag > 0.0 ? w * (shrunk / mag) : std::complex<double>{0.0, 0.0};
  };
  auto residual_at = [&](const Eigen::VectorXcd& u) {
    const Eigen::VectorXcd grad = 2.0 * (j * u - b);
    double res = 0.0;
    for (Eigen::Index i = 0; i < m; ++i)
      res = std::max(res, std::abs(shrink(u(i) - step * grad(i)) - u(i)));
    return res;
  };

  double f_prev = objective_at(v);
  out.objective_trace.push_back(f_prev);
  int iters = 0;
  bool converged = false;
  for (; iters < params.max_iters; ++iters) {
    Eigen::VectorXcd z = v;
    if (params.acceleration && iters > 0) {
      const double t_next = 0.5 * (1.0 + std::sqrt(1.0 + 4.0 * t_momentum * t_momentum));
      z = v + ((t_momentum - 1.0) / t_next) * (v - v_prev);
      t_momentum = t_next;
    }
    const Eigen::VectorXcd grad = 2.0 * (j * z - b);
    Eigen::VectorXcd v_next(m);
    for (Eigen::Index i = 0; i < m; ++i) v_next(i) = shrink(z(i) - step * grad(i));
    const double f = objective_at(v_next);
    out.objective_trace.push_back(f);
    v_prev = v;
    v = v_next;
    const double rel = std::abs(f_prev - f) / std::max(1.0, std::abs(f_prev));
    f_prev = f;
    if (rel < params.rel_tolerance && residual_at(v) <= kProxResidualTol) {
      converged = true;
      ++iters;
      break;
    }
  }
  out.x_star = v;
  out.objective = f_prev;
  out.iters_used = iters;
  out.converged = converged;
  return out;
}

}  // namespace

Regularizer Regularizer::l1(double lambda) {
  if (lambda < 0.0) throw std::invalid_argument("Regularizer: lambda must be >= 0");
  Regularizer r;
  r.kind = Kind::L1;
  r.lambda = lambda;
  return r;
}

Regularizer Regularizer::custom(std::function<double(double)> penalty,
                                std::function<double(double, double)> prox) {
  if (!penalty || !prox)
    throw std::invalid_argument("Regularizer: custom needs penalty and prox");
  Regularizer r;
  r.kind = Kind::Custom;
  r.penalty = std::move(penalty);
  r.prox = std::move(prox);
  return r;
}

FeasibleSet FeasibleSet::box(double lo, double hi) {
  if (!(lo <= 0.0 && 0.0 <= hi))
    throw std::invalid_argument("FeasibleSet: box must contain 0");
  FeasibleSet f;
  f.kind = Kind::Box;
  f.lo = lo;
  f.hi = hi;
  return f;
}

FeasibleSet FeasibleSet::full_complex() {
  FeasibleSet f;
  f.kind = Kind::FullComplex;
  f.lo = -kInf;
  f.hi = kInf;
  return f;
}

FeasibleSet FeasibleSet::discrete(std::vector<std::complex<double>> points) {
  if (points.empty()) throw std::invalid_argument("FeasibleSet: empty discrete set");
  FeasibleSet f;
  f.kind = Kind::Discrete;
  f.points = std::move(points);
  return f;
}

Decision Decision::threshold_ssk(double epsilon, double p) {
  if (p <= 0.0) throw std::invalid_argument("Decision: P must be positive");
  Decision d;
  d.kind = Kind::ThresholdSsk;
  d.epsilon = epsilon;
  d.p = p;
  return d;
}

Decision Decision::nearest_symbol(std::vector<std::complex<double>> alphabet) {
  if (alphabet.empty()) throw std::invalid_argument("Decision: empty alphabet");
  Decision d;
  d.kind = Kind::NearestSymbol;
  d.alphabet = std::move(alphabet);
  return d;
}

Decision Decision::identity() {
  Decision d;
  d.kind = Kind::Identity;
  return d;
}

double prox_l1_box(double v, double threshold, double lo, double hi) {
  const double soft = std::copysign(std::max(std::abs(v) - threshold, 0.0), v);
  return std::clamp(soft, lo, hi);
}

SoftEstimate solve_box_lasso(const Eigen::VectorXcd& y, const Eigen::MatrixXcd& h,
                             double lambda, double lo, double hi,
                             const SolverParams& params) {
  return solve_box_real(y, h, Regularizer::l1(lambda), lo, hi, params);
}

SoftEstimate solve(const Eigen::VectorXcd& y, const Eigen::MatrixXcd& h,
                   const DetectorSpec& spec) {
  switch (spec.feasible.kind) {
    case FeasibleSet::Kind::Box:
      return solve_box_real(y, h, spec.reg, spec.feasible.lo, spec.feasible.hi, spec.solver);
    case FeasibleSet::Kind::FullComplex:
      if (spec.reg.kind != Regularizer::Kind::L1)
        throw std::invalid_argument("solve: FullComplex supports L1 only");
      return solve_complex_l1(y, h, spec.reg.lambda, spec.solver);
    case FeasibleSet::Kind::Discrete:
      throw std::invalid_argument(
          "solve: discrete feasible sets are non-convex; use brute_force_map");
  }
  throw std::logic_error("solve: unknown feasible set");
}

Eigen::VectorXcd decide(const Eigen::VectorXcd& x_star, const Decision& rule) {
  Eigen::VectorXcd out(x_star.size());
  switch (rule.kind) {
    case Decision::Kind::ThresholdSsk: {
      const double root_p = std::sqrt(rule.p);
      for (Eigen::Index i = 0; i < x_star.size(); ++i)
        out(i) = x_star(i).real() >= rule.epsilon ? root_p : 0.0;
      return out;
    }
    case Decision::Kind::NearestSymbol: {
      for (Eigen::Index i = 0; i < x_star.size(); ++i) {
        std::complex<double> best{0.0, 0.0};
        double best_d = std::abs(x_star(i));
        for (const auto& s : rule.alphabet) {
          const double d = std::abs(x_star(i) - s);
          if (d < best_d) {
            best_d = d;
            best = s;
          }
        }
        out(i) = best;
      }
      return out;
    }
    case Decision::Kind::Identity:
      return x_star;
  }
  throw std::logic_error("decide: unknown rule");
}

sm::TransmitVector brute_force_map(const Eigen::VectorXcd& y, const Eigen::MatrixXcd& h,
                                   const sm::SmCodebook& codebook, double sigma2) {
  (void)sigma2;  // uniform prior: MAP coincides with ML
  if (h.cols() % codebook.m_u != 0)
    throw std::invalid_argument("brute_force_map: H columns not a multiple of m_u");
  const int k = static_cast<int>(h.cols()) / codebook.m_u;
  const int bits_per_terminal = codebook.bits_per_terminal();
  const long long total_bits = static_cast<long long>(bits_per_terminal) * k;
  if (total_bits > 20)
    throw std::invalid_argument("brute_force_map: search space exceeds 2^20 candidates");

  const std::size_t msgs = std::size_t{1} << bits_per_terminal;

  // Candidate received contribution of every message of every terminal.
  std::vector<std::vector<Eigen::VectorXcd>> contrib(k);
  std::vector<std::vector<Eigen::VectorXcd>> blocks(k);
  for (int t = 0; t < k; ++t) {
    contrib[t].reserve(msgs);
    blocks[t].reserve(msgs);
    for (std::size_t msg = 0; msg < msgs; ++msg) {
      std::vector<std::uint8_t> bits(bits_per_terminal);
      for (int b = 0; b < bits_per_terminal; ++b)
        bits[b] = static_cast<std::uint8_t>((msg >> (bits_per_terminal - 1 - b)) & 1);
      Eigen::VectorXcd block = encode(codebook, bits);
      contrib[t].push_back(h.middleCols(static_cast<Eigen::Index>(t) * codebook.m_u,
                                        codebook.m_u) *
                           block);
      blocks[t].push_back(std::move(block));
    }
  }

  std::vector<std::size_t> choice(k, 0), best_choice(k, 0);
  double best = std::numeric_limits<double>::infinity();
  Eigen::VectorXcd residual = y;

  // Depth-first enumeration with incremental residuals.
  auto recurse = [&](auto&& self, int depth) -> void {
    if (depth == k) {
      const double d = residual.squaredNorm();
      if (d < best) {
        best = d;
        best_choice = choice;
      }
      return;
    }
    for (std::size_t msg = 0; msg < msgs; ++msg) {
      residual -= contrib[depth][msg];
      choice[depth] = msg;
      self(self, depth + 1);
      residual += contrib[depth][msg];
    }
  };
  recurse(recurse, 0);

  sm::TransmitVector x;
  x.m_u = codebook.m_u;
  x.entries.resize(h.cols());
  for (int t = 0; t < k; ++t)
    x.entries.segment(static_cast<Eigen::Index>(t) * codebook.m_u, codebook.m_u) =
        blocks[t][best_choice[t]];
  return x;
}

}  // namespace masm::detect
