#include "masm/replica.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <stdexcept>

#include "masm/quadrature.hpp"

namespace masm::replica {

namespace {

constexpr double kInf = std::numeric_limits<double>::infinity();
constexpr double kInvSqrtPi = 0.56418958354775628694807945156077;
constexpr double kPoleMargin = 1e-9;

double normal_half_density(double t) {
  return std::isinf(t) ? 0.0 : kInvSqrtPi * std::exp(-t * t);
}

/// P(p <= t <= r) for t ~ N(0, 1/2), erfc-based to keep relative accuracy in
/// the tails.
double interval_mass(double p, double r) {
  if (r <= p) return 0.0;
  if (p >= 0.0) return 0.5 * (std::erfc(p) - std::erfc(r));
  if (r <= 0.0) return 0.5 * (std::erfc(-r) - std::erfc(-p));
  return 0.5 * (std::erf(r) - std::erf(p));
}

/// E[t 1{p<=t<=r}] for t ~ N(0, 1/2).
double interval_first_moment(double p, double r) {
  if (r <= p) return 0.0;
  return 0.5 * (normal_half_density(p) - normal_half_density(r));
}

/// E[t^2 1{p<=t<=r}] for t ~ N(0, 1/2).
double interval_second_moment(double p, double r) {
  if (r <= p) return 0.0;
  const double tp = std::isinf(p) ? 0.0 : p * normal_half_density(p);
  const double tr = std::isinf(r) ? 0.0 : r * normal_half_density(r);
  return 0.5 * interval_mass(p, r) + 0.5 * (tp - tr);
}

bool box_closed_form_applies(const DecoupledConfig& cfg) {
  return cfg.feasible.kind == detect::FeasibleSet::Kind::Box &&
         (cfg.reg.kind == detect::Regularizer::Kind::L1 ||
          cfg.reg.kind == detect::Regularizer::Kind::None);
}

double box_threshold(const DecoupledConfig& cfg, double tau) {
  return cfg.reg.kind == detect::Regularizer::Kind::L1 ? tau * cfg.reg.lambda / 2.0 : 0.0;
}

/// Mixture over the decoupled input x = psi s: weight, Re x, (Im x)^2.
struct InputAtom {
  double weight;
  double re;
  double im2;
};

std::vector<InputAtom> input_atoms(const DecoupledConfig& cfg) {
  if (cfg.alphabet.empty())
    throw std::invalid_argument("replica: empty alphabet");
  std::vector<InputAtom> atoms;
  atoms.reserve(cfg.alphabet.size() + 1);
  atoms.push_back({1.0 - cfg.eta, 0.0, 0.0});
  const double ws = cfg.eta / static_cast<double>(cfg.alphabet.size());
  for (const auto& s : cfg.alphabet)
    atoms.push_back({ws, s.real(), s.imag() * s.imag()});
  return atoms;
}

/// Exact expectations for the piecewise-linear box estimator, branch by
/// branch of Eq.-style intervals in y-space:
///   y <= -thl+lo : lo   |  -thl+lo..-thl : y+thl  |  |y| <= thl : 0
///   thl..thl+hi  : y-thl|  y >= thl+hi   : hi
Expectations expectations_box_exact(const ReplicaState& state, const DecoupledConfig& cfg) {
  const double theta = state.theta;
  const double thl = box_threshold(cfg, state.tau);
  const double lo = cfg.feasible.lo;
  const double hi = cfg.feasible.hi;

  Expectations out;
  for (const InputAtom& atom : input_atoms(cfg)) {
    const double a = atom.re;
    if (theta <= 0.0) {
      const double xs = decoupled_estimate_box_lasso(a, state.tau,
                                                     cfg.reg.kind == detect::Regularizer::Kind::L1
                                                         ? cfg.reg.lambda
                                                         : 0.0,
                                                     lo, hi);
      const double d = xs - a;
      out.e_mse += atom.weight * (d * d + atom.im2);
      continue;  // deterministic estimate, independent of z
    }

    // y-space breakpoints mapped to t = (y - a) / theta
    const double b0 = std::isinf(lo) ? -kInf : (-thl + lo - a) / theta;
    const double b1 = (-thl - a) / theta;
    const double b2 = (thl - a) / theta;
    const double b3 = std::isinf(hi) ? kInf : (thl + hi - a) / theta;

    double cross = 0.0;
    double mse = atom.im2;

    // clamp at lo
    if (!std::isinf(lo)) {
      const double i0 = interval_mass(-kInf, b0);
      const double i1 = interval_first_moment(-kInf, b0);
      cross += (lo - a) * i1;
      mse += (lo - a) * (lo - a) * i0;
    }
    // negative soft branch: x* - a = theta t + thl
    {
      const double i0 = interval_mass(b0, b1);
      const double i1 = interval_first_moment(b0, b1);
      const double i2 = interval_second_moment(b0, b1);
      cross += theta * i2 + thl * i1;
      mse += theta * theta * i2 + 2.0 * theta * thl * i1 + thl * thl * i0;
    }
    // dead zone: x* = 0
    {
      const double i0 = interval_mass(b1, b2);
      const double i1 = interval_first_moment(b1, b2);
      cross += -a * i1;
      mse += a * a * i0;
    }
    // positive soft branch: x* - a = theta t - thl
    {
      const double i0 = interval_mass(b2, b3);
      const double i1 = interval_first_moment(b2, b3);
      const double i2 = interval_second_moment(b2, b3);
      cross += theta * i2 - thl * i1;
      mse += theta * theta * i2 - 2.0 * theta * thl * i1 + thl * thl * i0;
    }
    // clamp at hi
    if (!std::isinf(hi)) {
      const double i0 = interval_mass(b3, kInf);
      const double i1 = interval_first_moment(b3, kInf);
      cross += (hi - a) * i1;
      mse += (hi - a) * (hi - a) * i0;
    }

    out.e_cross += atom.weight * cross;
    out.e_mse += atom.weight * mse;
  }
  return out;
}

double estimate_real(const ReplicaState& state, const DecoupledConfig& cfg, double y) {
  if (box_closed_form_applies(cfg)) {
    const double lambda =
        cfg.reg.kind == detect::Regularizer::Kind::L1 ? cfg.reg.lambda : 0.0;
    return decoupled_estimate_box_lasso(y, state.tau, lambda, cfg.feasible.lo,
                                        cfg.feasible.hi);
  }
  const std::complex<double> v = decoupled_estimate_generic(y, state.tau, cfg.reg, cfg.feasible);
  if (v.imag() != 0.0)
    throw std::invalid_argument("replica: complex-valued decoupled estimates need the 2-D hook");
  return v.real();
}

/// phi(c) = c theta(c,q) - tau(c) e_cross(c,q); its zero is the c-update.
double c_equation(double c, double q, const DecoupledConfig& cfg, int order) {
  const ReplicaState st = ReplicaState::make(c, q, cfg);
  const Expectations ex = expectations(st, cfg, order);
  return c * st.theta - st.tau * ex.e_cross;
}

/// Bracketed root search (bisection with secant acceleration). Assumes
/// ga = f(a), gb = f(b) have opposite signs.
template <typename F>
double find_root(F&& f, double a, double b, double ga, double gb) {
  double fa = ga, fb = gb;
  for (int it = 0; it < 200; ++it) {
    double mid;
    // secant proposal, guarded to the interior
    if (fb != fa) {
      mid = b - fb * (b - a) / (fb - fa);
      const double margin = 0.25 * (b - a);
      if (!(mid > a + 1e-3 * margin && mid < b - 1e-3 * margin)) mid = 0.5 * (a + b);
    } else {
      mid = 0.5 * (a + b);
    }
    const double fm = f(mid);
    if (fm == 0.0 || b - a < 1e-15 * std::max(1.0, std::abs(mid)))
      return mid;
    if ((fa < 0.0) != (fm < 0.0)) {
      b = mid;
      fb = fm;
    } else {
      a = mid;
      fa = fm;
    }
  }
  return 0.5 * (a + b);
}

double solve_c_update(double q, const DecoupledConfig& cfg, int order, double c_hint,
                      bool& ok) {
  const double c_lo = cfg.spectral.c_min + kPoleMargin;
  double lo = c_lo;
  double flo = c_equation(lo, q, cfg, order);
  int lift = 0;
  while (!std::isfinite(flo) && lift++ < 40) {
    lo = cfg.spectral.c_min + kPoleMargin * std::pow(10.0, lift);
    flo = c_equation(lo, q, cfg, order);
  }
  double hi = 1e3;
  double fhi = c_equation(hi, q, cfg, order);
  while ((flo < 0.0) == (fhi < 0.0) && hi < 1e12) {
    hi *= 8.0;  // expand the bracket geometrically
    fhi = c_equation(hi, q, cfg, order);
  }
  if (!std::isfinite(flo) || !std::isfinite(fhi) || (flo < 0.0) == (fhi < 0.0)) {
    ok = false;
    return c_hint;
  }
  ok = true;
  return find_root([&](double c) { return c_equation(c, q, cfg, order); }, lo, hi, flo, fhi);
}

}  // namespace

ReplicaState ReplicaState::make(double c, double q, const DecoupledConfig& cfg) {
  if (c <= cfg.spectral.c_min)
    throw std::domain_error("ReplicaState: c at or below the R(-c) domain edge");
  const double r = cfg.spectral.r_transform(-c);
  const double rp = cfg.spectral.r_transform_deriv(-c);
  if (!(r > 0.0))
    throw std::domain_error("ReplicaState: R(-c) must be positive");
  ReplicaState st;
  st.c = c;
  st.q = q;
  st.tau = 1.0 / r;
  double arg = cfg.sigma2 * r - (cfg.sigma2 * c - q) * rp;
  if (arg < 0.0) {
    arg = 0.0;
    st.theta_clamped = true;
  }
  st.theta = st.tau * std::sqrt(arg);
  return st;
}

double decoupled_estimate_box_lasso(double y, double tau, double lambda, double lo,
                                    double hi) {
  if (!(tau > 0.0)) throw std::invalid_argument("decoupled_estimate_box_lasso: tau must be > 0");
  const double thl = tau * lambda / 2.0;
  return detect::prox_l1_box(y, thl, lo, hi);
}

std::complex<double> decoupled_estimate_generic(double y, double tau,
                                                const detect::Regularizer& reg,
                                                const detect::FeasibleSet& feasible) {
  if (!(tau > 0.0)) throw std::invalid_argument("decoupled_estimate_generic: tau must be > 0");

  auto penalty = [&](double v) -> double {
    switch (reg.kind) {
      case detect::Regularizer::Kind::None:
        return 0.0;
      case detect::Regularizer::Kind::L1:
        return reg.lambda * std::abs(v);
      case detect::Regularizer::Kind::Custom:
        return reg.penalty(v);
    }
    return 0.0;
  };
  auto objective = [&](double v) { return (y - v) * (y - v) / tau + penalty(v); };

  if (feasible.kind == detect::FeasibleSet::Kind::Discrete) {
    std::size_t best = 0;
    double best_val = kInf;
    for (std::size_t i = 0; i < feasible.points.size(); ++i) {
      const std::complex<double> v = feasible.points[i];
      const double im = v.imag();
      const double val = ((y - v.real()) * (y - v.real()) + im * im) / tau +
                         (reg.kind == detect::Regularizer::Kind::L1
                              ? reg.lambda * std::abs(v)
                              : (reg.kind == detect::Regularizer::Kind::Custom
                                     ? reg.penalty(v.real())
                                     : 0.0));
      if (val < best_val) {
        best_val = val;
        best = i;
      }
    }
    return feasible.points[best];
  }

  if (feasible.kind != detect::FeasibleSet::Kind::Box)
    throw std::invalid_argument("decoupled_estimate_generic: interval or discrete sets only");

  double lo = feasible.lo;
  double hi = feasible.hi;
  if (std::isinf(lo) || std::isinf(hi)) {
    if (reg.kind != detect::Regularizer::Kind::L1)
      throw std::invalid_argument(
          "decoupled_estimate_generic: unbounded interval needs a coercive regularizer");
    // An L1 minimizer cannot exceed |y|.
    lo = std::max(lo, -std::abs(y) - 1.0);
    hi = std::min(hi, std::abs(y) + 1.0);
  }

  // Cancellation-free objective difference: near the minimum the quadratic
  // term changes by O(dv^2), far below the absolute objective's rounding
  // noise, so golden-section comparisons must use f(v) - f(w) directly. For
  // L1 the penalty difference is factored as lambda (|v| - |w|) to keep it
  // exact as well; custom penalties fall back to plain subtraction.
  auto penalty_diff = [&](double v, double w) -> double {
    switch (reg.kind) {
      case detect::Regularizer::Kind::None:
        return 0.0;
      case detect::Regularizer::Kind::L1:
        return reg.lambda * (std::abs(v) - std::abs(w));
      case detect::Regularizer::Kind::Custom:
        return reg.penalty(v) - reg.penalty(w);
    }
    return 0.0;
  };
  auto diff = [&](double v, double w) {
    return (w - v) * (2.0 * y - v - w) / tau + penalty_diff(v, w);
  };

  // 1024-point bracketing grid, then golden-section inside the winning cell.
  constexpr int kGrid = 1024;
  const double width = hi - lo;
  int best_i = 0;
  double best_val = kInf;
  for (int i = 0; i < kGrid; ++i) {
    const double v = lo + width * i / (kGrid - 1);
    const double val = objective(v);
    if (val < best_val) {
      best_val = val;
      best_i = i;
    }
  }
  double a = lo + width * std::max(best_i - 1, 0) / (kGrid - 1);
  double b = lo + width * std::min(best_i + 1, kGrid - 1) / (kGrid - 1);

  constexpr double kGolden = 0.61803398874989484820;
  double x1 = b - kGolden * (b - a);
  double x2 = a + kGolden * (b - a);
  while (b - a > 1e-10) {
    if (diff(x1, x2) <= 0.0) {
      b = x2;
      x2 = x1;
      x1 = b - kGolden * (b - a);
    } else {
      a = x1;
      x1 = x2;
      x2 = a + kGolden * (b - a);
    }
  }
  return std::complex<double>(0.5 * (a + b), 0.0);
}

Expectations expectations(const ReplicaState& state, const DecoupledConfig& cfg,
                          int order) {
  if (box_closed_form_applies(cfg)) return expectations_box_exact(state, cfg);
  return expectations_gauss_hermite(state, cfg, order);
}

Expectations expectations_gauss_hermite(const ReplicaState& state,
                                        const DecoupledConfig& cfg, int order) {
  const auto& rule = quad::gauss_hermite(order);
  Expectations out;
  for (const InputAtom& atom : input_atoms(cfg)) {
    if (state.theta <= 0.0) {
      const double xs = estimate_real(state, cfg, atom.re);
      const double d = xs - atom.re;
      out.e_mse += atom.weight * (d * d + atom.im2);
      continue;
    }
    double cross = 0.0;
    double mse = 0.0;
    for (std::size_t i = 0; i < rule.nodes.size(); ++i) {
      const double t = rule.nodes[i];
      const double xs = estimate_real(state, cfg, atom.re + state.theta * t);
      const double d = xs - atom.re;
      cross += rule.weights[i] * d * t;
      mse += rule.weights[i] * d * d;
    }
    out.e_cross += atom.weight * kInvSqrtPi * cross;
    out.e_mse += atom.weight * (kInvSqrtPi * mse + atom.im2);
  }
  return out;
}

double error_probability(const ReplicaState& state, const DecoupledConfig& cfg) {
  const double root_p = std::sqrt(cfg.decision.p);

  if (cfg.decision.kind == detect::Decision::Kind::ThresholdSsk &&
      box_closed_form_applies(cfg)) {
    const double eps = cfg.decision.epsilon;
    const double lo = cfg.feasible.lo;
    const double hi = cfg.feasible.hi;
    const double thl = box_threshold(cfg, state.tau);

    // P(x_hat = sqrt(P) | Re x = a) through the monotone estimator map.
    auto p_active = [&](double a) -> double {
      if (eps > hi) return 0.0;
      if (eps <= lo) return 1.0;
      const double y_cut = eps > 0.0 ? eps + thl : eps - thl;
      if (state.theta <= 0.0) return a >= y_cut ? 1.0 : 0.0;
      return 0.5 * std::erfc((y_cut - a) / state.theta);
    };

    double q_e = 0.0;
    bool first_atom = true;  // the psi = 0 atom comes first in input_atoms
    for (const InputAtom& atom : input_atoms(cfg)) {
      const double pa = p_active(atom.re);
      double err;
      const bool x_is_zero = first_atom;
      first_atom = false;
      if (x_is_zero)
        err = pa;  // false alarm
      else if (atom.re == root_p && atom.im2 == 0.0)
        err = 1.0 - pa;  // miss
      else
        err = 1.0;  // decision range {0, sqrt(P)} cannot match this symbol
      q_e += atom.weight * err;
    }
    return q_e;
  }

  // Quadrature fallback for generic rules; the indicator integrand limits
  // accuracy, closed forms above are preferred where they exist.
  const auto& rule = quad::gauss_hermite(std::max(cfg.quadrature_order, 192));
  auto decide_scalar = [&](double xs) -> std::complex<double> {
    switch (cfg.decision.kind) {
      case detect::Decision::Kind::ThresholdSsk:
        return xs >= cfg.decision.epsilon ? std::complex<double>(root_p, 0.0)
                                          : std::complex<double>(0.0, 0.0);
      case detect::Decision::Kind::NearestSymbol: {
        std::complex<double> best{0.0, 0.0};
        double best_d = std::abs(std::complex<double>(xs, 0.0));
        for (const auto& s : cfg.decision.alphabet) {
          const double d = std::abs(std::complex<double>(xs, 0.0) - s);
          if (d < best_d) {
            best_d = d;
            best = s;
          }
        }
        return best;
      }
      case detect::Decision::Kind::Identity:
        return std::complex<double>(xs, 0.0);
    }
    return {0.0, 0.0};
  };

  double q_e = 0.0;
  std::size_t atom_index = 0;
  const auto atoms = input_atoms(cfg);
  for (const InputAtom& atom : atoms) {
    const std::complex<double> x_value =
        atom_index == 0 ? std::complex<double>(0.0, 0.0) : cfg.alphabet[atom_index - 1];
    ++atom_index;
    if (state.theta <= 0.0) {
      const double xs = estimate_real(state, cfg, atom.re);
      q_e += atom.weight * (decide_scalar(xs) != x_value ? 1.0 : 0.0);
      continue;
    }
    double err = 0.0;
    for (std::size_t i = 0; i < rule.nodes.size(); ++i) {
      const double t = rule.nodes[i];
      const double xs = estimate_real(state, cfg, atom.re + state.theta * t);
      if (decide_scalar(xs) != x_value) err += rule.weights[i];
    }
    q_e += atom.weight * kInvSqrtPi * err;
  }
  return q_e;
}

ReplicaSolution solve_fixed_point(const DecoupledConfig& cfg, const FixedPointOptions& opts) {
  if (!(opts.damping > 0.0 && opts.damping <= 1.0))
    throw std::invalid_argument("solve_fixed_point: damping must be in (0, 1]");

  const int order = cfg.quadrature_order;
  double c = std::max(opts.c0, cfg.spectral.c_min + kPoleMargin);
  double q = opts.q0 >= 0.0 ? opts.q0 : cfg.eta * cfg.p;
  double damping = opts.damping;

  ReplicaState state = ReplicaState::make(c, q, cfg);
  Expectations ex = expectations(state, cfg, order);

  double prev_dq = 0.0;
  int flips_in_a_row = 0;
  double last_delta = kInf;

  ReplicaSolution sol;
  int iter = 0;
  for (; iter < opts.max_iters; ++iter) {
    const double r1 = std::abs(c * state.theta - state.tau * ex.e_cross);
    const double r2 = std::abs(q - ex.e_mse);
    if (last_delta < opts.tol && r1 < opts.tol && r2 < opts.tol) {
      sol.converged = true;
      break;
    }

    const double q_next = (1.0 - damping) * q + damping * ex.e_mse;
    bool root_ok = true;
    const double c_next = solve_c_update(q_next, cfg, order, c, root_ok);
    if (!root_ok) break;

    const double dq = q_next - q;
    if (dq * prev_dq < 0.0) {
      if (++flips_in_a_row >= 2) {
        damping = std::max(damping / 2.0, 1.0 / 64.0);
        flips_in_a_row = 0;
      }
    } else {
      flips_in_a_row = 0;
    }
    prev_dq = dq;

    last_delta = std::max(std::abs(c_next - c), std::abs(dq));
    c = c_next;
    q = q_next;
    state = ReplicaState::make(c, q, cfg);
    if (state.theta_clamped) {  // sqrt argument went negative: pull q down, retry
      q = std::max(q * 0.5, 0.0);
      state = ReplicaState::make(c, q, cfg);
    }
    ex = expectations(state, cfg, order);
  }

  sol.c_star = c;
  sol.q_star = q;
  sol.gamma = ex.e_mse;
  sol.q_e = error_probability(state, cfg);
  sol.residuals = {std::abs(c * state.theta - state.tau * ex.e_cross),
                   std::abs(q - ex.e_mse)};
  sol.iters = iter;
  return sol;
}

ReplicaSolution solve_replica(const DecoupledConfig& cfg, const FixedPointOptions& opts) {
  const double q_ref = opts.q0 >= 0.0 ? opts.q0 : cfg.eta * cfg.p;
  FixedPointOptions spread[3] = {opts, opts, opts};
  spread[1].c0 = std::max(10.0 * opts.c0, 1.0);
  spread[1].q0 = 0.25 * q_ref;
  spread[2].c0 = 0.01;
  spread[2].q0 = 0.9 * q_ref;

  ReplicaSolution primary;
  bool have_primary = false;
  bool ambiguous = false;
  for (const auto& o : spread) {
    const ReplicaSolution s = solve_fixed_point(cfg, o);
    if (!s.converged) continue;
    if (!have_primary) {
      primary = s;
      have_primary = true;
    } else {
      const double scale = std::max({1.0, std::abs(primary.c_star), std::abs(primary.q_star)});
      if (std::abs(s.c_star - primary.c_star) > 1e4 * opts.tol * scale ||
          std::abs(s.q_star - primary.q_star) > 1e4 * opts.tol * scale)
        ambiguous = true;
    }
  }
  if (!have_primary) return solve_fixed_point(cfg, opts);
  primary.ambiguous = ambiguous;
  return primary;
}

TuneResult tune_lambda(const DecoupledConfig& cfg, const std::vector<double>& lambda_grid,
                       bool refine) {
  if (lambda_grid.empty()) throw std::invalid_argument("tune_lambda: empty grid");
  if (cfg.reg.kind != detect::Regularizer::Kind::L1)
    throw std::invalid_argument("tune_lambda: tunes the L1 weight");

  TuneResult result;
  DecoupledConfig local = cfg;
  FixedPointOptions opts;

  auto solve_at = [&](double lambda, const FixedPointOptions& o) {
    local.reg.lambda = lambda;
    return solve_fixed_point(local, o);
  };

  FixedPointOptions warm = opts;
  for (double lambda : lambda_grid) {
    const ReplicaSolution s = solve_at(lambda, warm);
    if (s.converged) {
      warm.c0 = s.c_star;
      warm.q0 = s.q_star;
      result.grid.push_back({lambda, s});
    } else {
      result.excluded.push_back(lambda);
      result.grid.push_back({lambda, s});
    }
  }

  int best = -1;
  for (std::size_t i = 0; i < result.grid.size(); ++i) {
    if (!result.grid[i].solution.converged) continue;
    if (best < 0 || result.grid[i].solution.gamma < result.grid[best].solution.gamma)
      best = static_cast<int>(i);
  }
  if (best < 0) throw std::runtime_error("tune_lambda: no grid point converged");

  result.lambda_star = result.grid[best].lambda;
  result.gamma_min = result.grid[best].solution.gamma;
  result.at_star = result.grid[best].solution;

  if (refine && result.grid.size() >= 2) {
    // golden-section on the bracketing interval around the grid minimizer
    const int lo_i = std::max(best - 1, 0);
    const int hi_i = std::min<int>(best + 1, static_cast<int>(result.grid.size()) - 1);
    double a = result.grid[lo_i].lambda;
    double b = result.grid[hi_i].lambda;
    FixedPointOptions w;
    w.c0 = result.at_star.c_star;
    w.q0 = result.at_star.q_star;

    auto gamma_at = [&](double lambda) -> double {
      const ReplicaSolution s = solve_at(lambda, w);
      if (!s.converged) return kInf;
      if (s.gamma < result.gamma_min) {
        result.lambda_star = lambda;
        result.gamma_min = s.gamma;
        result.at_star = s;
      }
      return s.gamma;
    };

    constexpr double kGolden = 0.61803398874989484820;
    double x1 = b - kGolden * (b - a);
    double x2 = a + kGolden * (b - a);
    double f1 = gamma_at(x1);
    double f2 = gamma_at(x2);
    while (b - a > 1e-4 * std::max(1.0, std::abs(b))) {
      if (f1 <= f2) {
        b = x2;
        x2 = x1;
        f2 = f1;
        x1 = b - kGolden * (b - a);
        f1 = gamma_at(x1);
      } else {
        a = x1;
        x1 = x2;
        f1 = f2;
        x2 = a + kGolden * (b - a);
        f2 = gamma_at(x2);
      }
    }
  }
  return result;
}

}  // namespace masm::replica
