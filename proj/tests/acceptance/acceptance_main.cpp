// Acceptance suite: every criterion runs at its pinned tolerance and prints
// one pass/fail line. Exit code 0 only if all requested criteria pass.
//
// Usage: masm_acceptance [criterion ...]   (default: all)

#include <chrono>
#include <cmath>
#include <cstdio>
#include <functional>
#include <string>
#include <vector>

#include <Eigen/Dense>

#include "masm/channel.hpp"
#include "masm/harness.hpp"
#include "masm/replica.hpp"
#include "masm/rng.hpp"
#include "masm/spectral.hpp"
#include "oracles.hpp"

using namespace masm;
using harness::ExperimentConfig;

namespace {

double now_seconds() {
  using clock = std::chrono::steady_clock;
  return std::chrono::duration<double>(clock::now().time_since_epoch()).count();
}

ExperimentConfig paper_config() {
  ExperimentConfig cfg;
  cfg.system = {20, 8, 1, 80, 1.0, 0, true, false, 14.0, 0.0};
  cfg.detector.lambda = 0.13;
  cfg.detector.box_lo = 0.0;
  cfg.detector.box_hi = 1.0;
  cfg.detector.epsilon = 0.5;
  cfg.detector.acceleration = true;
  cfg.sweep.variable = "lambda";
  cfg.sweep.grid = {0.13};
  cfg.trials = 1000;
  cfg.master_seed = 20190707;
  return cfg;
}

std::vector<double> linspace(double lo, double hi, int n) {
  std::vector<double> out;
  for (int i = 0; i < n; ++i) out.push_back(lo + (hi - lo) * i / (n - 1));
  return out;
}

// 1. lambda* minimizing the predicted MSE lies in [0.12, 0.14]; 50-point
//    replica sweep finishes within a minute.
bool criterion1(std::string& detail) {
  const double t0 = now_seconds();
  const auto cfg = paper_config();
  const auto dc = harness::make_decoupled_config(cfg, 0.0, harness::derived_quantities(cfg).sigma2);
  const auto tuned = replica::tune_lambda(dc, linspace(0.02, 0.5, 50), true);
  const double elapsed = now_seconds() - t0;
  char buf[160];
  std::snprintf(buf, sizeof(buf), "lambda* = %.5f, Gamma = %.6f, %.2f s", tuned.lambda_star,
                tuned.gamma_min, elapsed);
  detail = buf;
  return tuned.lambda_star >= 0.12 && tuned.lambda_star <= 0.14 && tuned.excluded.empty() &&
         elapsed < 60.0;
}

// 2. 1000-trial simulation tracks the replica prediction: MSE within 5%
//    relative and entry error rate within 3 standard errors at 10 lambdas.
bool criterion2(std::string& detail) {
  const double t0 = now_seconds();
  auto cfg = paper_config();
  cfg.sweep.grid = linspace(0.02, 0.5, 10);
  cfg.replica.enabled = true;
  const auto table = harness::run_sweep(cfg, 0);

  double worst_mse = 0.0, worst_err = 0.0;
  bool ok = true;
  for (const auto& row : table.rows) {
    if (!row.mse_replica || !row.replica_converged.value_or(false)) ok = false;
    const double rel = std::abs(*row.mse_sim - *row.mse_replica) / *row.mse_replica;
    const double err_dev = *row.err_se > 0.0
                               ? std::abs(*row.err_sim - *row.err_replica) / *row.err_se
                               : 0.0;
    worst_mse = std::max(worst_mse, rel);
    worst_err = std::max(worst_err, err_dev);
    if (rel >= 0.05 || err_dev >= 3.0) ok = false;
  }
  const double elapsed = now_seconds() - t0;
  char buf[160];
  std::snprintf(buf, sizeof(buf), "max |dMSE|/MSE = %.4f, max |derr| = %.2f se, %.0f s",
                worst_mse, worst_err, elapsed);
  detail = buf;
  return ok && elapsed < 1800.0;
}

// 3. Gaussian and scaled +-1 i.i.d. channels give the same MSE within
//    3 combined standard errors (universality), as specified. A real +-1/sqrt(M)
//    matrix is not circularly symmetric (E[h^2] = 1/M != 0): for real H the
//    imaginary receive components carry no signal, so the real-variable
//    program effectively loses half its measurements and this check fails by
//    a wide, reproducible margin. The moment-matched quaternary ensemble
//    (+-1 +- i)/sqrt(2M) is reported alongside: universality does hold inside
//    the circularly symmetric i.i.d. class.
bool criterion3(std::string& detail) {
  auto cfg = paper_config();
  cfg.replica.enabled = false;
  cfg.channel.kind = "iid-gaussian";
  const auto gauss = harness::run_sweep(cfg, 0).rows[0];
  cfg.channel.kind = "iid-pm1";
  cfg.master_seed = 31337;  // independent draws
  const auto pm1 = harness::run_sweep(cfg, 0).rows[0];

  const double diff = std::abs(*gauss.mse_sim - *pm1.mse_sim);
  const double se = std::hypot(*gauss.mse_se, *pm1.mse_se);

  // supplementary: same comparison for the circularly symmetric +-1 +- i law
  const auto quat_cfg = paper_config();
  const auto codebook = harness::make_codebook(quat_cfg);
  const double sigma2 = harness::derived_quantities(quat_cfg).sigma2;
  const double s = 1.0 / std::sqrt(2.0 * 160.0);
  const auto quat_ens = channel::ChannelEnsemble::iid_custom(
      80, 160, [s](RngStream& r) {
        return std::complex<double>{(r.next_u64() & 1u) ? s : -s,
                                    (r.next_u64() & 1u) ? s : -s};
      });
  double sum = 0.0, sum2 = 0.0;
  const int trials = 1000;
  for (int t = 0; t < trials; ++t) {
    RngStream rng = RngStream::derive(3003, 0, t);
    const auto h = channel::sample_channel(quat_ens, rng);
    sm::TransmitVector x;
    x.m_u = 8;
    x.entries.resize(160);
    for (int k = 0; k < 20; ++k) {
      std::vector<std::uint8_t> bits(3);
      for (auto& b : bits) b = static_cast<std::uint8_t>(rng.next_u64() & 1u);
      x.entries.segment(8 * k, 8) = sm::encode(codebook, bits);
    }
    const auto obs = channel::transmit(h, std::move(x), sigma2, rng);
    const auto est = detect::solve_box_lasso(obs.y, obs.h, 0.13, 0.0, 1.0);
    const double mse = (est.x_star - obs.x_true.entries).squaredNorm() / 160.0;
    sum += mse;
    sum2 += mse * mse;
  }
  const double quat_mean = sum / trials;
  const double quat_se =
      std::sqrt((sum2 / trials - quat_mean * quat_mean) / (trials - 1));
  const double quat_dev = std::abs(quat_mean - *gauss.mse_sim) /
                          std::hypot(quat_se, *gauss.mse_se);

  char buf[240];
  std::snprintf(buf, sizeof(buf),
                "real +-1: |dMSE| = %.3g vs 3 se = %.3g (%.1f se); "
                "moment-matched quaternary: %.1f se",
                diff, 3.0 * se, diff / se, quat_dev);
  detail = buf;
  return diff < 3.0 * se;
}

// 4. Box bounds of +-1e3 reproduce the unboxed soft-threshold predictions to
//    1e-6, and the simulated boxed/unboxed detectors agree within MC error.
bool criterion4(std::string& detail) {
  const auto base = paper_config();
  const double sigma2 = harness::derived_quantities(base).sigma2;
  auto dc_wide = harness::make_decoupled_config(base, 0.13, sigma2);
  dc_wide.feasible = detect::FeasibleSet::box(-1e3, 1e3);
  auto dc_free = dc_wide;
  dc_free.feasible = detect::FeasibleSet::box(-std::numeric_limits<double>::infinity(),
                                              std::numeric_limits<double>::infinity());
  RngStream rng(404);
  double worst_state = 0.0;
  for (int rep = 0; rep < 5; ++rep) {
    const double c = 0.05 + 2.0 * rng.uniform01();
    const double q = 0.001 + 0.2 * rng.uniform01();
    const auto st = replica::ReplicaState::make(c, q, dc_wide);
    const auto ew = replica::expectations(st, dc_wide);
    const auto eu = replica::expectations(st, dc_free);
    worst_state = std::max(worst_state, std::abs(ew.e_mse - eu.e_mse));
  }

  auto cfg = paper_config();
  cfg.replica.enabled = false;
  cfg.trials = 200;
  cfg.detector.box_lo = -1e3;
  cfg.detector.box_hi = 1e3;
  const auto boxed = harness::run_sweep(cfg, 0).rows[0];
  cfg.detector.box_lo = -std::numeric_limits<double>::infinity();
  cfg.detector.box_hi = std::numeric_limits<double>::infinity();
  const auto unboxed = harness::run_sweep(cfg, 0).rows[0];
  const double diff = std::abs(*boxed.mse_sim - *unboxed.mse_sim);
  const double se = std::hypot(*boxed.mse_se, *unboxed.mse_se);

  char buf[160];
  std::snprintf(buf, sizeof(buf), "state gap = %.2e, sim gap = %.3g vs 3 se = %.3g",
                worst_state, diff, 3.0 * se);
  detail = buf;
  return worst_state < 1e-6 && diff < 3.0 * se;
}

// 5. Proximal solver vs exhaustive 201-point grid oracle on 50 random
//    instances, plus the prox fixed-point residual at convergence.
bool criterion5(std::string& detail) {
  RngStream rng(2025);
  detect::SolverParams params;
  params.acceleration = false;
  params.rel_tolerance = 1e-14;
  params.max_iters = 20000;

  double worst_gap = -1e300, worst_residual = 0.0;
  bool ok = true;
  for (int k = 0; k < 50; ++k) {
    Eigen::MatrixXcd h(8, 4);
    for (int i = 0; i < 8; ++i)
      for (int j = 0; j < 4; ++j) h(i, j) = rng.complex_normal(0.25);
    Eigen::VectorXd x(4);
    for (int j = 0; j < 4; ++j) x(j) = rng.uniform01() < 0.5 ? rng.uniform01() : 0.0;
    Eigen::VectorXcd y = h * x.cast<std::complex<double>>();
    for (int i = 0; i < 8; ++i) y(i) += rng.complex_normal(0.05);
    const double lambda = 0.05 + 0.45 * rng.uniform01();

    const auto est = detect::solve_box_lasso(y, h, lambda, 0.0, 1.0, params);
    const double grid = oracle::grid_search_box_lasso(y, h, lambda, 0.0, 1.0, 201);
    worst_gap = std::max(worst_gap, est.objective - grid);
    if (est.objective > grid + 1e-6) ok = false;

    const Eigen::MatrixXd a = (h.adjoint() * h).real();
    const Eigen::VectorXd b = (h.adjoint() * y).real();
    const Eigen::VectorXd v = est.x_star.real();
    const Eigen::VectorXd grad = 2.0 * (a * v - b);
    for (int i = 0; i < 4; ++i) {
      const double p =
          detect::prox_l1_box(v(i) - est.step * grad(i), est.step * lambda, 0.0, 1.0);
      worst_residual = std::max(worst_residual, std::abs(p - v(i)));
    }
    if (!est.converged) ok = false;
  }
  if (worst_residual >= 1e-8) ok = false;
  char buf[160];
  std::snprintf(buf, sizeof(buf), "max obj gap = %.3g (<= 1e-6), max residual = %.3g (< 1e-8)",
                worst_gap, worst_residual);
  detail = buf;
  return ok;
}

// 6. Quadrature expectations vs a 1e7-sample scalar Monte Carlo (3 se), and
//    the closed-form estimator vs the generic 1-D minimizer (1e-8).
bool criterion6(std::string& detail) {
  const auto base = paper_config();
  const auto dc = harness::make_decoupled_config(base, 0.13, harness::derived_quantities(base).sigma2);
  RngStream rng(606);
  double worst_se_units = 0.0;
  bool ok = true;
  for (int rep = 0; rep < 5; ++rep) {
    const double c = 0.05 + 2.0 * rng.uniform01();
    const double q = 0.001 + 0.1 * rng.uniform01();
    const auto st = replica::ReplicaState::make(c, q, dc);
    const auto ex = replica::expectations(st, dc, 96);
    const auto mc = oracle::scalar_mc_expectations(dc.eta, dc.p, st.theta,
                                                   st.tau * 0.13 / 2.0, 0.0, 1.0,
                                                   10000000, 8800 + rep);
    const double dev_c = std::abs(ex.e_cross - mc.e_cross) / mc.se_cross;
    const double dev_m = std::abs(ex.e_mse - mc.e_mse) / mc.se_mse;
    worst_se_units = std::max({worst_se_units, dev_c, dev_m});
    if (dev_c >= 3.0 || dev_m >= 3.0) ok = false;
  }

  double worst_est = 0.0;
  for (int rep = 0; rep < 10; ++rep) {
    const double tau = 0.2 + 3.0 * rng.uniform01();
    const double lambda = 0.5 * rng.uniform01();
    const double lo = -rng.uniform01();
    const double hi = 0.5 + rng.uniform01();
    const auto reg = detect::Regularizer::l1(lambda);
    const auto box = detect::FeasibleSet::box(lo, hi);
    for (int k = 0; k < 10000; ++k) {
      const double y = -3.0 + 6.0 * k / 9999.0;
      const double closed = replica::decoupled_estimate_box_lasso(y, tau, lambda, lo, hi);
      const double generic = replica::decoupled_estimate_generic(y, tau, reg, box).real();
      worst_est = std::max(worst_est, std::abs(closed - generic));
    }
  }
  if (worst_est > 1e-8) ok = false;
  char buf[160];
  std::snprintf(buf, sizeof(buf), "max |dE| = %.2f se (< 3), max |dx*| = %.2e (<= 1e-8)",
                worst_se_units, worst_est);
  detail = buf;
  return ok;
}

// 7. Sampled Gram spectra match the MP law (KS < 0.05 over 20 draws) and R'
//    matches finite differences to 1e-4 relative.
bool criterion7(std::string& detail) {
  double ks_sum = 0.0;
  const int draws = 20;
  for (int d = 0; d < draws; ++d) {
    RngStream rng = RngStream::derive(777, d);
    const auto ens = channel::ChannelEnsemble::iid_gaussian(80, 160);
    const Eigen::MatrixXcd h = channel::sample_channel(ens, rng);
    ks_sum += oracle::ks_distance(oracle::gram_eigenvalues(h),
                                  [](double x) { return oracle::mp_cdf(0.5, x); });
  }
  const double ks = ks_sum / draws;

  const auto model = spectral::SpectralModel::marcenko_pastur(0.5);
  double worst_fd = 0.0;
  for (double w : {-5.0, -1.0, -0.1, 0.0, 0.5}) {
    const double fd = oracle::central_difference(model.r_transform, w, 1e-6);
    worst_fd = std::max(worst_fd,
                        std::abs(model.r_transform_deriv(w) - fd) / std::abs(fd));
  }
  char buf[160];
  std::snprintf(buf, sizeof(buf), "mean KS = %.4f (< 0.05), max R' rel dev = %.2e (< 1e-4)",
                ks, worst_fd);
  detail = buf;
  return ks < 0.05 && worst_fd < 1e-4;
}

// 8. Identical config and seed give byte-identical CSV across runs and
//    worker counts.
bool criterion8(std::string& detail) {
  auto cfg = paper_config();
  cfg.sweep.grid = {0.05, 0.13, 0.3};
  cfg.trials = 25;
  cfg.replica.enabled = true;
  const std::string a = harness::to_csv(harness::run_sweep(cfg, 1));
  const std::string b = harness::to_csv(harness::run_sweep(cfg, 1));
  const std::string c = harness::to_csv(harness::run_sweep(cfg, 4));
  const std::string d = harness::to_csv(harness::run_sweep(cfg, 2));
  const bool ok = (a == b) && (a == c) && (a == d);
  detail = ok ? "identical across reruns and worker counts {1, 2, 4}" : "outputs differ";
  return ok;
}

}  // namespace

int main(int argc, char** argv) {
  struct Criterion {
    int id;
    const char* name;
    std::function<bool(std::string&)> run;
  };
  const std::vector<Criterion> criteria = {
      {1, "replica lambda* in [0.12, 0.14] at the published operating point", criterion1},
      {2, "simulation tracks replica prediction (5% MSE, 3 se error rate)", criterion2},
      {3, "Gaussian vs scaled +-1 channel universality (3 combined se)", criterion3},
      {4, "standard-LASSO degeneration for huge box bounds", criterion4},
      {5, "solver objective vs grid oracle, prox fixed-point residual", criterion5},
      {6, "scalar expectations vs 1e7 Monte Carlo, Eq.-map vs generic minimizer", criterion6},
      {7, "Gram spectra follow MP law, R' matches finite differences", criterion7},
      {8, "byte-identical CSV across runs and worker counts", criterion8},
  };

  std::vector<int> selected;
  for (int i = 1; i < argc; ++i) selected.push_back(std::atoi(argv[i]));

  int failures = 0;
  for (const auto& crit : criteria) {
    if (!selected.empty() &&
        std::find(selected.begin(), selected.end(), crit.id) == selected.end())
      continue;
    std::string detail;
    bool ok = false;
    try {
      ok = crit.run(detail);
    } catch (const std::exception& e) {
      detail = std::string("exception: ") + e.what();
    }
    std::printf("[%s] criterion %d: %s -- %s\n", ok ? "PASS" : "FAIL", crit.id, crit.name,
                detail.c_str());
    std::fflush(stdout);
    if (!ok) ++failures;
  }
  return failures == 0 ? 0 : 1;
}
