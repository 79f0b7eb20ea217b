#include "masm/harness.hpp"

#include <nlohmann/json.hpp>

#include <atomic>
#include <cmath>
#include <cstdio>
#include <fstream>
#include <future>
#include <sstream>
#include <stdexcept>
#include <thread>

#include "masm/rng.hpp"

namespace masm::harness {

using nlohmann::json;

namespace {

std::string fmt(double v) {
  char buf[40];
  std::snprintf(buf, sizeof(buf), "%.17g", v);
  return buf;
}

std::string fmt_opt(const std::optional<double>& v) { return v ? fmt(*v) : std::string(); }

void throw_on_violations(const ExperimentConfig& cfg, RunMode mode) {
  const auto violations = validate(cfg, mode);
  if (violations.empty()) return;
  std::ostringstream msg;
  msg << "invalid config:";
  for (const auto& v : violations) msg << "\n  - " << v;
  throw std::invalid_argument(msg.str());
}

struct GridPoint {
  double lambda;
  double sigma2;
};

GridPoint grid_point(const ExperimentConfig& cfg, double value) {
  const DerivedQuantities d = derived_quantities(cfg);
  if (cfg.sweep.variable == "lambda") return {value, d.sigma2};
  return {cfg.detector.lambda, channel::sigma2_from_snr_db(cfg.system.p, value)};
}

TrialResult run_trial(const ExperimentConfig& cfg, const sm::SmCodebook& codebook,
                      const channel::ChannelEnsemble& ensemble,
                      const detect::DetectorSpec& spec, double sigma2, double lambda,
                      std::uint64_t grid_index, std::uint64_t trial_index) {
  RngStream rng = RngStream::derive(cfg.master_seed, grid_index, trial_index);
  const int k = cfg.system.k;
  const int m_u = cfg.system.m_u;
  const int m = k * m_u;

  // Fixed draw order per trial: channel, bits, noise.
  const Eigen::MatrixXcd h = channel::sample_channel(ensemble, rng);

  const int bits_per_terminal = codebook.bits_per_terminal();
  std::vector<std::vector<std::uint8_t>> sent_bits(k);
  sm::TransmitVector x;
  x.m_u = m_u;
  x.entries.resize(m);
  for (int t = 0; t < k; ++t) {
    sent_bits[t].resize(bits_per_terminal);
    for (int b = 0; b < bits_per_terminal; ++b)
      sent_bits[t][b] = static_cast<std::uint8_t>(rng.next_u64() & 1u);
    x.entries.segment(static_cast<Eigen::Index>(t) * m_u, m_u) =
        sm::encode(codebook, sent_bits[t]);
  }

  const channel::Observation obs = channel::transmit(h, std::move(x), sigma2, rng);

  detect::DetectorSpec local = spec;
  local.reg = detect::Regularizer::l1(lambda);
  const detect::SoftEstimate est = detect::solve(obs.y, obs.h, local);
  const Eigen::VectorXcd detected = detect::decide(est.x_star, local.decision);

  TrialResult res;
  res.squared_error_per_m = (est.x_star - obs.x_true.entries).squaredNorm() / m;
  for (Eigen::Index i = 0; i < detected.size(); ++i)
    if (detected(i) != obs.x_true.entries(i)) ++res.entry_errors;
  for (int t = 0; t < k; ++t) {
    const sm::DecodeResult dec =
        sm::decode(codebook, detected.segment(static_cast<Eigen::Index>(t) * m_u, m_u));
    if (!dec.valid) ++res.invalid_supports;
    for (int b = 0; b < bits_per_terminal; ++b)
      if (dec.bits[b] != sent_bits[t][b]) ++res.bit_errors;
  }
  res.solver_iters = est.iters_used;
  res.solver_converged = est.converged;
  res.seed = trial_index;
  return res;
}

struct Aggregate {
  double mean = 0.0;
  double se = 0.0;
};

Aggregate aggregate(const std::vector<double>& values) {
  Aggregate a;
  const std::size_t n = values.size();
  if (n == 0) return a;
  double sum = 0.0;
  for (double v : values) sum += v;
  a.mean = sum / static_cast<double>(n);
  if (n >= 2) {
    double ss = 0.0;
    for (double v : values) ss += (v - a.mean) * (v - a.mean);
    a.se = std::sqrt(ss / static_cast<double>(n - 1)) / std::sqrt(static_cast<double>(n));
  }
  return a;
}

std::vector<replica::ReplicaSolution> replica_pipeline(const ExperimentConfig& cfg) {
  // Sequential warm-started sweep; runs concurrently with the simulation.
  std::vector<replica::ReplicaSolution> out;
  out.reserve(cfg.sweep.grid.size());
  replica::FixedPointOptions opts;
  opts.damping = cfg.replica.damping;
  opts.tol = cfg.replica.tol;
  opts.max_iters = cfg.replica.max_iters;
  bool warm = false;
  for (double value : cfg.sweep.grid) {
    const GridPoint gp = grid_point(cfg, value);
    const replica::DecoupledConfig dc = make_decoupled_config(cfg, gp.lambda, gp.sigma2);
    replica::ReplicaSolution s =
        warm ? replica::solve_fixed_point(dc, opts) : replica::solve_replica(dc, opts);
    if (s.converged) {
      opts.c0 = s.c_star;
      opts.q0 = s.q_star;
      warm = true;
    }
    out.push_back(s);
  }
  return out;
}

}  // namespace

ResultTable run_sweep(const ExperimentConfig& cfg, int workers) {
  throw_on_violations(cfg, RunMode::Simulate);
  if (workers <= 0) {
    const unsigned hc = std::thread::hardware_concurrency();
    workers = hc > 0 ? static_cast<int>(hc) : 1;
  }

  const sm::SmCodebook codebook = make_codebook(cfg);
  const channel::ChannelEnsemble ensemble = make_ensemble(cfg);
  const int m = cfg.system.k * cfg.system.m_u;
  const long long trials = cfg.trials;

  std::future<std::vector<replica::ReplicaSolution>> replica_future;
  if (cfg.replica.enabled)
    replica_future = std::async(std::launch::async, replica_pipeline, std::cref(cfg));

  ResultTable table;
  for (std::size_t g = 0; g < cfg.sweep.grid.size(); ++g) {
    const double value = cfg.sweep.grid[g];
    const GridPoint gp = grid_point(cfg, value);
    const detect::DetectorSpec spec = make_detector_spec(cfg, gp.lambda);

    std::vector<TrialResult> results(trials);
    std::atomic<long long> next{0};
    auto worker_fn = [&]() {
      for (;;) {
        const long long t = next.fetch_add(1);
        if (t >= trials) return;
        results[t] = run_trial(cfg, codebook, ensemble, spec, gp.sigma2, gp.lambda,
                               static_cast<std::uint64_t>(g), static_cast<std::uint64_t>(t));
      }
    };
    std::vector<std::thread> pool;
    const int nw = static_cast<int>(std::min<long long>(workers, trials));
    pool.reserve(nw);
    for (int w = 0; w < nw; ++w) pool.emplace_back(worker_fn);
    for (auto& th : pool) th.join();

    // deterministic indexed reduce
    std::vector<double> mse_vals(trials), err_vals(trials);
    double invalid = 0.0, bit_err = 0.0, iters = 0.0;
    for (long long t = 0; t < trials; ++t) {
      mse_vals[t] = results[t].squared_error_per_m;
      err_vals[t] = static_cast<double>(results[t].entry_errors) / m;
      invalid += results[t].invalid_supports;
      bit_err += results[t].bit_errors;
      iters += results[t].solver_iters;
    }
    const Aggregate mse = aggregate(mse_vals);
    const Aggregate err = aggregate(err_vals);

    ResultRow row;
    row.sweep_var = cfg.sweep.variable;
    row.value = value;
    row.mse_sim = mse.mean;
    row.mse_se = mse.se;
    row.err_sim = err.mean;
    row.err_se = err.se;
    row.trials = trials;
    row.seed = cfg.master_seed;
    row.invalid_support_rate = invalid / (static_cast<double>(trials) * cfg.system.k);
    row.bit_error_rate =
        bit_err / (static_cast<double>(trials) * cfg.system.k * codebook.bits_per_terminal());
    row.mean_solver_iters = iters / static_cast<double>(trials);
    table.rows.push_back(std::move(row));
  }

  if (replica_future.valid()) {
    const auto solutions = replica_future.get();
    for (std::size_t g = 0; g < solutions.size() && g < table.rows.size(); ++g) {
      table.rows[g].mse_replica = solutions[g].gamma;
      table.rows[g].err_replica = solutions[g].q_e;
      table.rows[g].replica_converged = solutions[g].converged;
      table.rows[g].replica_ambiguous = solutions[g].ambiguous;
    }
  }
  return table;
}

ReplicaTable run_replica_sweep(const ExperimentConfig& cfg) {
  throw_on_violations(cfg, RunMode::Replica);
  const auto solutions = replica_pipeline(cfg);
  ReplicaTable table;
  for (std::size_t g = 0; g < solutions.size(); ++g) {
    ReplicaRow row;
    row.sweep_var = cfg.sweep.variable;
    row.value = cfg.sweep.grid[g];
    row.c_star = solutions[g].c_star;
    row.q_star = solutions[g].q_star;
    row.gamma = solutions[g].gamma;
    row.q_e = solutions[g].q_e;
    row.converged = solutions[g].converged;
    table.rows.push_back(row);
  }
  return table;
}

ResultTable run_tune(const ExperimentConfig& cfg) {
  throw_on_violations(cfg, RunMode::Tune);
  ResultTable table;
  for (double snr_db : cfg.sweep.grid) {
    const double sigma2 = channel::sigma2_from_snr_db(cfg.system.p, snr_db);
    const replica::DecoupledConfig dc = make_decoupled_config(cfg, 0.0, sigma2);
    const replica::TuneResult tuned =
        replica::tune_lambda(dc, cfg.tune.lambda_grid, cfg.tune.refine);

    ResultRow row;
    row.sweep_var = "snr_db";
    row.value = snr_db;
    row.mse_replica = tuned.gamma_min;
    row.err_replica = tuned.at_star.q_e;
    row.trials = 0;
    row.seed = cfg.master_seed;
    row.lambda_star = tuned.lambda_star;
    row.replica_converged = tuned.at_star.converged;
    table.rows.push_back(std::move(row));
  }
  return table;
}

std::string to_csv(const ResultTable& table) {
  bool with_lambda_star = false;
  for (const auto& r : table.rows)
    if (r.lambda_star) with_lambda_star = true;

  std::ostringstream out;
  out << "sweep_var,value,mse_sim,mse_se,err_sim,err_se,mse_replica,err_replica,trials,seed";
  if (with_lambda_star) out << ",lambda_star";
  out << "\n";
  for (const auto& r : table.rows) {
    out << r.sweep_var << ',' << fmt(r.value) << ',' << fmt_opt(r.mse_sim) << ','
        << fmt_opt(r.mse_se) << ',' << fmt_opt(r.err_sim) << ',' << fmt_opt(r.err_se) << ','
        << fmt_opt(r.mse_replica) << ',' << fmt_opt(r.err_replica) << ',' << r.trials << ','
        << r.seed;
    if (with_lambda_star) out << ',' << fmt_opt(r.lambda_star);
    out << "\n";
  }
  return out.str();
}

std::string to_csv(const ReplicaTable& table) {
  std::ostringstream out;
  out << "sweep_var,value,c_star,q_star,gamma,q_e,converged\n";
  for (const auto& r : table.rows) {
    out << r.sweep_var << ',' << fmt(r.value) << ',' << fmt(r.c_star) << ',' << fmt(r.q_star)
        << ',' << fmt(r.gamma) << ',' << fmt(r.q_e) << ',' << (r.converged ? 1 : 0) << "\n";
  }
  return out.str();
}

std::string to_json(const ResultTable& table, const ExperimentConfig& cfg) {
  json j;
  j["config"] = json::parse(config_echo_json(cfg));
  j["rows"] = json::array();
  for (const auto& r : table.rows) {
    json row;
    row["sweep_var"] = r.sweep_var;
    row["value"] = r.value;
    auto put = [&row](const char* key, const std::optional<double>& v) {
      if (v) row[key] = *v;
    };
    put("mse_sim", r.mse_sim);
    put("mse_se", r.mse_se);
    put("err_sim", r.err_sim);
    put("err_se", r.err_se);
    put("mse_replica", r.mse_replica);
    put("err_replica", r.err_replica);
    row["trials"] = r.trials;
    row["seed"] = r.seed;
    put("lambda_star", r.lambda_star);
    put("invalid_support_rate", r.invalid_support_rate);
    put("bit_error_rate", r.bit_error_rate);
    put("mean_solver_iters", r.mean_solver_iters);
    if (r.replica_converged) row["replica_converged"] = *r.replica_converged;
    if (r.replica_ambiguous) row["replica_ambiguous"] = *r.replica_ambiguous;
    j["rows"].push_back(std::move(row));
  }
  return j.dump(2);
}

std::string to_json(const ReplicaTable& table, const ExperimentConfig& cfg) {
  json j;
  j["config"] = json::parse(config_echo_json(cfg));
  j["rows"] = json::array();
  for (const auto& r : table.rows) {
    j["rows"].push_back({{"sweep_var", r.sweep_var},
                         {"value", r.value},
                         {"c_star", r.c_star},
                         {"q_star", r.q_star},
                         {"gamma", r.gamma},
                         {"q_e", r.q_e},
                         {"converged", r.converged}});
  }
  return j.dump(2);
}

void write_file(const std::string& path, const std::string& content) {
  std::ofstream out(path, std::ios::binary);
  if (!out) throw std::runtime_error("cannot open output file: " + path);
  out << content;
  if (!out) throw std::runtime_error("write failed: " + path);
}

CompareSummary compare_summary(const ResultTable& table) {
  CompareSummary s;
  for (const auto& r : table.rows) {
    if (r.mse_sim && r.mse_replica && *r.mse_replica != 0.0) {
      const double dev = std::abs(*r.mse_sim - *r.mse_replica) / *r.mse_replica;
      s.max_rel_mse_deviation = std::max(s.max_rel_mse_deviation, dev);
    }
    if (r.err_sim && r.err_replica && r.err_se) {
      const double diff = std::abs(*r.err_sim - *r.err_replica);
      const double dev = *r.err_se > 0.0
                             ? diff / *r.err_se
                             : (diff == 0.0 ? 0.0 : std::numeric_limits<double>::infinity());
      s.max_err_deviation_se = std::max(s.max_err_deviation_se, dev);
    }
  }
  return s;
}

}  // namespace masm::harness
