#pragma once

#include <optional>
#include <string>
#include <vector>

#include "masm/config.hpp"

namespace masm::harness {

/// Per-trial record, aggregated into result rows.
struct TrialResult {
  double squared_error_per_m = 0.0;  // ||x* - x||^2 / M
  int entry_errors = 0;
  int bit_errors = 0;
  int invalid_supports = 0;
  int solver_iters = 0;
  bool solver_converged = false;
  std::uint64_t seed = 0;
};

struct ResultRow {
  std::string sweep_var;
  double value = 0.0;
  std::optional<double> mse_sim, mse_se, err_sim, err_se;
  std::optional<double> mse_replica, err_replica;
  long long trials = 0;
  std::uint64_t seed = 0;
  std::optional<double> lambda_star;  // tune rows only

  // diagnostics, carried in JSON output only
  std::optional<double> invalid_support_rate;
  std::optional<double> bit_error_rate;
  std::optional<double> mean_solver_iters;
  std::optional<bool> replica_converged;
  std::optional<bool> replica_ambiguous;
};

struct ResultTable {
  std::vector<ResultRow> rows;
};

/// Replica-only detail rows (fixed-point internals per sweep value).
struct ReplicaRow {
  std::string sweep_var;
  double value = 0.0;
  double c_star = 0.0;
  double q_star = 0.0;
  double gamma = 0.0;
  double q_e = 0.0;
  bool converged = false;
};

struct ReplicaTable {
  std::vector<ReplicaRow> rows;
};

/// Monte Carlo sweep (plus replica columns when enabled). Fresh H, x, n per
/// trial; the stream of trial t at grid point g depends only on
/// (master_seed, g, t), so results are identical for any worker count.
/// Throws std::invalid_argument listing violations on a bad config.
ResultTable run_sweep(const ExperimentConfig& cfg, int workers = 0);

/// Fixed-point solutions over the sweep grid, no simulation.
ReplicaTable run_replica_sweep(const ExperimentConfig& cfg);

/// Per-SNR lambda tuning (sweep.variable must be snr_db).
ResultTable run_tune(const ExperimentConfig& cfg);

/// CSV with the fixed column set
///   sweep_var,value,mse_sim,mse_se,err_sim,err_se,mse_replica,err_replica,trials,seed
/// (plus a trailing lambda_star column for tune tables). Floats at 17
/// significant digits, missing values empty; no timestamps anywhere.
std::string to_csv(const ResultTable& table);
std::string to_csv(const ReplicaTable& table);

/// JSON mirror with a config echo block and per-row diagnostics.
std::string to_json(const ResultTable& table, const ExperimentConfig& cfg);
std::string to_json(const ReplicaTable& table, const ExperimentConfig& cfg);

void write_file(const std::string& path, const std::string& content);

struct CompareSummary {
  double max_rel_mse_deviation = 0.0;
  double max_err_deviation_se = 0.0;  // |err_sim - err_replica| in sim standard errors
};

/// Deviation summary over rows that carry both simulated and replica columns.
CompareSummary compare_summary(const ResultTable& table);

}  // namespace masm::harness
