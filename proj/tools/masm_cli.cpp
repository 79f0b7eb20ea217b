// Experiment driver for MA-SM detection: Monte Carlo link simulation,
// replica fixed-point prediction, lambda tuning, and side-by-side comparison.

#include <CLI11.hpp>

#include <cstdint>
#include <iostream>
#include <string>

#include "masm/harness.hpp"

namespace {

struct CommonOptions {
  std::string config_path;
  std::string out_path;
  std::string format = "csv";
  int workers = 0;
  bool seed_set = false;
  std::uint64_t seed = 0;
  bool trials_set = false;
  long long trials = 0;
};

void add_common(CLI::App* cmd, CommonOptions& opt, bool with_sim_flags) {
  cmd->add_option("--config", opt.config_path, "experiment config (JSON)")->required();
  cmd->add_option("--out", opt.out_path, "output file path (stdout if omitted)");
  cmd->add_option("--format", opt.format, "csv | json")
      ->check(CLI::IsMember({"csv", "json"}));
  if (with_sim_flags) {
    cmd->add_option("--seed", opt.seed, "override master_seed")
        ->each([&opt](const std::string&) { opt.seed_set = true; });
    cmd->add_option("--trials", opt.trials, "override trial count")
        ->each([&opt](const std::string&) { opt.trials_set = true; });
    cmd->add_option("--workers", opt.workers, "worker threads (0 = hardware)");
  }
}

masm::harness::ExperimentConfig load(const CommonOptions& opt) {
  masm::harness::ExperimentConfig cfg = masm::harness::load_config_file(opt.config_path);
  if (opt.seed_set) cfg.master_seed = opt.seed;
  if (opt.trials_set) cfg.trials = opt.trials;
  return cfg;
}

void emit(const std::string& text, const CommonOptions& opt) {
  if (opt.out_path.empty())
    std::cout << text;
  else
    masm::harness::write_file(opt.out_path, text);
}

int run_validate(const CommonOptions& opt) {
  const auto cfg = load(opt);
  const auto violations = masm::harness::validate(cfg, masm::harness::RunMode::General);
  if (!violations.empty()) {
    std::cerr << "config invalid:\n";
    for (const auto& v : violations) std::cerr << "  - " << v << "\n";
    return 1;
  }
  std::cout << masm::harness::config_echo_json(cfg) << "\n";
  return 0;
}

int run_simulate(const CommonOptions& opt, bool with_replica) {
  auto cfg = load(opt);
  cfg.replica.enabled = with_replica;
  const auto table = masm::harness::run_sweep(cfg, opt.workers);
  emit(opt.format == "json" ? masm::harness::to_json(table, cfg)
                            : masm::harness::to_csv(table),
       opt);
  if (with_replica) {
    const auto summary = masm::harness::compare_summary(table);
    std::cerr << "max relative MSE deviation: " << summary.max_rel_mse_deviation << "\n"
              << "max error-rate deviation:   " << summary.max_err_deviation_se
              << " standard errors\n";
  }
  return 0;
}

int run_replica(const CommonOptions& opt) {
  const auto cfg = load(opt);
  const auto table = masm::harness::run_replica_sweep(cfg);
  emit(opt.format == "json" ? masm::harness::to_json(table, cfg)
                            : masm::harness::to_csv(table),
       opt);
  return 0;
}

int run_tune(const CommonOptions& opt) {
  const auto cfg = load(opt);
  const auto table = masm::harness::run_tune(cfg);
  emit(opt.format == "json" ? masm::harness::to_json(table, cfg)
                            : masm::harness::to_csv(table),
       opt);
  return 0;
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"MA-SM MIMO detection: simulation and replica analysis"};
  app.require_subcommand(1);

  CommonOptions sim_opt, rep_opt, tune_opt, cmp_opt, val_opt;
  CLI::App* simulate = app.add_subcommand("simulate", "Monte Carlo detection sweep");
  add_common(simulate, sim_opt, true);
  CLI::App* replica = app.add_subcommand("replica", "replica fixed-point sweep only");
  add_common(replica, rep_opt, false);
  CLI::App* tune = app.add_subcommand("tune", "tune lambda over an SNR grid");
  add_common(tune, tune_opt, false);
  CLI::App* compare =
      app.add_subcommand("compare", "simulation and replica prediction side by side");
  add_common(compare, cmp_opt, true);
  CLI::App* validate = app.add_subcommand("validate-config", "check config, echo derived values");
  add_common(validate, val_opt, false);

  try {
    app.parse(argc, argv);
  } catch (const CLI::CallForHelp& e) {
    return app.exit(e);
  } catch (const CLI::ParseError& e) {
    app.exit(e);
    return 1;
  }

  try {
    if (simulate->parsed()) return run_simulate(sim_opt, false);
    if (replica->parsed()) return run_replica(rep_opt);
    if (tune->parsed()) return run_tune(tune_opt);
    if (compare->parsed()) return run_simulate(cmp_opt, true);
    if (validate->parsed()) return run_validate(val_opt);
  } catch (const std::invalid_argument& e) {
    std::cerr << e.what() << "\n";
    return 1;
  } catch (const std::exception& e) {
    std::cerr << "error: " << e.what() << "\n";
    return 2;
  }
  return 1;
}
