#pragma once

#include <complex>
#include <cstdint>
#include <string>
#include <vector>

#include "masm/channel.hpp"
#include "masm/detector.hpp"
#include "masm/replica.hpp"
#include "masm/sm_codec.hpp"

namespace masm::harness {

struct SystemConfig {
  int k = 0;
  int m_u = 0;
  int l_u = 0;
  int n = 0;
  double p = 1.0;
  int symbol_bits = 0;
  bool has_snr_db = false;
  bool has_sigma2 = false;
  double snr_db = 0.0;
  double sigma2 = 0.0;
};

struct ChannelConfig {
  std::string kind = "iid-gaussian";  // iid-gaussian | iid-pm1 | bi-unitary
  std::vector<double> singular_values;
  bool has_constant_singular_value = false;
  double constant_singular_value = 1.0;
};

struct DetectorConfig {
  double lambda = 0.0;
  double box_lo = 0.0;
  double box_hi = 1.0;
  std::string decision = "threshold-ssk";  // threshold-ssk | nearest-symbol | identity
  double epsilon = 0.5;
  int max_iters = 2000;
  double rel_tolerance = 1e-10;
  bool acceleration = true;
};

struct CodebookConfig {
  std::string subset_policy = "lexicographic";  // lexicographic | seeded-random
  std::uint64_t seed = 0;
  bool has_explicit_alphabet = false;
  std::vector<std::complex<double>> alphabet;  // default: PSK of size 2^S scaled by sqrt(P)
};

struct ReplicaConfig {
  bool enabled = true;
  double damping = 0.5;
  double tol = 1e-10;
  int max_iters = 1000;
  int quadrature_order = 96;
  std::string spectral = "marcenko-pastur";
};

struct SweepConfig {
  std::string variable = "lambda";  // lambda | snr_db
  std::vector<double> grid;
};

struct TuneConfig {
  std::vector<double> lambda_grid;
  bool refine = true;
};

/// Full experiment description. M, eta, xi, alpha and sigma2 are always
/// recomputed from the primary quantities, never user-supplied.
struct ExperimentConfig {
  SystemConfig system;
  ChannelConfig channel;
  DetectorConfig detector;
  CodebookConfig codebook;
  ReplicaConfig replica;
  SweepConfig sweep;
  TuneConfig tune;
  long long trials = 0;
  std::uint64_t master_seed = 0;
};

struct DerivedQuantities {
  int m = 0;
  double eta = 0.0;
  double xi = 0.0;
  double alpha = 0.0;
  double sigma2 = 0.0;
};

enum class RunMode { General, Simulate, Replica, Tune };

/// Parses a strict JSON config; unknown keys are errors.
ExperimentConfig parse_config_json(const std::string& text);
ExperimentConfig load_config_file(const std::string& path);

/// All violations found, empty when the config is usable for the given mode.
std::vector<std::string> validate(const ExperimentConfig& cfg, RunMode mode);

DerivedQuantities derived_quantities(const ExperimentConfig& cfg);

/// JSON echo of the config plus the derived block, as embedded in outputs.
std::string config_echo_json(const ExperimentConfig& cfg);

std::vector<std::complex<double>> make_alphabet(const ExperimentConfig& cfg);
sm::SmCodebook make_codebook(const ExperimentConfig& cfg);
channel::ChannelEnsemble make_ensemble(const ExperimentConfig& cfg);
detect::DetectorSpec make_detector_spec(const ExperimentConfig& cfg, double lambda);
replica::DecoupledConfig make_decoupled_config(const ExperimentConfig& cfg, double lambda,
                                               double sigma2);

}  // namespace masm::harness
