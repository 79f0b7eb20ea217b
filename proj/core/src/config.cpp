#include "masm/config.hpp"

#include <nlohmann/json.hpp>

#include <cmath>
#include <fstream>
#include <set>
#include <sstream>
#include <stdexcept>

namespace masm::harness {

using nlohmann::json;

namespace {

void require_keys(const json& obj, const std::string& section,
                  const std::set<std::string>& known, std::vector<std::string>& errors) {
  for (const auto& [key, value] : obj.items()) {
    (void)value;
    if (!known.count(key))
      errors.push_back("unknown key '" + (section.empty() ? key : section + "." + key) + "'");
  }
}

double get_num(const json& obj, const char* key, double fallback) {
  return obj.contains(key) ? obj.at(key).get<double>() : fallback;
}

}  // namespace

ExperimentConfig parse_config_json(const std::string& text) {
  json root = json::parse(text);
  std::vector<std::string> errors;
  ExperimentConfig cfg;

  require_keys(root, "",
               {"system", "channel", "detector", "codebook", "replica", "sweep", "tune",
                "trials", "master_seed"},
               errors);

  if (!root.contains("system")) errors.push_back("missing section 'system'");
  if (root.contains("system")) {
    const json& s = root["system"];
    require_keys(s, "system", {"k", "m_u", "l_u", "n", "p", "symbol_bits", "snr_db", "sigma2"},
                 errors);
    cfg.system.k = static_cast<int>(get_num(s, "k", 0));
    cfg.system.m_u = static_cast<int>(get_num(s, "m_u", 0));
    cfg.system.l_u = static_cast<int>(get_num(s, "l_u", 0));
    cfg.system.n = static_cast<int>(get_num(s, "n", 0));
    cfg.system.p = get_num(s, "p", 1.0);
    cfg.system.symbol_bits = static_cast<int>(get_num(s, "symbol_bits", 0));
    cfg.system.has_snr_db = s.contains("snr_db");
    cfg.system.has_sigma2 = s.contains("sigma2");
    cfg.system.snr_db = get_num(s, "snr_db", 0.0);
    cfg.system.sigma2 = get_num(s, "sigma2", 0.0);
  }

  if (root.contains("channel")) {
    const json& c = root["channel"];
    require_keys(c, "channel", {"kind", "singular_values"}, errors);
    cfg.channel.kind = c.value("kind", std::string("iid-gaussian"));
    if (c.contains("singular_values")) {
      if (c["singular_values"].is_number()) {
        cfg.channel.has_constant_singular_value = true;
        cfg.channel.constant_singular_value = c["singular_values"].get<double>();
      } else {
        cfg.channel.singular_values = c["singular_values"].get<std::vector<double>>();
      }
    }
  }

  if (root.contains("detector")) {
    const json& d = root["detector"];
    require_keys(d, "detector",
                 {"lambda", "box_lo", "box_hi", "decision", "epsilon", "max_iters",
                  "rel_tolerance", "acceleration"},
                 errors);
    cfg.detector.lambda = get_num(d, "lambda", 0.0);
    cfg.detector.box_lo = get_num(d, "box_lo", 0.0);
    cfg.detector.box_hi = get_num(d, "box_hi", 1.0);
    cfg.detector.decision = d.value("decision", std::string("threshold-ssk"));
    cfg.detector.epsilon = get_num(d, "epsilon", 0.5);
    cfg.detector.max_iters = static_cast<int>(get_num(d, "max_iters", 2000));
    cfg.detector.rel_tolerance = get_num(d, "rel_tolerance", 1e-10);
    cfg.detector.acceleration = d.value("acceleration", true);
  }

  if (root.contains("codebook")) {
    const json& c = root["codebook"];
    require_keys(c, "codebook", {"subset_policy", "seed", "alphabet"}, errors);
    cfg.codebook.subset_policy = c.value("subset_policy", std::string("lexicographic"));
    cfg.codebook.seed = c.value("seed", std::uint64_t{0});
    if (c.contains("alphabet")) {
      if (c["alphabet"].is_string()) {
        if (c["alphabet"].get<std::string>() != "psk")
          errors.push_back("codebook.alphabet: expected \"psk\" or an array of [re, im] pairs");
      } else {
        cfg.codebook.has_explicit_alphabet = true;
        for (const auto& pair : c["alphabet"]) {
          if (!pair.is_array() || pair.size() != 2) {
            errors.push_back("codebook.alphabet: entries must be [re, im] pairs");
            break;
          }
          cfg.codebook.alphabet.emplace_back(pair[0].get<double>(), pair[1].get<double>());
        }
      }
    }
  }

  if (root.contains("replica")) {
    const json& r = root["replica"];
    require_keys(r, "replica",
                 {"enabled", "damping", "tol", "max_iters", "quadrature_order", "spectral"},
                 errors);
    cfg.replica.enabled = r.value("enabled", true);
    cfg.replica.damping = get_num(r, "damping", 0.5);
    cfg.replica.tol = get_num(r, "tol", 1e-10);
    cfg.replica.max_iters = static_cast<int>(get_num(r, "max_iters", 1000));
    cfg.replica.quadrature_order = static_cast<int>(get_num(r, "quadrature_order", 96));
    cfg.replica.spectral = r.value("spectral", std::string("marcenko-pastur"));
  }

  if (root.contains("sweep")) {
    const json& s = root["sweep"];
    require_keys(s, "sweep", {"variable", "grid"}, errors);
    cfg.sweep.variable = s.value("variable", std::string("lambda"));
    if (s.contains("grid")) cfg.sweep.grid = s["grid"].get<std::vector<double>>();
  }

  if (root.contains("tune")) {
    const json& t = root["tune"];
    require_keys(t, "tune", {"lambda_grid", "refine"}, errors);
    if (t.contains("lambda_grid"))
      cfg.tune.lambda_grid = t["lambda_grid"].get<std::vector<double>>();
    cfg.tune.refine = t.value("refine", true);
  }

  cfg.trials = root.value("trials", 0ll);
  cfg.master_seed = root.value("master_seed", std::uint64_t{0});

  if (!errors.empty()) {
    std::ostringstream msg;
    msg << "config parse errors:";
    for (const auto& e : errors) msg << "\n  - " << e;
    throw std::invalid_argument(msg.str());
  }
  return cfg;
}

ExperimentConfig load_config_file(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw std::runtime_error("cannot open config file: " + path);
  std::stringstream buffer;
  buffer << in.rdbuf();
  return parse_config_json(buffer.str());
}

DerivedQuantities derived_quantities(const ExperimentConfig& cfg) {
  DerivedQuantities d;
  d.m = cfg.system.k * cfg.system.m_u;
  d.eta = cfg.system.m_u > 0 ? static_cast<double>(cfg.system.l_u) / cfg.system.m_u : 0.0;
  d.xi = d.m > 0 ? static_cast<double>(cfg.system.n) / d.m : 0.0;
  d.alpha = cfg.system.n > 0 ? static_cast<double>(cfg.system.k) / cfg.system.n : 0.0;
  d.sigma2 = cfg.system.has_sigma2
                 ? cfg.system.sigma2
                 : channel::sigma2_from_snr_db(cfg.system.p, cfg.system.snr_db);
  return d;
}

std::vector<std::string> validate(const ExperimentConfig& cfg, RunMode mode) {
  std::vector<std::string> v;
  const auto& s = cfg.system;
  if (s.k < 1) v.push_back("system.k must be >= 1");
  if (s.m_u < 1 || s.m_u > 64) v.push_back("system.m_u must be in [1, 64]");
  if (s.l_u < 1 || s.l_u > s.m_u) v.push_back("system.l_u must be in [1, m_u]");
  if (s.n < 1) v.push_back("system.n must be >= 1");
  if (!(s.p > 0.0)) v.push_back("system.p must be positive");
  if (s.symbol_bits < 0 || s.symbol_bits > 16) v.push_back("system.symbol_bits must be in [0, 16]");
  if (s.has_snr_db == s.has_sigma2)
    v.push_back("system: exactly one of snr_db / sigma2 must be given");
  if (s.has_sigma2 && s.sigma2 < 0.0) v.push_back("system.sigma2 must be >= 0");

  if (cfg.channel.kind != "iid-gaussian" && cfg.channel.kind != "iid-pm1" &&
      cfg.channel.kind != "bi-unitary")
    v.push_back("channel.kind must be iid-gaussian | iid-pm1 | bi-unitary");
  if (cfg.channel.kind == "bi-unitary") {
    const int want = std::min(s.n, s.k * s.m_u);
    if (!cfg.channel.has_constant_singular_value &&
        static_cast<int>(cfg.channel.singular_values.size()) != want)
      v.push_back("channel.singular_values must list min(N, M) values or be a single number");
  }

  const auto& d = cfg.detector;
  if (d.lambda < 0.0) v.push_back("detector.lambda must be >= 0");
  if (!(d.box_lo <= 0.0 && 0.0 <= d.box_hi)) v.push_back("detector box must contain 0");
  if (d.box_hi < std::sqrt(s.p)) v.push_back("detector.box_hi must be >= sqrt(P)");
  if (d.decision != "threshold-ssk" && d.decision != "nearest-symbol" && d.decision != "identity")
    v.push_back("detector.decision must be threshold-ssk | nearest-symbol | identity");
  if (d.max_iters < 1) v.push_back("detector.max_iters must be >= 1");
  if (!(d.rel_tolerance >= 0.0)) v.push_back("detector.rel_tolerance must be >= 0");

  if (cfg.codebook.subset_policy != "lexicographic" &&
      cfg.codebook.subset_policy != "seeded-random")
    v.push_back("codebook.subset_policy must be lexicographic | seeded-random");
  if (cfg.codebook.has_explicit_alphabet) {
    const std::size_t want = std::size_t{1} << s.symbol_bits;
    if (cfg.codebook.alphabet.size() != want)
      v.push_back("codebook.alphabet must have 2^symbol_bits entries");
    for (const auto& a : cfg.codebook.alphabet)
      if (a == std::complex<double>{0.0, 0.0}) v.push_back("codebook.alphabet must not contain 0");
  }

  const auto& r = cfg.replica;
  if (!(r.damping > 0.0 && r.damping <= 1.0)) v.push_back("replica.damping must be in (0, 1]");
  if (!(r.tol > 0.0)) v.push_back("replica.tol must be positive");
  if (r.max_iters < 1) v.push_back("replica.max_iters must be >= 1");
  if (r.quadrature_order < 4) v.push_back("replica.quadrature_order must be >= 4");
  if (r.spectral != "marcenko-pastur")
    v.push_back("replica.spectral: only marcenko-pastur is available from config");

  if (cfg.sweep.variable != "lambda" && cfg.sweep.variable != "snr_db")
    v.push_back("sweep.variable must be lambda | snr_db");
  if (cfg.sweep.grid.empty()) v.push_back("sweep.grid must be nonempty");
  if (cfg.sweep.variable == "lambda")
    for (double g : cfg.sweep.grid)
      if (g < 0.0) {
        v.push_back("sweep.grid: lambda values must be >= 0");
        break;
      }

  if ((mode == RunMode::Simulate) && cfg.trials < 1)
    v.push_back("trials must be >= 1 for simulation");
  if (mode == RunMode::Tune) {
    if (cfg.sweep.variable != "snr_db") v.push_back("tune requires sweep.variable = snr_db");
    if (cfg.tune.lambda_grid.empty()) v.push_back("tune.lambda_grid must be nonempty");
    for (double g : cfg.tune.lambda_grid)
      if (g < 0.0) {
        v.push_back("tune.lambda_grid values must be >= 0");
        break;
      }
  }
  return v;
}

std::vector<std::complex<double>> make_alphabet(const ExperimentConfig& cfg) {
  if (cfg.codebook.has_explicit_alphabet) return cfg.codebook.alphabet;
  const std::size_t size = std::size_t{1} << cfg.system.symbol_bits;
  const double amp = std::sqrt(cfg.system.p);
  std::vector<std::complex<double>> alphabet;
  alphabet.reserve(size);
  for (std::size_t i = 0; i < size; ++i) {
    const double phase = 2.0 * M_PI * static_cast<double>(i) / static_cast<double>(size);
    // exact SSK singleton for S = 0
    alphabet.push_back(size == 1 ? std::complex<double>(amp, 0.0)
                                 : std::polar(amp, phase));
  }
  return alphabet;
}

sm::SmCodebook make_codebook(const ExperimentConfig& cfg) {
  const auto policy = cfg.codebook.subset_policy == "seeded-random"
                          ? sm::SubsetPolicy::seeded_random(cfg.codebook.seed)
                          : sm::SubsetPolicy::lexicographic();
  return sm::build_codebook(cfg.system.m_u, cfg.system.l_u, make_alphabet(cfg), policy);
}

channel::ChannelEnsemble make_ensemble(const ExperimentConfig& cfg) {
  const int m = cfg.system.k * cfg.system.m_u;
  if (cfg.channel.kind == "iid-pm1") return channel::ChannelEnsemble::iid_pm1(cfg.system.n, m);
  if (cfg.channel.kind == "bi-unitary") {
    std::vector<double> sv = cfg.channel.singular_values;
    if (cfg.channel.has_constant_singular_value)
      sv.assign(std::min(cfg.system.n, m), cfg.channel.constant_singular_value);
    return channel::ChannelEnsemble::bi_unitary(cfg.system.n, m, std::move(sv));
  }
  return channel::ChannelEnsemble::iid_gaussian(cfg.system.n, m);
}

detect::DetectorSpec make_detector_spec(const ExperimentConfig& cfg, double lambda) {
  detect::DetectorSpec spec;
  spec.reg = detect::Regularizer::l1(lambda);
  spec.feasible = detect::FeasibleSet::box(cfg.detector.box_lo, cfg.detector.box_hi);
  if (cfg.detector.decision == "threshold-ssk")
    spec.decision = detect::Decision::threshold_ssk(cfg.detector.epsilon, cfg.system.p);
  else if (cfg.detector.decision == "nearest-symbol")
    spec.decision = detect::Decision::nearest_symbol(make_alphabet(cfg));
  else
    spec.decision = detect::Decision::identity();
  spec.solver.max_iters = cfg.detector.max_iters;
  spec.solver.rel_tolerance = cfg.detector.rel_tolerance;
  spec.solver.acceleration = cfg.detector.acceleration;
  return spec;
}

replica::DecoupledConfig make_decoupled_config(const ExperimentConfig& cfg, double lambda,
                                               double sigma2) {
  replica::DecoupledConfig dc;
  dc.eta = static_cast<double>(cfg.system.l_u) / cfg.system.m_u;
  dc.p = cfg.system.p;
  dc.sigma2 = sigma2;
  dc.spectral = spectral::SpectralModel::marcenko_pastur(derived_quantities(cfg).xi);
  dc.reg = detect::Regularizer::l1(lambda);
  dc.feasible = detect::FeasibleSet::box(cfg.detector.box_lo, cfg.detector.box_hi);
  const detect::DetectorSpec spec = make_detector_spec(cfg, lambda);
  dc.decision = spec.decision;
  dc.alphabet = make_alphabet(cfg);
  dc.quadrature_order = cfg.replica.quadrature_order;
  return dc;
}

std::string config_echo_json(const ExperimentConfig& cfg) {
  const DerivedQuantities d = derived_quantities(cfg);
  json j;
  j["system"] = {{"k", cfg.system.k},       {"m_u", cfg.system.m_u},
                 {"l_u", cfg.system.l_u},   {"n", cfg.system.n},
                 {"p", cfg.system.p},       {"symbol_bits", cfg.system.symbol_bits}};
  if (cfg.system.has_snr_db) j["system"]["snr_db"] = cfg.system.snr_db;
  if (cfg.system.has_sigma2) j["system"]["sigma2"] = cfg.system.sigma2;
  j["channel"]["kind"] = cfg.channel.kind;
  if (cfg.channel.has_constant_singular_value)
    j["channel"]["singular_values"] = cfg.channel.constant_singular_value;
  else if (!cfg.channel.singular_values.empty())
    j["channel"]["singular_values"] = cfg.channel.singular_values;
  j["detector"] = {{"lambda", cfg.detector.lambda},
                   {"box_lo", cfg.detector.box_lo},
                   {"box_hi", cfg.detector.box_hi},
                   {"decision", cfg.detector.decision},
                   {"epsilon", cfg.detector.epsilon},
                   {"max_iters", cfg.detector.max_iters},
                   {"rel_tolerance", cfg.detector.rel_tolerance},
                   {"acceleration", cfg.detector.acceleration}};
  json alphabet = json::array();
  for (const auto& a : make_alphabet(cfg)) alphabet.push_back({a.real(), a.imag()});
  j["codebook"] = {{"subset_policy", cfg.codebook.subset_policy},
                   {"seed", cfg.codebook.seed},
                   {"alphabet", alphabet}};
  j["replica"] = {{"enabled", cfg.replica.enabled},
                  {"damping", cfg.replica.damping},
                  {"tol", cfg.replica.tol},
                  {"max_iters", cfg.replica.max_iters},
                  {"quadrature_order", cfg.replica.quadrature_order},
                  {"spectral", cfg.replica.spectral}};
  j["sweep"] = {{"variable", cfg.sweep.variable}, {"grid", cfg.sweep.grid}};
  if (!cfg.tune.lambda_grid.empty())
    j["tune"] = {{"lambda_grid", cfg.tune.lambda_grid}, {"refine", cfg.tune.refine}};
  j["trials"] = cfg.trials;
  j["master_seed"] = cfg.master_seed;
  j["derived"] = {{"m", d.m}, {"eta", d.eta}, {"xi", d.xi}, {"alpha", d.alpha},
                  {"sigma2", d.sigma2}};
  return j.dump(2);
}

}  // namespace masm::harness
