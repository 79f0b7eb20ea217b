#include <benchmark/benchmark.h>

#include "masm/channel.hpp"
#include "masm/detector.hpp"
#include "masm/replica.hpp"
#include "masm/rng.hpp"

using namespace masm;

namespace {

struct Problem {
  Eigen::MatrixXcd h;
  Eigen::VectorXcd y;
};

Problem paper_scale_problem() {
  RngStream rng(1);
  const auto ens = channel::ChannelEnsemble::iid_gaussian(80, 160);
  Problem p;
  p.h = channel::sample_channel(ens, rng);
  Eigen::VectorXd x = Eigen::VectorXd::Zero(160);
  for (int k = 0; k < 20; ++k) x(8 * k + static_cast<int>(rng.uniform_below(8))) = 1.0;
  p.y = p.h * x.cast<std::complex<double>>();
  for (int i = 0; i < 80; ++i) p.y(i) += rng.complex_normal(0.0398);
  return p;
}

replica::DecoupledConfig operating_point(double lambda) {
  replica::DecoupledConfig cfg;
  cfg.eta = 0.125;
  cfg.sigma2 = 0.0398107;
  cfg.spectral = spectral::SpectralModel::marcenko_pastur(0.5);
  cfg.reg = detect::Regularizer::l1(lambda);
  cfg.feasible = detect::FeasibleSet::box(0.0, 1.0);
  cfg.decision = detect::Decision::threshold_ssk(0.5, 1.0);
  return cfg;
}

void BM_SampleChannel(benchmark::State& state) {
  RngStream rng(2);
  const auto ens = channel::ChannelEnsemble::iid_gaussian(80, 160);
  for (auto _ : state) benchmark::DoNotOptimize(channel::sample_channel(ens, rng));
}
BENCHMARK(BM_SampleChannel);

void BM_SolveBoxLasso(benchmark::State& state) {
  const Problem p = paper_scale_problem();
  detect::SolverParams params;
  params.acceleration = state.range(0) != 0;
  for (auto _ : state) {
    const auto est = detect::solve_box_lasso(p.y, p.h, 0.13, 0.0, 1.0, params);
    benchmark::DoNotOptimize(est.objective);
  }
}
BENCHMARK(BM_SolveBoxLasso)->Arg(0)->Arg(1);

void BM_ReplicaFixedPoint(benchmark::State& state) {
  const auto cfg = operating_point(0.13);
  for (auto _ : state) {
    const auto sol = replica::solve_fixed_point(cfg);
    benchmark::DoNotOptimize(sol.gamma);
  }
}
BENCHMARK(BM_ReplicaFixedPoint);

void BM_Expectations(benchmark::State& state) {
  const auto cfg = operating_point(0.13);
  const auto st = replica::ReplicaState::make(0.4, 0.016, cfg);
  for (auto _ : state) {
    const auto ex = replica::expectations(st, cfg);
    benchmark::DoNotOptimize(ex.e_mse);
  }
}
BENCHMARK(BM_Expectations);

}  // namespace

BENCHMARK_MAIN();
