#include <benchmark/benchmark.h>

#include "riskopt/program.hpp"
#include "riskopt/risk.hpp"
#include "riskopt/rsa.hpp"
#include "riskopt/saa.hpp"
#include "riskopt/samplers.hpp"

using namespace riskopt;

namespace {

std::vector<double> truncnorm_draws(std::size_t n) {
  RngStream s(1, 0);
  return truncnorm_sample(TruncNormalSpec(10.0, 49.0, 0.0, 30.0), s, n);
}

ScenarioMatrix portfolio_sample(std::size_t dim, std::size_t n) {
  RngStream s(2, 0);
  const auto psi = uniform_probabilities(s, dim, 0.8);
  return bernoulli_vector_sample(BernoulliVectorSpec(psi), s, n);
}

void BM_Avar(benchmark::State& state) {
  const EmpiricalDistribution d(truncnorm_draws(static_cast<std::size_t>(state.range(0))));
  for (auto _ : state) benchmark::DoNotOptimize(avar(d, 0.9));
  state.SetComplexityN(state.range(0));
}
BENCHMARK(BM_Avar)->RangeMultiplier(10)->Range(100, 1000000)->Complexity();

void BM_RiskPlugin(benchmark::State& state) {
  const auto v = truncnorm_draws(static_cast<std::size_t>(state.range(0)));
  const RiskSpec spec = RiskSpec::mean_avar(0.1, 0.9, 0.9);
  for (auto _ : state) benchmark::DoNotOptimize(risk_plugin(EmpiricalDistribution(v), spec));
}
BENCHMARK(BM_RiskPlugin)->RangeMultiplier(10)->Range(100, 1000000);

void BM_TruncNormalSample(benchmark::State& state) {
  const TruncNormalSpec d(10.0, 49.0, 0.0, 30.0);
  RngStream s(3, 0);
  for (auto _ : state) benchmark::DoNotOptimize(truncnorm_sample(d, s, 10000));
  state.SetItemsProcessed(state.iterations() * 10000);
}
BENCHMARK(BM_TruncNormalSample);

void BM_SolveSaaPortfolio(benchmark::State& state) {
  const std::size_t dim = static_cast<std::size_t>(state.range(0));
  const ScenarioMatrix sample = portfolio_sample(dim, static_cast<std::size_t>(state.range(1)));
  const PortfolioProgram program(dim, 2.0, 0.0);
  const RiskSpec spec = RiskSpec::mean_avar(0.9, 0.1, 0.9);
  for (auto _ : state) benchmark::DoNotOptimize(solve_saa(program, spec, sample).value);
}
BENCHMARK(BM_SolveSaaPortfolio)
    ->Args({100, 1000})
    ->Args({100, 10000})
    ->Args({500, 1000})
    ->Unit(benchmark::kMillisecond);

void BM_RunRsaPortfolio(benchmark::State& state) {
  const std::size_t dim = static_cast<std::size_t>(state.range(0));
  const ScenarioMatrix sample = portfolio_sample(dim, static_cast<std::size_t>(state.range(1)));
  const PortfolioProgram program(dim, 2.0, 0.0);
  const RiskSpec spec = RiskSpec::mean_avar(0.9, 0.1, 0.9);
  const RsaConstants c = portfolio_constants(spec, dim, 2.0);
  RsaOptions opt;
  opt.spec = spec;
  for (auto _ : state) benchmark::DoNotOptimize(run_rsa(program, c, sample, opt).g_bar);
}
BENCHMARK(BM_RunRsaPortfolio)->Args({100, 10000})->Args({500, 10000})->Unit(benchmark::kMillisecond);

void BM_RunRsaScalar(benchmark::State& state) {
  const RiskSpec spec = RiskSpec::mean_avar(0.1, 0.9, 0.9);
  const TauReformulation program(spec, 0.0, 30.0);
  const RsaConstants c = scalar_case_constants(spec, 0.0, 30.0, 0.0, program.diameter());
  const ScenarioMatrix sample =
      ScenarioMatrix::column(truncnorm_draws(static_cast<std::size_t>(state.range(0))));
  for (auto _ : state) benchmark::DoNotOptimize(run_rsa(program, c, sample).g_bar);
}
BENCHMARK(BM_RunRsaScalar)->Arg(10000)->Arg(100000);

}  // namespace
BENCHMARK_MAIN();
