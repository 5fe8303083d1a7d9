#include <benchmark/benchmark.h>

#include "folio/metrics/metrics.hpp"
#include "folio/rng.hpp"
#include "folio/simplex/dirichlet.hpp"
#include "folio/simplex/projection.hpp"

using namespace folio;

namespace {

void BM_CappedProjection(benchmark::State& state) {
  const auto n = static_cast<std::size_t>(state.range(0));
  Rng rng(3);
  std::vector<double> w(n + 1);
  double total = 0.0;
  for (double& v : w) total += (v = uniform01(rng));
  for (double& v : w) v /= total;
  const std::vector<double> caps(n, 2.0 / static_cast<double>(n));
  for (auto _ : state) {
    auto out = simplex::project_capped_simplex(w, caps);
    benchmark::DoNotOptimize(out.data());
  }
}

void BM_DirichletSample(benchmark::State& state) {
  const auto n = static_cast<std::size_t>(state.range(0));
  const simplex::DirichletParams params(std::vector<double>(n + 1, 0.7));
  Rng rng(5);
  for (auto _ : state) {
    auto x = simplex::dirichlet_sample(params, rng);
    benchmark::DoNotOptimize(x.data());
  }
}

void BM_ComputeMetrics(benchmark::State& state) {
  const auto n = static_cast<std::size_t>(state.range(0));
  Rng rng(7);
  std::vector<double> r(n);
  for (double& v : r) v = 0.01 * standard_normal(rng);
  const auto series = metrics::ReturnSeries::from_returns(r);
  for (auto _ : state) {
    auto rep = metrics::compute_metrics(series);
    benchmark::DoNotOptimize(rep.sharpe);
  }
}

}  // namespace

BENCHMARK(BM_CappedProjection)->Arg(10)->Arg(100)->Arg(500);
BENCHMARK(BM_DirichletSample)->Arg(10)->Arg(500);
BENCHMARK(BM_ComputeMetrics)->Arg(1258)->Arg(6300);

BENCHMARK_MAIN();
