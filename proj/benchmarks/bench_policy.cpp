#include <benchmark/benchmark.h>

#include "folio/ad/dirichlet_ops.hpp"
#include "folio/ad/ops.hpp"
#include "folio/data/panel.hpp"
#include "folio/policy/policy_net.hpp"
#include "folio/rng.hpp"

using namespace folio;

namespace {

data::PanelTensor bench_panel(std::size_t T, std::size_t N, std::size_t F) {
  data::PanelTensor p;
  const auto base = data::Date::from_ymd(2000, 1, 3);
  for (std::size_t t = 0; t < T; ++t) {
    p.dates.emplace_back(base.sys_days() + std::chrono::days(static_cast<int>(t)));
  }
  for (std::size_t i = 0; i < N; ++i) p.tickers.push_back("A" + std::to_string(i));
  for (std::size_t f = 0; f < F; ++f) p.features.push_back("f" + std::to_string(f));
  Rng rng(1);
  p.z.resize(T * N * F);
  for (double& v : p.z) v = standard_normal(rng);
  p.mask.assign(T * N, 1);
  p.raw_close.assign(T * N, 100.0);
  p.simple_returns.assign(T * N, 0.0);
  return p;
}

policy::PolicyConfig config_for(const benchmark::State& state) {
  policy::PolicyConfig c;
  c.width = static_cast<std::size_t>(state.range(2));
  c.encoder = state.range(3) ? policy::TemporalEncoder::kTransformer : policy::TemporalEncoder::kLstm;
  return c;
}

// args: assets, window, width, encoder (0 lstm, 1 transformer)
void BM_PolicyForward(benchmark::State& state) {
  const auto N = static_cast<std::size_t>(state.range(0));
  const auto W = static_cast<std::size_t>(state.range(1));
  const auto panel = bench_panel(W, N, 8);
  const policy::PolicyNet net(config_for(state), 8, 1);
  const auto window = data::window_view(panel, W - 1, W);
  for (auto _ : state) {
    ad::NoGradGuard guard;
    auto out = net.forward(window, panel.mask_row(W - 1));
    benchmark::DoNotOptimize(out.alpha.data().data());
  }
  state.SetItemsProcessed(state.iterations() * static_cast<std::int64_t>(N));
}

void BM_PolicyForwardBackward(benchmark::State& state) {
  const auto N = static_cast<std::size_t>(state.range(0));
  const auto W = static_cast<std::size_t>(state.range(1));
  const auto panel = bench_panel(W, N, 8);
  policy::PolicyNet net(config_for(state), 8, 1);
  const auto window = data::window_view(panel, W - 1, W);
  const std::vector<double> x(N + 1, 1.0 / static_cast<double>(N + 1));
  for (auto _ : state) {
    net.params().zero_grad();
    const auto out = net.forward(window, panel.mask_row(W - 1));
    ad::backward(ad::add(ad::dirichlet_log_prob(out.alpha, x), out.value));
  }
  state.SetItemsProcessed(state.iterations() * static_cast<std::int64_t>(N));
}

}  // namespace

BENCHMARK(BM_PolicyForward)
    ->Args({10, 10, 16, 0})
    ->Args({50, 30, 64, 0})
    ->Args({50, 30, 64, 1})
    ->Unit(benchmark::kMicrosecond);
BENCHMARK(BM_PolicyForwardBackward)
    ->Args({10, 10, 16, 0})
    ->Args({50, 30, 64, 0})
    ->Args({50, 30, 64, 1})
    ->Unit(benchmark::kMicrosecond);
