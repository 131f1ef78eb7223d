#include <benchmark/benchmark.h>

#include <random>
#include <vector>

#include "crossflow/datagen.hpp"
#include "crossflow/exchsim.hpp"
#include "crossflow/features.hpp"
#include "crossflow/marketdata.hpp"
#include "crossflow/models.hpp"
#include "crossflow/transform.hpp"

using namespace crossflow;

namespace {

std::vector<SimEvent> bench_events(std::size_t n) {
  std::mt19937_64 rng(1);
  std::uniform_real_distribution<double> unit(0.0, 1.0);
  std::uniform_int_distribution<int> step(-10, 10);
  std::uniform_real_distribution<double> size(10.0, 1000.0);
  std::vector<SimEvent> events;
  std::int64_t next_id = 1;
  for (std::size_t k = 0; k < n; ++k) {
    SimEvent e;
    e.seq = static_cast<std::int64_t>(k + 1);
    e.ts_ms = static_cast<std::int64_t>(k);
    const double roll = unit(rng);
    if (roll < 0.7) {
      e.kind = EventKind::SubmitLimit;
      e.side = unit(rng) < 0.5 ? Side::Buy : Side::Sell;
      e.price = 100.0 + 0.5 * step(rng);
      e.size_usd = size(rng);
      e.order_id = next_id++;
    } else if (roll < 0.85) {
      e.kind = EventKind::Cancel;
      e.order_id = 1 + static_cast<std::int64_t>(unit(rng) *
                                                 static_cast<double>(next_id));
    } else {
      e.kind = EventKind::SubmitMarket;
      e.side = unit(rng) < 0.5 ? Side::Buy : Side::Sell;
      e.size_usd = size(rng);
    }
    events.push_back(e);
  }
  return events;
}

DenseData bench_data(std::size_t n, std::size_t p) {
  std::mt19937_64 rng(2);
  std::normal_distribution<double> dist(0.0, 1.0);
  DenseData d;
  d.X.resize(p);
  for (std::size_t c = 0; c < p; ++c) {
    d.feature_names.push_back("f" + std::to_string(c));
    for (std::size_t r = 0; r < n; ++r) d.X[c].push_back(dist(rng));
  }
  for (std::size_t r = 0; r < n; ++r) {
    d.y.push_back(d.X[0][r] - 0.5 * d.X[1][r] + dist(rng));
    d.ts.push_back(static_cast<std::int64_t>(r));
  }
  return d;
}

void BM_matching_engine(benchmark::State& state) {
  const auto events =
      bench_events(static_cast<std::size_t>(state.range(0)));
  for (auto _ : state) {
    BookL3 book;
    std::size_t fills = 0;
    for (const auto& e : events) fills += book.apply_event(e).size();
    benchmark::DoNotOptimize(fills);
  }
  state.SetItemsProcessed(state.iterations() * state.range(0));
}
BENCHMARK(BM_matching_engine)->Arg(1000)->Arg(10000)->Arg(100000);

void BM_lasso_fit(benchmark::State& state) {
  const DenseData d = bench_data(static_cast<std::size_t>(state.range(0)), 20);
  for (auto _ : state) {
    const FitResult fit = fit_lasso(d, 0.01);
    benchmark::DoNotOptimize(fit.model.intercept);
  }
}
BENCHMARK(BM_lasso_fit)->Arg(1000)->Arg(10000);

void BM_ols_fit(benchmark::State& state) {
  const DenseData d = bench_data(static_cast<std::size_t>(state.range(0)), 20);
  for (auto _ : state) {
    const FitResult fit = fit_ols(d);
    benchmark::DoNotOptimize(fit.model.intercept);
  }
}
BENCHMARK(BM_ols_fit)->Arg(1000)->Arg(10000);

void BM_apply_step(benchmark::State& state) {
  std::vector<double> thresholds;
  for (int t = 1; t <= 100; ++t) thresholds.push_back(0.5 * t);
  std::mt19937_64 rng(3);
  std::normal_distribution<double> dist(0.0, 20.0);
  std::vector<double> xs;
  for (int k = 0; k < 10000; ++k) xs.push_back(dist(rng));
  for (auto _ : state) {
    double acc = 0.0;
    for (const double x : xs) acc += apply_step(thresholds, x);
    benchmark::DoNotOptimize(acc);
  }
  state.SetItemsProcessed(state.iterations() *
                          static_cast<std::int64_t>(xs.size()));
}
BENCHMARK(BM_apply_step);

void BM_feature_matrix(benchmark::State& state) {
  GenConfig cfg;
  cfg.seed = 4;
  cfg.n_markets = 2;
  cfg.lag_ms = {0, 200};
  cfg.duration_ms = state.range(0);
  const GenOutput out = gen_panel(cfg);
  const SampledPanel panel = build_panel(out.books, out.trades, 50);
  FeatureConfig fcfg;
  fcfg.div_horizons_ms = {5000, 19000};
  for (auto _ : state) {
    const FeatureMatrix m = build_feature_matrix(panel, fcfg);
    benchmark::DoNotOptimize(m.columns.size());
  }
}
BENCHMARK(BM_feature_matrix)->Arg(60000)->Arg(600000)
    ->Unit(benchmark::kMillisecond);

}  // namespace

BENCHMARK_MAIN();
