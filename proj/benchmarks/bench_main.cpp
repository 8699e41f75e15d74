#include <benchmark/benchmark.h>

#include <random>

#include "lemmings/anchors.hpp"
#include "lemmings/linear_solver.hpp"
#include "lemmings/local_coding.hpp"
#include "lemmings/local_solver.hpp"
#include "lemmings/metrics.hpp"
#include "lemmings/musk.hpp"
#include "lemmings/scaler.hpp"

using namespace lemmings;

namespace {

const Dataset& musk1() {
  static const Dataset data = [] {
    const Dataset raw = load_musk(std::string(LEMMINGS_BENCH_DATA_DIR) + "/musk1.data");
    return apply_scaler(raw, fit_scaler(raw));
  }();
  return data;
}

void BM_LinearClassifier(benchmark::State& state) {
  const TrainConfig cfg{1e-3, static_cast<std::size_t>(state.range(0)), 1, 0};
  for (auto _ : state) benchmark::DoNotOptimize(train_linear_classifier(musk1(), cfg));
  state.SetItemsProcessed(state.iterations() * state.range(0));
}
BENCHMARK(BM_LinearClassifier)->Arg(1000)->Arg(10000);

void BM_LinearRanker(benchmark::State& state) {
  const TrainConfig cfg{1e-3, static_cast<std::size_t>(state.range(0)), 1, 0};
  for (auto _ : state) benchmark::DoNotOptimize(train_linear_ranker(musk1(), cfg));
  state.SetItemsProcessed(state.iterations() * state.range(0));
}
BENCHMARK(BM_LinearRanker)->Arg(1000)->Arg(10000);

void BM_SelectAnchors(benchmark::State& state) {
  const auto k = static_cast<std::size_t>(state.range(0));
  for (auto _ : state) benchmark::DoNotOptimize(select_anchors(musk1().bags(), k, AnchorMethod::kKMeans, 3));
}
BENCHMARK(BM_SelectAnchors)->Arg(10)->Arg(40);

void BM_CodeDataset(benchmark::State& state) {
  const AnchorSet anchors =
      select_anchors(musk1().bags(), static_cast<std::size_t>(state.range(0)), AnchorMethod::kRandom, 3);
  for (auto _ : state) benchmark::DoNotOptimize(CodedDataset(musk1(), anchors));
  state.SetItemsProcessed(state.iterations() * static_cast<std::int64_t>(musk1().instance_count()));
}
BENCHMARK(BM_CodeDataset)->Arg(10)->Arg(40);

void BM_LocalClassifier(benchmark::State& state) {
  const AnchorSet anchors = select_anchors(musk1().bags(), 20, AnchorMethod::kRandom, 3);
  const CodedDataset coded(musk1(), anchors);
  const TrainConfig cfg{0.1, static_cast<std::size_t>(state.range(0)), 1, 0};
  for (auto _ : state) benchmark::DoNotOptimize(train_local_classifier(coded, cfg));
  state.SetItemsProcessed(state.iterations() * state.range(0));
}
BENCHMARK(BM_LocalClassifier)->Arg(1000)->Arg(10000);

void BM_AucRoc(benchmark::State& state) {
  std::mt19937_64 rng(5);
  std::normal_distribution<double> noise;
  std::vector<ScoredBag> scored;
  for (std::int64_t i = 0; i < state.range(0); ++i) {
    const int y = i % 3 == 0 ? 1 : -1;
    scored.push_back({"b" + std::to_string(i), y, noise(rng) + 0.5 * y});
  }
  for (auto _ : state) {
    benchmark::DoNotOptimize(auc_roc(scored));
    benchmark::DoNotOptimize(auc_pr(scored));
  }
  state.SetItemsProcessed(state.iterations() * state.range(0));
}
BENCHMARK(BM_AucRoc)->Arg(100)->Arg(10000);

}  // namespace

BENCHMARK_MAIN();
