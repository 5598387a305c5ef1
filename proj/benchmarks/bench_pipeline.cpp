#include <benchmark/benchmark.h>

#include "beamlearn/allocation.hpp"
#include "beamlearn/learning.hpp"

using namespace beamlearn;

namespace {

SystemConfig bench_config(int n_beams, int n_users) {
  SystemConfig c;
  c.n_beams = n_beams;
  c.n_users = n_users;
  c.snr_db = 20.0;
  return c;
}

}  // namespace

static void BM_ChannelGainMatrix(benchmark::State& state) {
  const auto c = bench_config(static_cast<int>(state.range(0)), 3);
  const auto layout = sample_layout(c, 1);
  for (auto _ : state) benchmark::DoNotOptimize(channel_gain_matrix(layout, c));
}
BENCHMARK(BM_ChannelGainMatrix)->Arg(8)->Arg(16)->Arg(64);

static void BM_ExhaustiveOracle(benchmark::State& state) {
  const auto c = bench_config(static_cast<int>(state.range(0)), static_cast<int>(state.range(1)));
  const auto gains = channel_gain_matrix(sample_layout(c, 1), c);
  for (auto _ : state) benchmark::DoNotOptimize(exhaustive_oracle(gains, c));
}
BENCHMARK(BM_ExhaustiveOracle)->Args({6, 2})->Args({8, 3})->Args({8, 4})->Args({12, 4});

static void BM_GreedyBaseline(benchmark::State& state) {
  const auto c = bench_config(static_cast<int>(state.range(0)), static_cast<int>(state.range(1)));
  const auto gains = channel_gain_matrix(sample_layout(c, 1), c);
  for (auto _ : state) benchmark::DoNotOptimize(greedy_baseline(gains, c));
}
BENCHMARK(BM_GreedyBaseline)->Args({8, 3})->Args({16, 8});

// Linear-scan query cost grows with the training set; this is the price of
// the instance-based model.
static void BM_KnnPredict(benchmark::State& state) {
  const auto c = bench_config(8, 3);
  const KnnModel model(label_dataset(c, static_cast<std::uint64_t>(state.range(0)), 1),
                       static_cast<int>(state.range(1)));
  const auto query = extract_features(sample_layout(c, 1'000'000));
  for (auto _ : state) benchmark::DoNotOptimize(knn_predict(model, query));
  state.SetComplexityN(state.range(0));
}
BENCHMARK(BM_KnnPredict)
    ->Args({1000, 1})
    ->Args({10000, 1})
    ->Args({100000, 1})
    ->Args({10000, 5})
    ->Unit(benchmark::kMicrosecond);

static void BM_LabelDataset(benchmark::State& state) {
  const auto c = bench_config(8, 3);
  for (auto _ : state)
    benchmark::DoNotOptimize(label_dataset(c, static_cast<std::uint64_t>(state.range(0)), 1));
  state.SetItemsProcessed(state.iterations() * state.range(0));
}
BENCHMARK(BM_LabelDataset)->Arg(1000)->Unit(benchmark::kMillisecond);

BENCHMARK_MAIN();
