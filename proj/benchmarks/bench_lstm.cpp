#include <benchmark/benchmark.h>

#include "fishmig/lstm.hpp"
#include "fishmig/synthetic.hpp"

using namespace fishmig;

namespace {

std::vector<tdf::TrainingPair> annual_pairs() {
    const auto series = synthetic::annual_series(150, synthetic::SeriesShape{}, 1);
    return tdf::make_dataset(series, tdf::TdfConfig::annual());
}

void BM_Forward(benchmark::State& state) {
    Rng rng(1);
    const auto model = lstm::Model::random(static_cast<int>(state.range(0)), 0.1, rng);
    const auto pairs = annual_pairs();
    for (auto _ : state) benchmark::DoNotOptimize(lstm::forward(model, pairs.front().features));
}
BENCHMARK(BM_Forward)->Arg(4)->Arg(16)->Arg(64);

void BM_BpttFullBatch(benchmark::State& state) {
    Rng rng(1);
    const auto model = lstm::Model::random(static_cast<int>(state.range(0)), 0.1, rng);
    const auto pairs = annual_pairs();
    for (auto _ : state) benchmark::DoNotOptimize(lstm::bptt_gradients(model, pairs).loss);
    state.SetItemsProcessed(state.iterations() * static_cast<long long>(pairs.size()));
}
BENCHMARK(BM_BpttFullBatch)->Arg(4)->Arg(16);

void BM_Forecast50(benchmark::State& state) {
    Rng rng(1);
    const auto model = lstm::Model::random(16, 0.1, rng);
    const auto series = synthetic::annual_series(150, synthetic::SeriesShape{}, 1);
    for (auto _ : state) benchmark::DoNotOptimize(lstm::forecast(model, series, tdf::TdfConfig::annual(), 50));
}
BENCHMARK(BM_Forecast50);

}  // namespace
