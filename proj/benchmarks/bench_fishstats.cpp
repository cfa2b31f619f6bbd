#include <benchmark/benchmark.h>

#include "fishmig/fishstats.hpp"
#include "fishmig/rng.hpp"

using namespace fishmig;

namespace {

void BM_TransitionProbability(benchmark::State& state) {
    const auto p = fishstats::mackerel_profile();
    double t = p.mu - 1.0;
    for (auto _ : state) {
        benchmark::DoNotOptimize(fishstats::transition_probability(t, p));
        t += 1e-6;
    }
}
BENCHMARK(BM_TransitionProbability);

void BM_FitProfiles(benchmark::State& state) {
    Rng rng(2);
    std::vector<fishstats::OccurrenceRecord> recs;
    for (int k = 0; k < state.range(0); ++k) recs.push_back({k % 2 ? "herring" : "mackerel", rng.normal(10.3, 0.1)});
    for (auto _ : state) benchmark::DoNotOptimize(fishstats::fit_profiles(recs).size());
}
BENCHMARK(BM_FitProfiles)->Arg(10000)->Arg(100000);

}  // namespace
