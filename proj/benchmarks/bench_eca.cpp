#include <benchmark/benchmark.h>

#include "fishmig/eca.hpp"
#include "fishmig/scenario.hpp"
#include "fishmig/synthetic.hpp"

using namespace fishmig;

namespace {

struct World {
    sst::GridField baseline;
    eca::CellSpace initial;
    fishstats::ProfileSet profiles;
};

World make_world(int cells_per_species) {
    World w;
    const auto mask = synthetic::default_land_mask();
    synthetic::ArchiveSpec spec;
    spec.years = 1;
    const auto store = synthetic::sst_archive(spec, 3);
    w.baseline = sst::build_grid_field(sst::vertex_layer(store, spec.first_year, 8), mask, spec.extent, 0);
    for (const auto& p : {fishstats::herring_profile(), fishstats::mackerel_profile()}) w.profiles.emplace(p.species, p);
    w.initial = synthetic::seeding(mask, {{"herring", cells_per_species}, {"mackerel", cells_per_species}}, 3);
    return w;
}

void BM_StepYear(benchmark::State& state) {
    const auto w = make_world(static_cast<int>(state.range(0)));
    const auto field = scenario::corrected_field(w.baseline, 0.02, 1.0, 1);
    Rng rng(5);
    for (auto _ : state) {
        auto [next, report] = eca::step_year(w.initial, field, w.profiles, {}, rng);
        benchmark::DoNotOptimize(report.moves.size());
    }
}
BENCHMARK(BM_StepYear)->Arg(50)->Arg(200);

void BM_Simulate50Years(benchmark::State& state) {
    const auto w = make_world(60);
    std::vector<sst::GridField> fields;
    for (int n = 1; n <= 50; ++n) fields.push_back(scenario::corrected_field(w.baseline, 0.02, 1.0, n));
    for (auto _ : state) benchmark::DoNotOptimize(eca::run_simulation(w.initial, fields, w.profiles, 7).snapshots.size());
}
BENCHMARK(BM_Simulate50Years)->Unit(benchmark::kMillisecond);

}  // namespace
