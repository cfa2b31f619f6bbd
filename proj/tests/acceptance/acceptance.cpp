// Runs the ten acceptance criteria and prints one PASS/FAIL line for each.
// Exit status is nonzero when any criterion fails.

#include <chrono>
#include <cmath>
#include <cstdio>
#include <filesystem>
#include <functional>
#include <sstream>
#include <string>
#include <vector>

#include "cli_runner.hpp"
#include "fishmig/econ.hpp"
#include "fishmig/fishstats.hpp"
#include "fishmig/lstm.hpp"
#include "fishmig/scenario.hpp"
#include "fishmig/synthetic.hpp"
#include "gradient_check.hpp"
#include "normal_oracle.hpp"
#include "test_paths.hpp"

using namespace fishmig;
namespace fs = std::filesystem;

namespace {

struct Outcome {
    bool pass = false;
    std::string detail;
};

std::string fmt(const char* f, double v) {
    char buf[64];
    std::snprintf(buf, sizeof buf, f, v);
    return buf;
}

Outcome table_arithmetic() {
    const auto h = fishstats::livable_range(10.397, 0.010);
    const auto m = fishstats::livable_range(10.304, 0.119);
    const auto r3 = [](double v) { return std::round(v * 1000.0) / 1000.0; };
    const bool ok = r3(h.lo) == 10.377 && r3(h.hi) == 10.417 && r3(m.lo) == 10.066 && r3(m.hi) == 10.542;
    return {ok, "herring [" + fmt("%.3f", h.lo) + ", " + fmt("%.3f", h.hi) + "], mackerel [" + fmt("%.3f", m.lo) +
                    ", " + fmt("%.3f", m.hi) + "]"};
}

Outcome coverage() {
    double worst = 0.0;
    for (const auto& p : {fishstats::herring_profile(), fishstats::mackerel_profile()}) {
        const double cov = fishstats::normal_cdf(p.mu + 2 * p.sigma, p) - fishstats::normal_cdf(p.mu - 2 * p.sigma, p);
        const double pt = fishstats::transition_probability(p.mu - 2 * p.sigma, p);
        worst = std::max({worst, std::abs(cov - 0.9545), std::abs(pt - 0.9545)});
    }
    return {worst <= 1e-4, "max |value - 0.9545| = " + fmt("%.2e", worst)};
}

Outcome integral_oracle() {
    Rng rng(2024);
    double worst = 0.0;
    for (const auto& p : {fishstats::herring_profile(), fishstats::mackerel_profile()})
        for (int k = 0; k < 1000; ++k) {
            const double t = rng.uniform(p.mu - 6 * p.sigma, p.mu + 6 * p.sigma);
            const double diff =
                std::abs(fishstats::transition_probability(t, p) - oracle::transition_probability(t, p.mu, p.sigma));
            worst = std::max(worst, diff);
        }
    return {worst <= 1e-9, "2000 temperatures, max abs diff " + fmt("%.2e", worst)};
}

Outcome gradient_check() {
    double worst = 0.0;
    std::string where;
    for (std::uint64_t seed = 1; seed <= 10; ++seed) {
        Rng rng(seed);
        const int hidden = 1 + static_cast<int>(rng.below(4));
        const int steps = 1 + static_cast<int>(rng.below(5));
        const auto form = seed % 2 ? lstm::OutputForm::GateThenTanh : lstm::OutputForm::Conventional;
        const auto model = lstm::Model::random(hidden, 0.6, rng, form);
        std::vector<tdf::TrainingPair> batch(1 + rng.below(4));
        for (auto& pair : batch) {
            pair.features.resize(static_cast<std::size_t>(steps));
            for (double& f : pair.features) f = rng.uniform(-1.5, 1.5);
            pair.target = rng.uniform(-1, 1);
        }
        const auto gc = oracle::check_gradients(model, batch);
        if (gc.max_rel > worst) {
            worst = gc.max_rel;
            where = "seed " + std::to_string(seed) + " " + gc.worst;
        }
    }
    return {worst <= 1e-4, "10 seeds, max relative error " + fmt("%.2e", worst) + " (" + where + ")"};
}

Outcome forecast_anchor() {
    // Each series is split 140 / 10; the model never sees the final ten
    // points and predicts each one from the observed history before it.
    const auto features = tdf::TdfConfig::annual();
    double worst = 0.0;
    double worst_rolling = 0.0;
    for (std::uint64_t seed = 1; seed <= 5; ++seed) {
        const auto series = synthetic::annual_series(150, synthetic::SeriesShape{}, seed);
        const std::vector<double> train_part(series.begin(), series.begin() + 140);
        lstm::TrainConfig cfg;
        cfg.seed = seed;
        const auto model = lstm::train(tdf::make_dataset(train_part, features), cfg).model;
        for (std::size_t k = 140; k < 150; ++k) {
            const double pred = lstm::forward(model, tdf::build_features(series, k, features));
            worst = std::max(worst, std::abs(pred - series[k]));
        }
        const auto rolled = lstm::forecast(model, train_part, features, 10);
        for (std::size_t k = 0; k < 10; ++k) worst_rolling = std::max(worst_rolling, std::abs(rolled[k] - series[140 + k]));
    }
    return {worst <= 0.5, "5 series, held-out max abs error " + fmt("%.3f", worst) + " C (10-step rollout " +
                              fmt("%.3f", worst_rolling) + " C)"};
}

Outcome conservation() {
    const auto mask = synthetic::default_land_mask(13, 27);
    synthetic::ArchiveSpec spec;
    spec.years = 1;
    const auto store = synthetic::sst_archive(spec, 5);
    const auto baseline = sst::build_grid_field(sst::vertex_layer(store, spec.first_year, 8), mask, spec.extent, 0);
    std::vector<sst::GridField> fields;
    for (int n = 1; n <= 50; ++n) fields.push_back(scenario::corrected_field(baseline, 0.02, 1.0, n));
    fishstats::ProfileSet profiles;
    for (const auto& p : {fishstats::herring_profile(), fishstats::mackerel_profile()}) profiles.emplace(p.species, p);
    const auto initial = synthetic::seeding(mask, {{"herring", 80}, {"mackerel", 80}}, 9);
    const auto traj = eca::run_simulation(initial, fields, profiles, 9);

    const auto expected = initial.cells_per_species();
    bool ok = initial.total_cells() >= 100 && traj.snapshots.size() == 50;
    std::size_t hops = 0;
    for (const auto& snap : traj.snapshots) {
        ok = ok && snap.space.cells_per_species() == expected;
        for (int i = 0; i < mask.rows(); ++i)
            for (int j = 0; j < mask.cols(); ++j) {
                const int s = snap.space.grid({i, j}).occupancy();
                ok = ok && s <= eca::kMaxCellsPerGrid && (s == 0 || !mask.is_land(i, j));
            }
        for (const auto& m : snap.report.moves) hops += m.outcome == eca::MoveOutcome::Moved;
    }
    return {ok, std::to_string(initial.total_cells()) + " cells, 50 snapshots audited, " + std::to_string(hops) +
                    " hops"};
}

std::string q(const fs::path& p) { return "\"" + p.string() + "\""; }

Outcome determinism() {
    const auto dir = testutil::scratch_dir("acceptance_determinism");
    const auto syn = dir / "syn";
    if (testutil::run_cli("--seed 4 make-synthetic --per_species 100 --out " + q(syn)).exit_code != 0)
        return {false, "make-synthetic failed"};
    const std::string inputs = " --seeding " + q(syn / "seeding.csv") + " --profiles " +
                               q(syn / "reference_profiles.csv") + " --baseline " + q(syn / "baseline_field.csv");
    for (const char* run : {"a", "b"}) {
        const auto sim = testutil::run_cli("--seed 11 simulate --years 50" + inputs + " --out " + q(dir / run));
        const auto scen = testutil::run_cli("--seed 11 --config " + q(syn / "scenario.cfg") +
                                            " scenario --alpha 0.25,0.5,1.0 --predicate "
                                            "centroid_cross:col=14:species=mackerel" +
                                            inputs + " --out " + q(dir / run));
        if (sim.exit_code != 0 || scen.exit_code != 0) return {false, "cli run failed: " + sim.output + scen.output};
    }
    std::size_t bytes = 0;
    for (const char* f : {"occupancy.csv", "movements.csv", "sweep.csv"}) {
        const auto a = testutil::slurp((dir / "a" / f).string());
        if (a.empty() || a != testutil::slurp((dir / "b" / f).string())) return {false, std::string(f) + " differs"};
        bytes += a.size();
    }
    return {true, "occupancy, movements and sweep identical (" + std::to_string(bytes) + " bytes)"};
}

Outcome strip_timing() {
    const auto fast = synthetic::gradient_strip(1.0);
    const auto slow = synthetic::gradient_strip(0.5);
    const auto a = scenario::elapsed_time(fast.config, fast.initial, fast.profiles).years;
    const auto b = scenario::elapsed_time(slow.config, slow.initial, slow.profiles).years;
    if (!a || !b) return {false, "predicate not reached"};
    const bool ok = std::abs(*b - 2 * *a) <= 1;
    return {ok, "alpha 1.0: " + std::to_string(*a) + " years, alpha 0.5: " + std::to_string(*b) + " years"};
}

econ::FleetParams random_params(Rng& rng) {
    econ::FleetParams p;
    p.revenue_per_cell = rng.uniform(100, 5000);
    p.fuel_cost = rng.uniform(0, 3);
    p.crew_cost = rng.uniform(0, 500);
    p.vessel_speed = rng.uniform(50, 500);
    p.spoilage_horizon = rng.uniform(0.1, 5);
    p.decay_rate = rng.uniform(0, 1);
    p.refrigeration_capex = rng.uniform(0, 2000);
    p.seasons = rng.uniform(1, 30);
    return p;
}

Outcome economics() {
    Rng rng(77);
    double identity = 0.0;
    double slope = 0.0;
    int slope_points = 0;
    for (int k = 0; k < 1000; ++k) {
        const auto p = random_params(rng);
        const double d = rng.uniform(0, 3000);
        const bool fridge = rng.uniform() < 0.5;
        const auto b = econ::voyage_profit(d, p, fridge);
        identity = std::max(identity,
                            std::abs(b.net - (b.revenue - b.fuel - b.crew - b.spoilage - b.amortization)));

        bool near_kink = d < 1.0;
        if (!fridge)
            for (double kink : econ::spoilage_kinks_km(p)) near_kink = near_kink || std::abs(d - kink) < 1.0;
        if (near_kink) continue;
        const auto s = econ::sensitivity(p, d, fridge);
        const double hd = 1e-3;
        const double fd_d = (econ::voyage_profit(d + hd, p, fridge).net - econ::voyage_profit(d - hd, p, fridge).net) /
                            (2 * hd);
        // Total sailing time is 2 d / speed.
        const double ht = 1e-3;
        const double dt = ht * p.vessel_speed / 2;
        const double fd_t =
            (econ::voyage_profit(d + dt, p, fridge).net - econ::voyage_profit(d - dt, p, fridge).net) / (2 * ht);
        const auto rel = [](double a, double b) { return std::abs(a - b) / std::max({std::abs(a), std::abs(b), 1e-9}); };
        slope = std::max({slope, rel(fd_d, s.d_distance_analytic), rel(fd_t, s.d_time_analytic),
                          rel(s.d_distance, s.d_distance_analytic), rel(s.d_time, s.d_time_analytic)});
        ++slope_points;
    }

    std::vector<econ::YearPosition> track;
    for (int y = 1; y <= 15; ++y) track.push_back({y, 5.0, 2.0 + (y - 1)});
    const auto recs = econ::recommend(track, {5, 2}, econ::FleetParams{}, econ::Thresholds{333, 999});
    int replace = -1;
    int diversify = -1;
    for (const auto& r : recs) {
        if (r.option == econ::StrategyOption::ReplaceFirms && replace < 0) replace = r.year;
        if (r.option == econ::StrategyOption::Diversify && diversify < 0) diversify = r.year;
    }
    const bool ok = identity <= 1e-9 && slope <= 1e-6 && replace == 4 && diversify == 10;
    return {ok, "identity " + fmt("%.1e", identity) + ", slope rel err " + fmt("%.1e", slope) + " over " +
                    std::to_string(slope_points) + " points, switches at years " + std::to_string(replace) + " and " +
                    std::to_string(diversify)};
}

Outcome rendering() {
    const auto field = sst::read_field_csv(testutil::data_file("golden_field.csv"), 0);
    const auto golden = sst::Pixmap::read_ppm(testutil::data_file("golden_field.ppm"));
    const auto img = sst::rasterize_field(field, 1);
    if (field.rows() != 13 || field.cols() != 27) return {false, "golden field is not 27x13"};
    if (img.width() != golden.width() || img.height() != golden.height()) return {false, "dimension mismatch"};
    int mismatched = 0;
    int blue = 0, red = 0, white = 0;
    for (int y = 0; y < img.height(); ++y)
        for (int x = 0; x < img.width(); ++x) {
            mismatched += !(img.at(x, y) == golden.at(x, y));
            const auto t = field.temperature(y, x);
            if (!t)
                white += img.at(x, y) == sst::Rgb{255, 255, 255};
            else if (*t == 2.0)
                blue += img.at(x, y) == sst::Rgb{0, 0, 255};
            else if (*t == 12.0)
                red += img.at(x, y) == sst::Rgb{255, 0, 0};
        }
    return {mismatched == 0 && blue > 0 && red > 0 && white > 0,
            std::to_string(mismatched) + " mismatched pixels; " + std::to_string(blue) + " blue, " +
                std::to_string(red) + " red, " + std::to_string(white) + " white checked"};
}

}  // namespace

int main() {
    const std::vector<std::pair<std::string, std::function<Outcome()>>> criteria{
        {"livable-range arithmetic", table_arithmetic},
        {"95.45% coverage", coverage},
        {"transition probability vs quadrature", integral_oracle},
        {"LSTM gradient check", gradient_check},
        {"forecast error anchor", forecast_anchor},
        {"ECA conservation and occupancy", conservation},
        {"CLI determinism", determinism},
        {"gradient-strip elapsed time", strip_timing},
        {"economics consistency", economics},
        {"heatmap rendering", rendering},
    };
    int failed = 0;
    for (std::size_t k = 0; k < criteria.size(); ++k) {
        const auto start = std::chrono::steady_clock::now();
        Outcome o;
        try {
            o = criteria[k].second();
        } catch (const std::exception& e) {
            o = {false, std::string("exception: ") + e.what()};
        }
        const double secs = std::chrono::duration<double>(std::chrono::steady_clock::now() - start).count();
        failed += !o.pass;
        std::printf("criterion %2zu %-40s %s  %s [%.2fs]\n", k + 1, criteria[k].first.c_str(), o.pass ? "PASS" : "FAIL",
                    o.detail.c_str(), secs);
        std::fflush(stdout);
    }
    std::printf("%d of %zu criteria passed\n", static_cast<int>(criteria.size()) - failed, criteria.size());
    return failed == 0 ? 0 : 1;
}
