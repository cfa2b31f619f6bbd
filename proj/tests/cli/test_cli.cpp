#include <gtest/gtest.h>

#include <filesystem>
#include <json.hpp>

#include "cli_runner.hpp"
#include "fishmig/fishstats.hpp"
#include "fishmig/scenario.hpp"
#include "fishmig/sst_data.hpp"
#include "test_paths.hpp"

using namespace fishmig;
using testutil::run_cli;
using testutil::slurp;
namespace fs = std::filesystem;

namespace {

std::string q(const fs::path& p) { return "\"" + p.string() + "\""; }

/// Small 2x3 archive with every month, so month filtering has work to do.
fs::path small_archive(const fs::path& dir) {
    const auto r = run_cli("make-synthetic --kind sst --rows 2 --cols 3 --years 20 --months 1-12 --out " + q(dir));
    EXPECT_EQ(r.exit_code, 0) << r.output;
    return dir / "sst.csv";
}

fs::path strip_fixture(const fs::path& dir) {
    const auto r = run_cli("make-synthetic --kind strip --out " + q(dir));
    EXPECT_EQ(r.exit_code, 0) << r.output;
    return dir / "strip";
}

std::size_t count_prefixed(const fs::path& dir, const std::string& prefix, const std::string& ext) {
    std::size_t n = 0;
    for (const auto& e : fs::directory_iterator(dir)) {
        const auto name = e.path().filename().string();
        if (name.starts_with(prefix) && e.path().extension() == ext) ++n;
    }
    return n;
}

}  // namespace

TEST(Cli, MalformedCsvExitsWithCodeTwoAndLineNumber) {
    const auto dir = testutil::scratch_dir("cli_malformed");
    {
        std::ofstream out(dir / "bad.csv");
        out << "year,month,lat,lon,temp_c\n1870,8,60.0,-5.0,9.1\n1871,8,60.0,-5.0,abc\n";
    }
    const auto r = run_cli("ingest --input " + q(dir / "bad.csv") + " --out " + q(dir / "out"));
    EXPECT_EQ(r.exit_code, 2);
    EXPECT_NE(r.output.find("bad.csv:3:"), std::string::npos) << r.output;
}

TEST(Cli, MissingRequiredInputIsUsageError) {
    const auto dir = testutil::scratch_dir("cli_missing");
    const auto r = run_cli("ingest --out " + q(dir));
    EXPECT_EQ(r.exit_code, 2);
    EXPECT_NE(r.output.find("--input"), std::string::npos) << r.output;
}

TEST(Cli, UnknownSettingsAreRejected) {
    const auto dir = testutil::scratch_dir("cli_unknown");
    {
        std::ofstream out(dir / "cfg.txt");
        out << "month=8\nwarp_factor=9\n";
    }
    const auto archive = small_archive(dir);
    auto r = run_cli("--config " + q(dir / "cfg.txt") + " ingest --input " + q(archive) + " --out " + q(dir / "o"));
    EXPECT_EQ(r.exit_code, 2);
    EXPECT_NE(r.output.find("warp_factor"), std::string::npos) << r.output;
    r = run_cli("ingest --set bogus=1 --input " + q(archive) + " --out " + q(dir / "o"));
    EXPECT_EQ(r.exit_code, 2);
}

TEST(Cli, IngestKeepsOnlyTheRequestedMonth) {
    const auto dir = testutil::scratch_dir("cli_ingest");
    const auto archive = small_archive(dir);
    const auto r = run_cli("ingest --input " + q(archive) + " --month 8 --out " + q(dir / "out"));
    ASSERT_EQ(r.exit_code, 0) << r.output;
    const auto store = sst::load_sst_csv((dir / "out" / "store.csv").string());
    EXPECT_EQ(store.vertex_count(), 12u);  // (2 + 1) x (3 + 1) corners
    EXPECT_EQ(store.sample_count(), 12u * 20u);
    for (const auto& [v, series] : store.series())
        for (const auto& s : series) EXPECT_EQ(s.month, 8);
}

TEST(Cli, ConfigFileIsOverriddenByFlags) {
    const auto dir = testutil::scratch_dir("cli_layering");
    const auto archive = small_archive(dir);
    {
        std::ofstream out(dir / "cfg.txt");
        out << "# ingest settings\nmonth=3\n";
    }
    auto r = run_cli("--config " + q(dir / "cfg.txt") + " ingest --input " + q(archive) + " --out " + q(dir / "a"));
    ASSERT_EQ(r.exit_code, 0) << r.output;
    const auto store_a = sst::load_sst_csv((dir / "a" / "store.csv").string());
    ASSERT_FALSE(store_a.empty());
    for (const auto& [v, series] : store_a.series()) EXPECT_EQ(series.front().month, 3);
    r = run_cli("--config " + q(dir / "cfg.txt") + " ingest --input " + q(archive) + " --month 9 --out " +
                q(dir / "b"));
    ASSERT_EQ(r.exit_code, 0) << r.output;
    const auto store_b = sst::load_sst_csv((dir / "b" / "store.csv").string());
    ASSERT_FALSE(store_b.empty());
    for (const auto& [v, series] : store_b.series()) EXPECT_EQ(series.front().month, 9);
}

TEST(Cli, ManifestRecordsTheRun) {
    const auto dir = testutil::scratch_dir("cli_manifest");
    const auto archive = small_archive(dir);
    const auto r = run_cli("--seed 42 ingest --input " + q(archive) + " --month 8 --out " + q(dir / "out"));
    ASSERT_EQ(r.exit_code, 0) << r.output;
    const auto j = nlohmann::json::parse(slurp((dir / "out" / "manifest_ingest.json").string()));
    EXPECT_EQ(j["command"], "ingest");
    EXPECT_EQ(j["seed"], 42);
    EXPECT_EQ(j["config"]["month"], "8");
    EXPECT_TRUE(j.contains("version"));
    EXPECT_TRUE(j.contains("timestamp"));
    ASSERT_TRUE(j["inputs"].contains(archive.string()));
    EXPECT_EQ(j["inputs"][archive.string()].get<std::string>().size(), 64u);
    EXPECT_EQ(count_prefixed(dir / "out", "manifest", ".json"), 1u);
}

TEST(Cli, TrainingOneBlockWritesOneCheckpointAndLossCurve) {
    const auto dir = testutil::scratch_dir("cli_train");
    const auto archive = small_archive(dir);
    const auto r = run_cli("train --input " + q(archive) + " --rows 2 --cols 3 --blocks 1,1 --epochs 100 --hidden 4 " +
                           "--out " + q(dir / "out"));
    ASSERT_EQ(r.exit_code, 0) << r.output;
    const auto ck = dir / "out" / "checkpoints";
    EXPECT_EQ(count_prefixed(ck, "block_", ".json"), 1u);
    EXPECT_TRUE(fs::exists(ck / "block_1_1.json"));
    const auto loss = slurp((ck / "loss_1_1.csv").string());
    EXPECT_EQ(std::count(loss.begin(), loss.end(), '\n'), 101);  // header + one row per epoch

    const auto fc = run_cli("forecast --checkpoints " + q(ck) + " --years 10,20,30,40,50 --out " + q(dir / "fc"));
    ASSERT_EQ(fc.exit_code, 0) << fc.output;
    EXPECT_EQ(count_prefixed(dir / "fc", "field_", ".csv"), 5u);
    for (int y : {10, 20, 30, 40, 50}) {
        const auto f = sst::read_field_csv((dir / "fc" / ("field_" + std::to_string(y) + ".csv")).string(), y);
        EXPECT_TRUE(f.temperature(1, 1).has_value());
        EXPECT_TRUE(f.is_land(0, 0));
    }
}

TEST(Cli, TrainingIsReproducibleAcrossRunsAndThreadCounts) {
    const auto dir = testutil::scratch_dir("cli_train_repeat");
    const auto archive = small_archive(dir);
    const std::string common = "--seed 5 train --input " + q(archive) + " --rows 2 --cols 3 --blocks \"0,0;1,2\" " +
                               "--epochs 50 --hidden 3";
    for (const auto& [out, threads] : {std::pair{"a", "1"}, {"b", "1"}, {"c", "2"}}) {
        const auto r = run_cli(common + " --threads " + threads + " --out " + q(dir / out));
        ASSERT_EQ(r.exit_code, 0) << r.output;
    }
    for (const char* f : {"block_0_0.json", "block_1_2.json", "loss_0_0.csv", "loss_1_2.csv"}) {
        const auto a = slurp((dir / "a" / "checkpoints" / f).string());
        ASSERT_FALSE(a.empty()) << f;
        EXPECT_EQ(a, slurp((dir / "b" / "checkpoints" / f).string())) << f;
        EXPECT_EQ(a, slurp((dir / "c" / "checkpoints" / f).string())) << f;
    }
}

TEST(Cli, TrainingRejectsLandOrOutOfGridBlocks) {
    const auto dir = testutil::scratch_dir("cli_train_bad");
    const auto archive = small_archive(dir);
    const auto r = run_cli("train --input " + q(archive) + " --rows 2 --cols 3 --blocks 5,5 --out " + q(dir / "out"));
    EXPECT_EQ(r.exit_code, 2);
    EXPECT_NE(r.output.find("(5, 5)"), std::string::npos) << r.output;
}

TEST(Cli, SimulationIsReproducibleForASeed) {
    const auto dir = testutil::scratch_dir("cli_sim");
    auto r = run_cli("make-synthetic --per_species 2000 --out " + q(dir / "syn"));
    ASSERT_EQ(r.exit_code, 0) << r.output;
    const std::string common = "simulate --years 50 --seeding " + q(dir / "syn" / "seeding.csv") + " --profiles " +
                               q(dir / "syn" / "reference_profiles.csv") + " --baseline " +
                               q(dir / "syn" / "baseline_field.csv");
    for (const char* out : {"a", "b"}) {
        r = run_cli("--seed 7 " + common + " --out " + q(dir / out));
        ASSERT_EQ(r.exit_code, 0) << r.output;
    }
    r = run_cli("--seed 8 " + common + " --out " + q(dir / "c"));
    ASSERT_EQ(r.exit_code, 0) << r.output;
    for (const char* f : {"occupancy.csv", "movements.csv"}) {
        EXPECT_EQ(slurp((dir / "a" / f).string()), slurp((dir / "b" / f).string())) << f;
    }
    EXPECT_NE(slurp((dir / "a" / "movements.csv").string()), slurp((dir / "c" / "movements.csv").string()));
}

TEST(Cli, SimulationNeedsEveryYearlyField) {
    const auto dir = testutil::scratch_dir("cli_sim_gap");
    auto r = run_cli("make-synthetic --kind strip --out " + q(dir));
    ASSERT_EQ(r.exit_code, 0) << r.output;
    fs::create_directories(dir / "fields");
    fs::copy_file(dir / "strip" / "baseline_field.csv", dir / "fields" / "field_1.csv");
    r = run_cli("simulate --years 2 --fields " + q(dir / "fields") + " --seeding " + q(dir / "strip" / "seeding.csv") +
                " --profiles " + q(dir / "strip" / "profiles.csv") + " --out " + q(dir / "out"));
    EXPECT_EQ(r.exit_code, 2);
    EXPECT_NE(r.output.find("year 2"), std::string::npos) << r.output;
}

TEST(Cli, FittedLivableRangeMatchesReference) {
    const auto dir = testutil::scratch_dir("cli_fit");
    auto r = run_cli("make-synthetic --kind occurrences --out " + q(dir / "syn"));
    ASSERT_EQ(r.exit_code, 0) << r.output;
    r = run_cli("fit-fish --input " + q(dir / "syn" / "occurrences.csv") + " --out " + q(dir / "fit"));
    ASSERT_EQ(r.exit_code, 0) << r.output;
    const auto fitted = fishstats::load_profiles((dir / "fit" / "profiles.csv").string());
    for (const auto& ref : {fishstats::herring_profile(), fishstats::mackerel_profile()}) {
        const auto got = fitted.at(ref.species).livable();
        EXPECT_NEAR(got.lo, ref.livable().lo, 0.003) << ref.species;
        EXPECT_NEAR(got.hi, ref.livable().hi, 0.003) << ref.species;
        EXPECT_TRUE(fs::exists(dir / "fit" / ("qq_" + ref.species + ".csv")));
    }
}

TEST(Cli, ScenarioSweepIsNonIncreasingInAlpha) {
    const auto dir = testutil::scratch_dir("cli_sweep");
    const auto strip = strip_fixture(dir);
    const auto r = run_cli("--config " + q(strip / "scenario.cfg") + " scenario --alpha 0.25,0.5,1.0 --baseline " +
                           q(strip / "baseline_field.csv") + " --seeding " + q(strip / "seeding.csv") +
                           " --profiles " + q(strip / "profiles.csv") + " --out " + q(dir / "out"));
    ASSERT_EQ(r.exit_code, 0) << r.output;
    std::istringstream in(slurp((dir / "out" / "sweep.csv").string()));
    std::string line;
    std::getline(in, line);
    EXPECT_EQ(line, "alpha,years_elapsed");
    std::vector<int> years;
    while (std::getline(in, line)) years.push_back(std::stoi(line.substr(line.find(',') + 1)));
    ASSERT_EQ(years.size(), 3u);
    EXPECT_GE(years[0], years[1]);
    EXPECT_GE(years[1], years[2]);
    EXPECT_EQ(years[2], 3);
}

TEST(Cli, ScenarioAcceptsPresetNames) {
    const auto dir = testutil::scratch_dir("cli_presets");
    const auto strip = strip_fixture(dir);
    const auto r = run_cli("--config " + q(strip / "scenario.cfg") +
                           " scenario --alpha business_as_usual,mitigation --baseline " +
                           q(strip / "baseline_field.csv") + " --seeding " + q(strip / "seeding.csv") +
                           " --profiles " + q(strip / "profiles.csv") + " --out " + q(dir / "out"));
    ASSERT_EQ(r.exit_code, 0) << r.output;
    EXPECT_EQ(slurp((dir / "out" / "sweep.csv").string()), "alpha,years_elapsed\n1,3\n0.5,5\n");
}

TEST(Cli, EconWritesOneRecommendationPerYear) {
    const auto dir = testutil::scratch_dir("cli_econ");
    auto r = run_cli("make-synthetic --per_species 100 --out " + q(dir / "syn"));
    ASSERT_EQ(r.exit_code, 0) << r.output;
    r = run_cli("simulate --years 12 --seeding " + q(dir / "syn" / "seeding.csv") + " --profiles " +
                q(dir / "syn" / "reference_profiles.csv") + " --baseline " + q(dir / "syn" / "baseline_field.csv") +
                " --out " + q(dir / "sim"));
    ASSERT_EQ(r.exit_code, 0) << r.output;
    r = run_cli("econ --occupancy " + q(dir / "sim" / "occupancy.csv") + " --home 5,2 --params " +
                q(dir / "syn" / "fleet.params") + " --sensitivity 100 --out " + q(dir / "econ"));
    ASSERT_EQ(r.exit_code, 0) << r.output;
    const auto recs = slurp((dir / "econ" / "recommendations.csv").string());
    EXPECT_EQ(std::count(recs.begin(), recs.end(), '\n'), 14);  // header + years 0..12
    EXPECT_TRUE(recs.starts_with("year,distance_km,option,net_profit\n0,"));
    const auto sens = slurp((dir / "econ" / "sensitivity.csv").string());
    EXPECT_EQ(std::count(sens.begin(), sens.end(), '\n'), 3);
}

TEST(Cli, RenderWritesAHeatmap) {
    const auto dir = testutil::scratch_dir("cli_render");
    const auto strip = strip_fixture(dir);
    const auto r = run_cli("render --field " + q(strip / "baseline_field.csv") + " --scale 4 --name strip --out " +
                           q(dir / "out"));
    ASSERT_EQ(r.exit_code, 0) << r.output;
    const auto img = sst::Pixmap::read_ppm((dir / "out" / "strip.ppm").string());
    EXPECT_EQ(img.width(), 40);
    EXPECT_EQ(img.height(), 4);
    EXPECT_TRUE(fs::exists(dir / "out" / "strip.csv"));
}

TEST(Cli, RepeatedRunsProduceIdenticalOutputs) {
    const auto dir = testutil::scratch_dir("cli_idempotent");
    for (const char* out : {"a", "b"}) {
        const auto r = run_cli("--seed 3 make-synthetic --years 10 --per_species 500 --out " + q(dir / out));
        ASSERT_EQ(r.exit_code, 0) << r.output;
    }
    std::size_t compared = 0;
    for (const auto& e : fs::recursive_directory_iterator(dir / "a")) {
        if (!e.is_regular_file() || e.path().filename().string().starts_with("manifest")) continue;
        const auto rel = fs::relative(e.path(), dir / "a");
        EXPECT_EQ(slurp(e.path().string()), slurp((dir / "b" / rel).string())) << rel;
        ++compared;
    }
    EXPECT_GE(compared, 10u);
}
