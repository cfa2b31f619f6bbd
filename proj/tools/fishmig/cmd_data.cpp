#include <algorithm>
#include <cmath>
#include <filesystem>
#include <fstream>
#include <iostream>
#include <set>

#include "commands.hpp"
#include "fishmig/econ.hpp"
#include "fishmig/error.hpp"
#include "fishmig/scenario.hpp"
#include "fishmig/synthetic.hpp"
#include "fishmig/text.hpp"

namespace fishmig::cli {

namespace fs = std::filesystem;

namespace {

int ingest(Run& run) {
    const auto input = run.require("input");
    run.add_input(input);
    auto store = sst::load_sst_csv(input);
    const auto month = run.get_int("month");
    if (month != 0) store = sst::filter_month(store, static_cast<int>(month));
    if (store.empty()) throw InputError("ingest: no samples left in '" + input + "'");
    sst::write_sst_csv(store, run.output("store.csv"));
    std::cout << "ingested " << store.sample_count() << " samples at " << store.vertex_count() << " vertexes\n";
    return 0;
}

void write_kv(const KvConfig& kv, const std::string& path) {
    std::ofstream out(path);
    if (!out) throw InputError("cannot write '" + path + "'");
    for (const auto& [k, v] : kv.values()) out << k << '=' << v << '\n';
}

sst::MapExtent extent_of(const Run& run) {
    sst::MapExtent e;
    e.north_lat = run.get_double("north_lat");
    e.west_lon = run.get_double("west_lon");
    e.rows = static_cast<int>(run.get_int("rows"));
    e.cols = static_cast<int>(run.get_int("cols"));
    e.validate();
    return e;
}

/// Regional water-mean of one month per year, for the warming-rate estimate.
std::vector<double> regional_means(const sst::SstSeriesStore& store, const sst::LandMask& mask,
                                   const sst::MapExtent& extent, int first_year, int years, int month) {
    std::vector<double> out;
    for (int y = 0; y < years; ++y) {
        const auto field = sst::build_grid_field(sst::vertex_layer(store, first_year + y, month), mask, extent, 0);
        double sum = 0.0;
        int n = 0;
        for (int i = 0; i < field.rows(); ++i)
            for (int j = 0; j < field.cols(); ++j)
                if (const auto t = field.temperature(i, j)) {
                    sum += *t;
                    ++n;
                }
        out.push_back(sum / n);
    }
    return out;
}

void write_strip(const Run& run) {
    const auto strip = synthetic::gradient_strip(1.0);
    const auto dir = run.output("strip");
    fs::create_directories(dir);
    sst::write_field_csv(strip.baseline, dir + "/baseline_field.csv");
    eca::write_seeding_csv(strip.initial, dir + "/seeding.csv");
    fishstats::write_profiles(strip.profiles, dir + "/profiles.csv");
    KvConfig cfg;
    cfg.set("alpha", "1");
    cfg.set("k", text::format_double(strip.config.k));
    cfg.set("horizon", std::to_string(strip.config.horizon));
    cfg.set("predicate", strip.config.predicate.to_string());
    cfg.set("field_source", "linear");
    cfg.set("hop_budget", std::to_string(strip.config.step.hop_budget));
    cfg.set("movement", "always");
    write_kv(cfg, dir + "/scenario.cfg");
}

int make_synthetic(Run& run) {
    const auto kind = run.get("kind");
    static const std::set<std::string> kinds{"all",     "sst",    "mask",     "occurrences", "seeding",
                                             "baseline", "params", "scenario", "strip"};
    if (!kinds.contains(kind)) throw InputError("make-synthetic: unknown --kind '" + kind + "'");
    const auto want = [&](const char* k) { return kind == "all" || kind == k; };

    synthetic::ArchiveSpec spec;
    spec.extent = extent_of(run);
    spec.first_year = static_cast<int>(run.get_int("first_year"));
    spec.years = static_cast<int>(run.get_int("years"));
    spec.months = parse_int_list(run.get("months"));
    if (spec.months.empty()) throw InputError("make-synthetic: --months is empty");
    spec.shape.trend_per_year = run.get_double("trend");
    spec.shape.amplitude_c = run.get_double("amplitude");
    spec.shape.noise_sd = run.get_double("noise");
    const auto mask = synthetic::default_land_mask(spec.extent.rows, spec.extent.cols);
    const auto seed = run.seed();

    if (want("mask")) sst::write_land_mask(mask, run.output("land_mask.txt"));

    if (want("sst") || want("baseline") || want("scenario")) {
        const auto store = synthetic::sst_archive(spec, Rng::derive(seed, 0));
        const int month = std::find(spec.months.begin(), spec.months.end(), 8) != spec.months.end() ? 8 : spec.months[0];
        if (want("sst")) sst::write_sst_csv(store, run.output("sst.csv"));
        if (want("baseline")) {
            const int last = spec.first_year + spec.years - 1;
            const auto field = sst::build_grid_field(sst::vertex_layer(store, last, month), mask, spec.extent, 0);
            sst::write_field_csv(field, run.output("baseline_field.csv"));
        }
        if (want("scenario")) {
            const auto series = regional_means(store, mask, spec.extent, spec.first_year, spec.years, month);
            KvConfig cfg;
            cfg.set("alpha", "1");
            cfg.set("k", text::format_fixed(scenario::estimate_k(series), 5));
            cfg.set("horizon", run.get("horizon"));
            cfg.set("predicate", "centroid_cross:col=" + run.get("column") + ":species=herring");
            cfg.set("field_source", "linear");
            cfg.set("hop_budget", "1");
            cfg.set("movement", "stochastic");
            write_kv(cfg, run.output("scenario.cfg"));
        }
    }

    if (want("occurrences")) {
        fishstats::ProfileSet ref;
        for (const auto& p : {fishstats::herring_profile(), fishstats::mackerel_profile()}) ref.emplace(p.species, p);
        const auto recs =
            synthetic::occurrences(ref, static_cast<int>(run.get_int("per_species")), Rng::derive(seed, 1));
        fishstats::write_occurrences(recs, run.output("occurrences.csv"));
        fishstats::write_profiles(ref, run.output("reference_profiles.csv"));
    }

    if (want("seeding")) {
        const std::map<std::string, int> counts{{"herring", static_cast<int>(run.get_int("herring_cells"))},
                                                {"mackerel", static_cast<int>(run.get_int("mackerel_cells"))}};
        eca::write_seeding_csv(synthetic::seeding(mask, counts, Rng::derive(seed, 2)),
                               run.output("seeding.csv"));
    }

    if (want("params")) write_kv(econ::FleetParams{}.to_kv(), run.output("fleet.params"));
    if (want("strip")) write_strip(run);

    std::cout << "wrote synthetic " << kind << " fixtures to " << run.output("") << '\n';
    return 0;
}

int render(Run& run) {
    const auto scale = static_cast<int>(run.get_int("scale"));
    if (scale < 1) throw InputError("render: --scale must be >= 1");
    const auto path = run.output(run.get("name") + ".ppm");
    const auto field_path = run.get("field");
    const auto occ_path = run.get("occupancy");
    if (field_path.empty() == occ_path.empty())
        throw InputError("render: give exactly one of --field or --occupancy");

    if (!field_path.empty()) {
        run.add_input(field_path);
        sst::render_heatmap(sst::read_field_csv(field_path, 0), path, scale);
    } else {
        const auto mask_path = run.require("mask");
        run.add_input(occ_path);
        run.add_input(mask_path);
        const auto mask = sst::load_land_mask(mask_path);
        const auto rows = eca::load_occupancy_csv(occ_path);
        if (rows.empty()) throw InputError("render: '" + occ_path + "' has no rows");
        int year = static_cast<int>(run.get_int("year"));
        if (year < 0) year = rows.back().year;
        std::vector<int> counts(static_cast<std::size_t>(mask.rows()) * mask.cols(), 0);
        for (const auto& r : rows) {
            if (r.year != year) continue;
            if (!mask.in_bounds(r.at.i, r.at.j))
                throw InputError("render: occupancy cell (" + std::to_string(r.at.i) + ", " + std::to_string(r.at.j) +
                                 ") lies outside the mask");
            counts[static_cast<std::size_t>(r.at.i) * mask.cols() + r.at.j] += r.cells;
        }
        for (auto& c : counts) c = std::min(c, eca::kMaxCellsPerGrid);
        sst::rasterize_counts(mask, counts, scale).write_ppm(path);
    }
    std::cout << "wrote " << path << '\n';
    return 0;
}

}  // namespace

std::vector<Command> data_commands() {
    return {
        {"ingest",
         "validate an SST CSV and store it by vertex",
         {{"input", "", "SST CSV: year,month,lat,lon,temp_c"}, {"month", "0", "keep only this month (0 keeps all)"}},
         ingest},
        {"make-synthetic",
         "write seeded fixture datasets",
         {{"kind", "all", "all|sst|mask|occurrences|seeding|baseline|params|scenario|strip"},
          {"years", "150", "archive length in years"},
          {"first_year", "1870", "first archive year"},
          {"months", "8", "months to sample, e.g. 8 or 1-12"},
          {"rows", "13", "grid rows"},
          {"cols", "27", "grid columns"},
          {"north_lat", "67.5", "latitude of the northern edge"},
          {"west_lon", "-20.5", "longitude of the western edge"},
          {"trend", "0.02", "warming trend in C/year"},
          {"amplitude", "0.3", "multidecadal oscillation amplitude in C"},
          {"noise", "0.1", "noise standard deviation in C"},
          {"per_species", "100000", "occurrence samples per species"},
          {"herring_cells", "60", "seeded herring cells"},
          {"mackerel_cells", "60", "seeded mackerel cells"},
          {"horizon", "50", "scenario horizon written to scenario.cfg"},
          {"column", "20", "boundary column written to scenario.cfg"}},
         make_synthetic},
        {"render",
         "draw a temperature field or occupancy snapshot as a PPM heatmap",
         {{"field", "", "field CSV: i,j,temp_c"},
          {"occupancy", "", "occupancy CSV from simulate"},
          {"mask", "", "land mask, required with --occupancy"},
          {"year", "-1", "occupancy year to draw (-1 = last)"},
          {"scale", "8", "pixels per cell edge"},
          {"name", "heatmap", "output file stem"}},
         render},
    };
}

}  // namespace fishmig::cli
