#include <filesystem>
#include <fstream>
#include <iomanip>
#include <iostream>

#include "commands.hpp"
#include "fishmig/eca.hpp"
#include "fishmig/econ.hpp"
#include "fishmig/error.hpp"
#include "fishmig/fishstats.hpp"
#include "fishmig/scenario.hpp"
#include "fishmig/text.hpp"

namespace fishmig::cli {

namespace {

int fit_fish(Run& run) {
    const auto input = run.require("input");
    run.add_input(input);
    const auto records = fishstats::load_occurrences(input);
    const auto profiles = fishstats::fit_profiles(records);
    fishstats::write_profiles(profiles, run.output("profiles.csv"));
    for (const auto& [name, p] : profiles) {
        std::vector<double> temps;
        for (const auto& r : records)
            if (r.species == name) temps.push_back(r.sst_c);
        const auto qq = fishstats::qq_points(temps);
        fishstats::write_qq_csv(qq, run.output("qq_" + name + ".csv"));
        const auto band = p.livable();
        std::cout << name << ": n=" << temps.size() << " Tb=" << text::format_fixed(p.best_temp(), 3)
                  << " sigma=" << text::format_fixed(p.sigma, 3) << " Ts=[" << text::format_fixed(band.lo, 3) << ", "
                  << text::format_fixed(band.hi, 3) << "] qq_max_dev=" << text::format_fixed(qq.max_deviation, 4)
                  << '\n';
    }
    return 0;
}

eca::StepOptions step_options(const Run& run) {
    eca::StepOptions o;
    o.hop_budget = static_cast<int>(run.get_int("hop_budget"));
    if (o.hop_budget < 1) throw InputError("--hop_budget must be >= 1");
    const auto mv = run.get("movement");
    if (mv == "stochastic")
        o.rule = eca::MovementRule::Stochastic;
    else if (mv == "always")
        o.rule = eca::MovementRule::Always;
    else
        throw InputError("--movement must be stochastic or always, got '" + mv + "'");
    return o;
}

fishstats::ProfileSet read_profiles(Run& run) {
    const auto path = run.require("profiles");
    run.add_input(path);
    return fishstats::load_profiles(path);
}

std::vector<sst::GridField> read_field_dir(const std::string& dir, int years) {
    std::vector<sst::GridField> out;
    for (int n = 1; n <= years; ++n) {
        const auto path = dir + "/field_" + std::to_string(n) + ".csv";
        if (!std::filesystem::exists(path))
            throw InputError("no field for year " + std::to_string(n) + ": '" + path + "' is missing");
        out.push_back(sst::read_field_csv(path, n));
    }
    return out;
}

int simulate(Run& run) {
    const int years = static_cast<int>(run.get_int("years"));
    if (years < 1) throw InputError("simulate: --years must be >= 1");
    const auto profiles = read_profiles(run);

    std::vector<sst::GridField> fields;
    if (const auto dir = run.get("fields"); !dir.empty()) {
        run.add_input(dir);
        fields = read_field_dir(dir, years);
    } else {
        const auto bpath = run.require("baseline");
        run.add_input(bpath);
        const auto baseline = sst::read_field_csv(bpath, 0);
        const double k = run.get_double("k");
        const double alpha = scenario::parse_alpha(run.get("alpha"));
        for (int n = 1; n <= years; ++n) fields.push_back(scenario::corrected_field(baseline, k, alpha, n));
    }

    const auto seeding = run.require("seeding");
    run.add_input(seeding);
    const auto initial = eca::load_seeding_csv(seeding, fields.front().mask());
    const auto traj = eca::run_simulation(initial, fields, profiles, run.seed(), step_options(run));

    const auto occ = run.output("occupancy.csv");
    eca::write_occupancy_csv(traj, occ);
    eca::write_movement_csv(traj, run.output("movements.csv"));
    std::size_t moved = 0;
    for (const auto& s : traj.snapshots)
        for (const auto& m : s.report.moves) moved += m.outcome == eca::MoveOutcome::Moved;
    std::cout << "simulated " << years << " years, " << traj.initial.total_cells() << " cells, " << moved
              << " hops; occupancy sha256 " << sha256_file(occ) << '\n';
    return 0;
}

int run_scenario(Run& run) {
    KvConfig kv;
    for (const auto* key : {"k", "horizon", "predicate", "field_source", "seed", "hop_budget", "movement"})
        kv.set(key, run.get(key));
    auto config = scenario::ScenarioConfig::from_kv(kv);

    std::vector<double> alphas;
    for (const auto& a : parse_list(run.get("alpha"))) alphas.push_back(scenario::parse_alpha(a));
    if (alphas.empty()) throw InputError("scenario: --alpha is empty");
    config.alpha = alphas.front();

    const auto bpath = run.require("baseline");
    run.add_input(bpath);
    config.baseline = sst::read_field_csv(bpath, 0);
    if (config.source == scenario::FieldSource::Lstm) {
        const auto dir = run.require("forecast_dir");
        run.add_input(dir);
        config.forecast = read_field_dir(dir, config.horizon);
    }
    config.validate();

    const auto profiles = read_profiles(run);
    const auto seeding = run.require("seeding");
    run.add_input(seeding);
    const auto initial = eca::load_seeding_csv(seeding, config.baseline.mask());

    const auto threads = static_cast<unsigned>(std::max<long long>(0, run.get_int("threads")));
    const auto rows = scenario::sweep(config, alphas, initial, profiles, threads);
    scenario::write_sweep_csv(rows, run.output("sweep.csv"));
    for (const auto& r : rows)
        std::cout << "alpha=" << text::format_double(r.alpha) << ": "
                  << (r.years ? std::to_string(*r.years) + " years" : std::string("not reached")) << '\n';
    return 0;
}

int econ_cmd(Run& run) {
    econ::FleetParams params;
    if (const auto p = run.get("params"); !p.empty()) {
        run.add_input(p);
        params = econ::FleetParams::from_kv(KvConfig::parse_file(p));
    }
    params.validate();
    econ::Thresholds th{run.get_double("upgrade_km"), run.get_double("abandon_km")};
    if (!(th.upgrade_km > 0.0) || !(th.abandon_km > th.upgrade_km))
        throw InputError("econ: need 0 < upgrade_km < abandon_km");

    const auto occ = run.require("occupancy");
    run.add_input(occ);
    const auto track = econ::centroid_track(eca::load_occupancy_csv(occ), run.get("species"));
    const auto recs = econ::recommend(track, parse_coord(run.require("home")), params, th);
    econ::write_recommendations_csv(recs, run.output("recommendations.csv"));

    if (const auto list = run.get("sensitivity"); !list.empty()) {
        std::ofstream out(run.output("sensitivity.csv"));
        out << "distance_km,refrigerated,d_distance,d_time,d_distance_analytic,d_time_analytic\n";
        for (const auto& item : parse_list(list)) {
            const auto d = text::parse_double(item);
            if (!d) throw InputError("econ: --sensitivity entry '" + item + "' is not a number");
            for (bool fridge : {false, true}) {
                const auto s = econ::sensitivity(params, *d, fridge);
                out << text::format_double(*d) << ',' << (fridge ? 1 : 0) << ',' << text::format_fixed(s.d_distance, 6)
                    << ',' << text::format_fixed(s.d_time, 6) << ',' << text::format_fixed(s.d_distance_analytic, 6)
                    << ',' << text::format_fixed(s.d_time_analytic, 6) << '\n';
            }
        }
    }

    std::map<std::string, int> tally;
    for (const auto& r : recs) ++tally[econ::to_string(r.option)];
    std::cout << recs.size() << " yearly recommendations:";
    for (const auto& [k, v] : tally) std::cout << ' ' << k << '=' << v;
    std::cout << '\n';
    return 0;
}

}  // namespace

std::vector<Command> sim_commands() {
    const std::vector<Key> movement{{"hop_budget", "1", "hops allowed per cell per year"},
                                    {"movement", "stochastic", "stochastic|always"}};
    Command sim{"simulate",
                "run the cellular automaton over yearly fields",
                {{"years", "50", "years to simulate"},
                 {"seeding", "", "initial cells: i,j,species,cell_count"},
                 {"profiles", "", "profiles CSV from fit-fish"},
                 {"fields", "", "directory of field_<n>.csv for years 1..N"},
                 {"baseline", "", "year-0 field, warmed linearly when --fields is not given"},
                 {"k", "0.02", "warming rate in C/year"},
                 {"alpha", "1", "correction factor or preset name"}},
                simulate};
    sim.keys.insert(sim.keys.end(), movement.begin(), movement.end());

    Command scen{"scenario",
                 "years until the boundary predicate holds, per correction factor",
                 {{"alpha", "1", "correction factors or presets, comma separated"},
                  {"k", "0.02", "warming rate in C/year"},
                  {"horizon", "50", "maximum years"},
                  {"predicate", "centroid_cross:col=20:species=herring", "boundary predicate"},
                  {"field_source", "linear", "linear|lstm"},
                  {"baseline", "", "year-0 field CSV"},
                  {"forecast_dir", "", "field_<n>.csv directory for the lstm source"},
                  {"seeding", "", "initial cells: i,j,species,cell_count"},
                  {"profiles", "", "profiles CSV from fit-fish"},
                  {"threads", "0", "worker threads (0 = all cores)"}},
                 run_scenario};
    scen.keys.insert(scen.keys.end(), movement.begin(), movement.end());

    return {
        {"fit-fish",
         "fit thermal profiles from occurrence temperatures",
         {{"input", "", "occurrences CSV: species,sst_c"}},
         fit_fish},
        sim,
        scen,
        {"econ",
         "yearly fleet strategy from the simulated distribution",
         {{"occupancy", "", "occupancy CSV from simulate"},
          {"home", "", "home port grid, e.g. 5,2"},
          {"species", "herring", "species to follow"},
          {"params", "", "fleet parameter file"},
          {"upgrade_km", "333", "upgrade vessels up to this distance"},
          {"abandon_km", "999", "replace firms up to this distance; diversify beyond"},
          {"sensitivity", "", "distances (km) for a profit sensitivity table"}},
         econ_cmd},
    };
}

}  // namespace fishmig::cli
