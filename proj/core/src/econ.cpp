#include "fishmig/econ.hpp"

#include <algorithm>
#include <cmath>
#include <fstream>
#include <map>

#include "fishmig/error.hpp"
#include "fishmig/text.hpp"

namespace fishmig::econ {

void FleetParams::validate() const {
    for (const auto& [name, v] : {std::pair{"revenue_per_cell", revenue_per_cell}, {"fuel_cost", fuel_cost},
                                  {"crew_cost", crew_cost}, {"spoilage_horizon", spoilage_horizon},
                                  {"decay_rate", decay_rate}, {"refrigeration_capex", refrigeration_capex},
                                  {"seasons", seasons}, {"km_per_cell", km_per_cell}})
        if (!(v >= 0.0) || !std::isfinite(v)) throw InputError(std::string(name) + " must be a non-negative number");
    if (!(vessel_speed > 0.0) || !std::isfinite(vessel_speed)) throw InputError("vessel_speed must be > 0");
    if (decay_rate > 1.0) throw InputError("decay_rate must be in [0, 1]");
    if (refrigeration_capex > 0.0 && !(seasons > 0.0)) throw InputError("seasons must be > 0 to amortize capex");
}

FleetParams FleetParams::from_kv(const KvConfig& kv) {
    kv.reject_unknown({"revenue_per_cell", "fuel_cost", "crew_cost", "vessel_speed", "spoilage_horizon", "decay_rate",
                       "refrigeration_capex", "seasons", "km_per_cell"});
    FleetParams p;
    p.revenue_per_cell = kv.get_double("revenue_per_cell", p.revenue_per_cell);
    p.fuel_cost = kv.get_double("fuel_cost", p.fuel_cost);
    p.crew_cost = kv.get_double("crew_cost", p.crew_cost);
    p.vessel_speed = kv.get_double("vessel_speed", p.vessel_speed);
    p.spoilage_horizon = kv.get_double("spoilage_horizon", p.spoilage_horizon);
    p.decay_rate = kv.get_double("decay_rate", p.decay_rate);
    p.refrigeration_capex = kv.get_double("refrigeration_capex", p.refrigeration_capex);
    p.seasons = kv.get_double("seasons", p.seasons);
    p.km_per_cell = kv.get_double("km_per_cell", p.km_per_cell);
    p.validate();
    return p;
}

KvConfig FleetParams::to_kv() const {
    KvConfig kv;
    kv.set("revenue_per_cell", text::format_double(revenue_per_cell));
    kv.set("fuel_cost", text::format_double(fuel_cost));
    kv.set("crew_cost", text::format_double(crew_cost));
    kv.set("vessel_speed", text::format_double(vessel_speed));
    kv.set("spoilage_horizon", text::format_double(spoilage_horizon));
    kv.set("decay_rate", text::format_double(decay_rate));
    kv.set("refrigeration_capex", text::format_double(refrigeration_capex));
    kv.set("seasons", text::format_double(seasons));
    kv.set("km_per_cell", text::format_double(km_per_cell));
    return kv;
}

ProfitBreakdown voyage_profit(double distance_km, const FleetParams& p, bool refrigerated) {
    if (!(distance_km >= 0.0)) throw InputError("voyage distance must be >= 0");
    p.validate();
    ProfitBreakdown b;
    b.sailing_days = 2.0 * distance_km / p.vessel_speed;
    b.revenue = p.revenue_per_cell;
    b.fuel = p.fuel_cost * 2.0 * distance_km;
    b.crew = p.crew_cost * b.sailing_days;
    if (refrigerated) {
        b.amortization = p.refrigeration_capex > 0.0 ? p.refrigeration_capex / p.seasons : 0.0;
    } else {
        const double late_days = std::max(0.0, distance_km / p.vessel_speed - p.spoilage_horizon);
        const double kept = std::max(0.0, 1.0 - p.decay_rate * late_days);
        b.spoilage = p.revenue_per_cell * (1.0 - kept);
    }
    b.net = b.revenue - b.fuel - b.crew - b.spoilage - b.amortization;
    return b;
}

std::vector<double> spoilage_kinks_km(const FleetParams& p) {
    std::vector<double> k{p.spoilage_horizon * p.vessel_speed};
    if (p.decay_rate > 0.0) k.push_back((p.spoilage_horizon + 1.0 / p.decay_rate) * p.vessel_speed);
    return k;
}

Sensitivity sensitivity(const FleetParams& p, double distance_km, bool refrigerated) {
    p.validate();
    const double time_step_km = kTimeStepDays * p.vessel_speed / 2.0;
    const double reach = std::max(kDistanceStepKm, time_step_km);
    if (distance_km - reach < 0.0)
        throw InputError("sensitivity: distance must exceed " + text::format_double(reach) +
                         " km so the stencil stays at non-negative distance");
    const bool spoils = !refrigerated && p.decay_rate > 0.0 && p.revenue_per_cell > 0.0;
    if (spoils)
        for (double kink : spoilage_kinks_km(p))
            if (std::abs(distance_km - kink) <= reach)
                throw InputError("sensitivity: distance " + text::format_double(distance_km) +
                                 " km is at the spoilage kink " + text::format_double(kink) +
                                 " km; offset by more than " + text::format_double(reach) + " km");

    const auto net = [&](double d) { return voyage_profit(d, p, refrigerated).net; };
    Sensitivity s;
    s.d_distance = (net(distance_km + kDistanceStepKm) - net(distance_km - kDistanceStepKm)) / (2.0 * kDistanceStepKm);
    // Sailing time T = 2 d / v, so d(T) = v T / 2.
    const double t0 = 2.0 * distance_km / p.vessel_speed;
    const auto net_t = [&](double t) { return net(p.vessel_speed * t / 2.0); };
    s.d_time = (net_t(t0 + kTimeStepDays) - net_t(t0 - kTimeStepDays)) / (2.0 * kTimeStepDays);

    double slope = -2.0 * p.fuel_cost - 2.0 * p.crew_cost / p.vessel_speed;
    if (spoils) {
        const auto kinks = spoilage_kinks_km(p);
        if (distance_km > kinks[0] && distance_km < kinks[1]) slope -= p.revenue_per_cell * p.decay_rate / p.vessel_speed;
    }
    s.d_distance_analytic = slope;
    s.d_time_analytic = slope * p.vessel_speed / 2.0;
    return s;
}

const char* to_string(StrategyOption o) {
    switch (o) {
        case StrategyOption::UpgradeVessels: return "upgrade_vessels";
        case StrategyOption::ReplaceFirms: return "replace_firms";
        case StrategyOption::Diversify: return "diversify";
    }
    return "?";
}

StrategyOption classify_distance(double distance_km, const Thresholds& t) {
    if (distance_km <= t.upgrade_km) return StrategyOption::UpgradeVessels;
    if (distance_km <= t.abandon_km) return StrategyOption::ReplaceFirms;
    return StrategyOption::Diversify;
}

std::vector<Recommendation> recommend(std::span<const YearPosition> track, eca::Coord home, const FleetParams& params,
                                      const Thresholds& thresholds) {
    if (track.empty()) throw InputError("recommend: empty trajectory");
    if (!(thresholds.upgrade_km < thresholds.abandon_km))
        throw InputError("recommend: upgrade threshold must be below the abandon threshold");
    params.validate();
    std::vector<Recommendation> out;
    out.reserve(track.size());
    for (const auto& y : track) {
        const double dr = y.row - home.i;
        const double dc = y.col - home.j;
        const double d = params.km_per_cell * std::sqrt(dr * dr + dc * dc);
        const double best = std::max(voyage_profit(d, params, true).net, voyage_profit(d, params, false).net);
        out.push_back({y.year, d, classify_distance(d, thresholds), best});
    }
    return out;
}

std::vector<YearPosition> centroid_track(const eca::Trajectory& traj, const std::string& species) {
    std::vector<YearPosition> out;
    const auto add = [&](int year, const eca::CellSpace& s) {
        const auto [r, c] = eca::centroid(s, species);
        out.push_back({year, r, c});
    };
    add(traj.initial.year(), traj.initial);
    for (const auto& snap : traj.snapshots) add(snap.year, snap.space);
    return out;
}

std::vector<YearPosition> centroid_track(const std::vector<eca::OccupancyRow>& rows, const std::string& species) {
    struct Acc {
        double r = 0, c = 0, n = 0;
    };
    std::map<int, Acc> by_year;
    for (const auto& row : rows) {
        if (row.species != species) continue;
        auto& a = by_year[row.year];
        a.r += static_cast<double>(row.at.i) * row.cells;
        a.c += static_cast<double>(row.at.j) * row.cells;
        a.n += row.cells;
    }
    std::vector<YearPosition> out;
    for (const auto& [year, a] : by_year)
        if (a.n > 0) out.push_back({year, a.r / a.n, a.c / a.n});
    if (out.empty()) throw InputError("no cells of species '" + species + "' in occupancy data");
    return out;
}

void write_recommendations_csv(const std::vector<Recommendation>& recs, const std::string& path) {
    std::ofstream out(path);
    if (!out) throw InputError("cannot write '" + path + "'");
    out << "year,distance_km,option,net_profit\n";
    for (const auto& r : recs)
        out << r.year << ',' << text::format_fixed(r.distance_km, 3) << ',' << to_string(r.option) << ','
            << text::format_fixed(r.net_profit, 2) << '\n';
    if (!out) throw InputError("write failed for '" + path + "'");
}

}  // namespace fishmig::econ
