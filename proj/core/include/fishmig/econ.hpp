#pragma once

// Fleet economics: per-voyage profit as a piecewise-linear function of
// sailing distance, its sensitivities, and the yearly strategy choice
// between upgrading vessels, replacing firms, and diversifying.

#include <span>
#include <string>
#include <vector>

#include "fishmig/eca.hpp"
#include "fishmig/kv_config.hpp"

namespace fishmig::econ {

struct FleetParams {
    double revenue_per_cell = 1000.0;   ///< currency per harvested cell
    double fuel_cost = 0.5;             ///< currency per km
    double crew_cost = 100.0;           ///< currency per day at sea
    double vessel_speed = 200.0;        ///< km per day
    double spoilage_horizon = 2.0;      ///< days of return leg before unrefrigerated catch decays
    double decay_rate = 0.25;           ///< value fraction lost per day past the horizon
    double refrigeration_capex = 600.0; ///< one-time cost, amortized over `seasons`
    double seasons = 10.0;
    double km_per_cell = 111.1;         ///< 1 degree of latitude

    void validate() const;
    /// Unknown keys are rejected; missing keys keep the defaults above.
    static FleetParams from_kv(const KvConfig& kv);
    KvConfig to_kv() const;
};

struct ProfitBreakdown {
    double sailing_days = 0.0;
    double revenue = 0.0;
    double fuel = 0.0;
    double crew = 0.0;
    double spoilage = 0.0;
    double amortization = 0.0;
    double net = 0.0;  ///< revenue - fuel - crew - spoilage - amortization
};

/// Round trip of `distance_km` each way. Throws InputError for negative distance.
ProfitBreakdown voyage_profit(double distance_km, const FleetParams& params, bool refrigerated);

/// Distances where the unrefrigerated net changes slope: the return leg
/// reaching the spoilage horizon, and the catch value reaching zero.
std::vector<double> spoilage_kinks_km(const FleetParams& params);

struct Sensitivity {
    double d_distance = 0.0;           ///< central difference, step 1e-3 km
    double d_time = 0.0;               ///< central difference, step 1e-3 days of sailing
    double d_distance_analytic = 0.0;
    double d_time_analytic = 0.0;
};

inline constexpr double kDistanceStepKm = 1e-3;
inline constexpr double kTimeStepDays = 1e-3;

/// Partials of net profit with respect to one-way distance and total
/// sailing time (at fixed speed). Throws InputError when a difference
/// stencil would straddle a kink or reach below zero distance.
Sensitivity sensitivity(const FleetParams& params, double distance_km, bool refrigerated);

enum class StrategyOption { UpgradeVessels, ReplaceFirms, Diversify };
const char* to_string(StrategyOption o);

struct Thresholds {
    double upgrade_km = 333.0;
    double abandon_km = 999.0;
};

struct YearPosition {
    int year = 0;
    double row = 0.0;
    double col = 0.0;
};

struct Recommendation {
    int year = 0;
    double distance_km = 0.0;
    StrategyOption option = StrategyOption::UpgradeVessels;
    double net_profit = 0.0;  ///< better of refrigerated and plain voyages at that distance
};

StrategyOption classify_distance(double distance_km, const Thresholds& t);

std::vector<Recommendation> recommend(std::span<const YearPosition> track, eca::Coord home, const FleetParams& params,
                                      const Thresholds& thresholds);

/// Species centroid per year, including the initial state.
std::vector<YearPosition> centroid_track(const eca::Trajectory& traj, const std::string& species);
std::vector<YearPosition> centroid_track(const std::vector<eca::OccupancyRow>& rows, const std::string& species);

/// `year,distance_km,option,net_profit`
void write_recommendations_csv(const std::vector<Recommendation>& recs, const std::string& path);

}  // namespace fishmig::econ
