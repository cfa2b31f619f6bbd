#pragma once

// Human-impact scenarios: a warming rate k scaled by a correction factor
// alpha drives yearly fields, and the automaton is run until a boundary
// predicate on the fish distribution holds.

#include <cstdint>
#include <optional>
#include <span>
#include <string>
#include <vector>

#include "fishmig/eca.hpp"
#include "fishmig/fishstats.hpp"
#include "fishmig/kv_config.hpp"
#include "fishmig/sst_data.hpp"

namespace fishmig::scenario {

/// Least-squares slope of temperature against year, in C/year.
double estimate_k(std::span<const double> years, std::span<const double> temps);
/// Same, for a series sampled once per year.
double estimate_k(std::span<const double> annual_series);

/// Baseline warmed uniformly by alpha * k * n on water; land untouched.
/// The result carries year n.
sst::GridField corrected_field(const sst::GridField& baseline, double k, double alpha, int n);

/// Baseline plus alpha times the forecast's departure from it.
sst::GridField corrected_forecast(const sst::GridField& baseline, const sst::GridField& forecast, double alpha);

struct BoundaryPredicate {
    enum class Kind {
        CentroidCross,   ///< species centroid column >= column
        FractionBeyond,  ///< share of species cells at column >= column is >= fraction
    };
    Kind kind = Kind::CentroidCross;
    std::string species = "herring";
    int column = 0;
    double fraction = 1.0;

    /// `centroid_cross:col=20:species=herring` or
    /// `fraction_beyond:col=20:species=herring:p=0.5`
    static BoundaryPredicate parse(const std::string& spec);
    std::string to_string() const;
    void validate(int cols) const;
    bool holds(const eca::CellSpace& space) const;
};

enum class FieldSource { Linear, Lstm };

/// Named correction factors: business_as_usual 1.0, mitigation 0.5,
/// aggressive_mitigation 0.25. Anything else must parse as a number.
double parse_alpha(const std::string& value);

struct ScenarioConfig {
    double alpha = 1.0;
    double k = 0.02;
    int horizon = 50;
    BoundaryPredicate predicate;
    FieldSource source = FieldSource::Linear;
    std::uint64_t seed = 1;
    eca::StepOptions step;

    sst::GridField baseline;              ///< year 0
    std::vector<sst::GridField> forecast; ///< years 1..horizon, FieldSource::Lstm only

    /// Reads alpha, k, horizon, predicate, field_source, seed, hop_budget,
    /// movement. Unknown keys are rejected.
    static ScenarioConfig from_kv(const KvConfig& kv);
    void validate() const;

    /// Field driving simulated year n (1-based).
    sst::GridField field_for_year(int n) const;
};

struct ElapsedTimeResult {
    std::optional<int> years;  ///< empty when not reached within the horizon
    eca::Trajectory trajectory;
};

ElapsedTimeResult elapsed_time(const ScenarioConfig& config, const eca::CellSpace& initial,
                               const fishstats::ProfileSet& profiles);

struct SweepRow {
    double alpha = 0.0;
    std::optional<int> years;
};

/// One independent simulation per alpha, run on worker threads; rows come
/// back in input order.
std::vector<SweepRow> sweep(const ScenarioConfig& base, std::span<const double> alphas, const eca::CellSpace& initial,
                            const fishstats::ProfileSet& profiles, unsigned threads = 0);

/// `alpha,years_elapsed`; unreached rows say `not_reached`.
void write_sweep_csv(const std::vector<SweepRow>& rows, const std::string& path);

}  // namespace fishmig::scenario
