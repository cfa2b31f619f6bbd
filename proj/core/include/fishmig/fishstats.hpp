#pragma once

// Thermal-tolerance profiles fitted from occurrence temperatures, and the
// normal-density movement probability used by the automaton.

#include <map>
#include <span>
#include <string>
#include <utility>
#include <vector>

namespace fishmig::fishstats {

struct Interval {
    double lo = 0.0;
    double hi = 0.0;

    /// Closed membership: the endpoints count as inside.
    bool contains(double t) const { return t >= lo && t <= hi; }
    double width() const { return hi - lo; }
};

struct OccurrenceRecord {
    std::string species;
    double sst_c = 0.0;
};

/// Normal thermal profile of a species. The most suitable temperature is
/// the mean; the livable band is mean +- 2 standard deviations.
struct FishProfile {
    std::string species;
    double mu = 0.0;
    double sigma = 1.0;

    double best_temp() const { return mu; }
    Interval livable() const;

    /// Throws InputError unless sigma > 0 and mu is finite.
    static FishProfile make(std::string species, double mu, double sigma);
};

using ProfileSet = std::map<std::string, FishProfile>;

struct NormalFit {
    double mu = 0.0;
    double sigma = 0.0;
};

/// Sample mean and sample standard deviation (n - 1 denominator).
NormalFit fit_normal(std::span<const double> samples);

Interval livable_range(double mu, double sigma);

double normal_pdf(double t, const FishProfile& p);
double normal_cdf(double t, const FishProfile& p);

/// Probability that a cell at temperature `t` leaves its grid:
/// the normal mass between t and the best temperature, over half the
/// total mass, i.e. 2 |F(t) - 1/2|, clamped to [0, 1].
double transition_probability(double t, const FishProfile& p);

struct QqResult {
    std::vector<std::pair<double, double>> points;  ///< (theoretical, empirical)
    double max_deviation = 0.0;
};

/// Sorted samples against fitted normal quantiles at (i - 0.5) / n.
QqResult qq_points(std::span<const double> samples);

/// Inverse standard normal CDF.
double standard_normal_quantile(double p);

std::vector<OccurrenceRecord> load_occurrences(const std::string& path);
void write_occurrences(const std::vector<OccurrenceRecord>& records, const std::string& path);

/// Groups by species (sorted by name) and fits each.
ProfileSet fit_profiles(const std::vector<OccurrenceRecord>& records);

/// `species,mu,sigma,tb,ts_lo,ts_hi`
void write_profiles(const ProfileSet& profiles, const std::string& path);
ProfileSet load_profiles(const std::string& path);

void write_qq_csv(const QqResult& qq, const std::string& path);

/// Reference herring and mackerel profiles from occurrence records.
FishProfile herring_profile();
FishProfile mackerel_profile();

}  // namespace fishmig::fishstats
