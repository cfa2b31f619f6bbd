#pragma once

// Seeded generators for every fixture dataset: SST archives, occurrence
// samples, seeding layouts, and the 1 x 10 gradient strip used to check
// the scenario timing rule.

#include <cstdint>
#include <map>
#include <string>
#include <vector>

#include "fishmig/eca.hpp"
#include "fishmig/fishstats.hpp"
#include "fishmig/scenario.hpp"
#include "fishmig/sst_data.hpp"

namespace fishmig::synthetic {

struct SeriesShape {
    double base_c = 10.0;
    double trend_per_year = 0.02;
    double amplitude_c = 0.3;
    double period_years = 20.0;
    double noise_sd = 0.1;
};

/// base + trend * t + amplitude * sin(2 pi t / period) + N(0, noise_sd), t = 0..n-1.
std::vector<double> annual_series(int n, const SeriesShape& shape, std::uint64_t seed);

/// North Atlantic-like layout: land to the west, east and south-east.
sst::LandMask default_land_mask(int rows = 13, int cols = 27);

struct ArchiveSpec {
    sst::MapExtent extent;
    int first_year = 1870;
    int years = 150;
    std::vector<int> months{8};
    SeriesShape shape{};  ///< base_c is replaced by the latitude/longitude gradient
};

/// Samples at every corner vertex of the extent. August is the seasonal
/// peak; other months are cooler.
sst::SstSeriesStore sst_archive(const ArchiveSpec& spec, std::uint64_t seed);

std::vector<fishstats::OccurrenceRecord> occurrences(const fishstats::ProfileSet& profiles, int per_species,
                                                     std::uint64_t seed);

/// Cells placed uniformly over water grids, respecting the occupancy cap.
eca::CellSpace seeding(const sst::LandMask& mask, const std::map<std::string, int>& counts, std::uint64_t seed);

/// 1 x 10 strip whose temperature falls by 1 C per column eastward, with
/// the herring optimum at column 2 in year 0. With k = 1 C/year and
/// alpha = 1 the livable column moves one step east per year.
struct StripFixture {
    sst::GridField baseline;
    eca::CellSpace initial;
    fishstats::ProfileSet profiles;
    scenario::ScenarioConfig config;
};
StripFixture gradient_strip(double alpha = 1.0);

}  // namespace fishmig::synthetic
