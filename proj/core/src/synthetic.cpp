#include "fishmig/synthetic.hpp"

#include <cmath>
#include <numbers>

#include "fishmig/error.hpp"
#include "fishmig/rng.hpp"

namespace fishmig::synthetic {

std::vector<double> annual_series(int n, const SeriesShape& s, std::uint64_t seed) {
    if (n < 0) throw InputError("series length must be >= 0");
    Rng rng(seed);
    std::vector<double> out(static_cast<std::size_t>(n));
    for (int t = 0; t < n; ++t)
        out[static_cast<std::size_t>(t)] = s.base_c + s.trend_per_year * t +
                                           s.amplitude_c * std::sin(2.0 * std::numbers::pi * t / s.period_years) +
                                           rng.normal(0.0, s.noise_sd);
    return out;
}

sst::LandMask default_land_mask(int rows, int cols) {
    auto mask = sst::LandMask::all_water(rows, cols);
    const auto fill = [&](int i0, int i1, int j0, int j1) {
        for (int i = i0; i <= i1; ++i)
            for (int j = j0; j <= j1; ++j)
                if (mask.in_bounds(i, j)) mask.set_land(i, j, true);
    };
    // Iceland (west), Norway (east coast), Scotland (south-east corner).
    fill(rows / 4, rows / 4 + 2, 1, 4);
    for (int i = 0; i < rows * 3 / 4; ++i) fill(i, i, cols - 3 + (i % 2 == 0 ? 0 : 1), cols - 1);
    fill(rows - 3, rows - 1, cols * 3 / 5, cols * 3 / 5 + 3);
    return mask;
}

sst::SstSeriesStore sst_archive(const ArchiveSpec& spec, std::uint64_t seed) {
    spec.extent.validate();
    if (spec.years < 1) throw InputError("archive needs at least one year");
    Rng rng(seed);
    sst::SstSeriesStore store;
    const double south = spec.extent.north_lat - spec.extent.rows;
    for (int vi = 0; vi <= spec.extent.rows; ++vi)
        for (int vj = 0; vj <= spec.extent.cols; ++vj) {
            const double lat = spec.extent.north_lat - vi;
            const double lon = spec.extent.west_lon + vj;
            // ~12.5 C in the south down to ~6 C in the north, slightly warmer eastward.
            const double base = 12.5 - 0.5 * (lat - south) + 0.02 * vj;
            const double phase = 0.1 * vj;
            for (int y = 0; y < spec.years; ++y)
                for (int m : spec.months) {
                    const double seasonal = -2.5 * (1.0 - std::cos(2.0 * std::numbers::pi * (m - 8) / 12.0));
                    double t = base + seasonal + spec.shape.trend_per_year * y +
                               spec.shape.amplitude_c *
                                   std::sin(2.0 * std::numbers::pi * y / spec.shape.period_years + phase) +
                               rng.normal(0.0, spec.shape.noise_sd);
                    t = std::round(t * 1000.0) / 1000.0;
                    store.insert(sst::SstRecord{spec.first_year + y, m, lat, lon, t});
                }
        }
    return store;
}

std::vector<fishstats::OccurrenceRecord> occurrences(const fishstats::ProfileSet& profiles, int per_species,
                                                     std::uint64_t seed) {
    Rng rng(seed);
    std::vector<fishstats::OccurrenceRecord> out;
    out.reserve(profiles.size() * static_cast<std::size_t>(std::max(per_species, 0)));
    for (const auto& [name, p] : profiles)
        for (int k = 0; k < per_species; ++k) out.push_back({name, rng.normal(p.mu, p.sigma)});
    return out;
}

eca::CellSpace seeding(const sst::LandMask& mask, const std::map<std::string, int>& counts, std::uint64_t seed) {
    Rng rng(seed);
    eca::CellSpace space(mask);
    std::vector<eca::Coord> water;
    for (int i = 0; i < mask.rows(); ++i)
        for (int j = 0; j < mask.cols(); ++j)
            if (!mask.is_land(i, j)) water.push_back({i, j});
    for (const auto& [species, count] : counts)
        for (int k = 0; k < count; ++k) {
            std::vector<eca::Coord> open;
            for (const auto& c : water)
                if (space.grid(c).occupancy() < eca::kMaxCellsPerGrid) open.push_back(c);
            if (open.empty()) throw InputError("seeding: more cells than grid capacity");
            space.add_cell(open[rng.below(open.size())], species);
        }
    return space;
}

StripFixture gradient_strip(double alpha) {
    StripFixture f;
    const auto herring = fishstats::herring_profile();
    f.profiles.emplace(herring.species, herring);
    const auto mask = sst::LandMask::all_water(1, 10);
    std::vector<double> temps(10);
    for (int j = 0; j < 10; ++j) temps[static_cast<std::size_t>(j)] = herring.best_temp() + (2 - j) * 1.0;
    f.baseline = sst::GridField(0, mask, temps);
    f.initial = eca::CellSpace(mask);
    f.initial.add_cell({0, 2}, herring.species);
    f.initial.add_cell({0, 2}, herring.species);
    f.initial.apply_field(f.baseline);
    f.config.alpha = alpha;
    f.config.k = 1.0;
    f.config.horizon = 50;
    f.config.predicate = scenario::BoundaryPredicate{scenario::BoundaryPredicate::Kind::CentroidCross,
                                                     herring.species, 5, 1.0};
    f.config.source = scenario::FieldSource::Linear;
    f.config.seed = 7;
    f.config.step = eca::StepOptions{1, eca::MovementRule::Always};
    f.config.baseline = f.baseline;
    return f;
}

}  // namespace fishmig::synthetic
