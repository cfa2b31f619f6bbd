#include "fishmig/tdf.hpp"

#include <cmath>
#include <fstream>

#include "fishmig/error.hpp"
#include "fishmig/text.hpp"

namespace fishmig::tdf {

void TdfConfig::validate() const {
    if (adjacent < 1) throw InputError("tdf: adjacent window (l_x) must be >= 1");
    if (seasonal < 0) throw InputError("tdf: seasonal window (l_y) must be >= 0");
    if (samples_per_year < 1) throw InputError("tdf: samples_per_year must be >= 1");
    if (lookback < adjacent) throw InputError("tdf: lookback must cover the adjacent window");
    if ((seasonal + 1) / 2 > samples_per_year)
        throw InputError("tdf: seasonal window would reach the target sample");
    const int seasonal_reach = samples_per_year + (seasonal + 1) / 2;
    if (seasonal > 0 && lookback < seasonal_reach)
        throw InputError("tdf: lookback " + std::to_string(lookback) + " must be >= " +
                         std::to_string(seasonal_reach) + " to cover the seasonal window");
}

FeatureVector build_features(std::span<const double> series, std::size_t target_index, const TdfConfig& cfg) {
    cfg.validate();
    if (target_index >= series.size())
        throw InputError("tdf: target index " + std::to_string(target_index) + " beyond series of length " +
                         std::to_string(series.size()));
    if (target_index < static_cast<std::size_t>(cfg.lookback))
        throw InputError("tdf: insufficient history, need lookback " + std::to_string(cfg.lookback) +
                         " but only " + std::to_string(target_index) + " samples precede the target");

    FeatureVector out;
    out.reserve(cfg.feature_length());
    for (std::size_t k = target_index - cfg.adjacent; k < target_index; ++k) out.push_back(series[k]);

    // Seasonal window: floor(l_y/2) samples before the point one period back,
    // ceil(l_y/2) - 1 after it.
    const auto centre = static_cast<std::ptrdiff_t>(target_index) - cfg.samples_per_year;
    const auto first = centre - cfg.seasonal / 2;
    for (std::ptrdiff_t k = first; k < first + cfg.seasonal; ++k) out.push_back(series[static_cast<std::size_t>(k)]);

    for (double v : out)
        if (!std::isfinite(v)) throw InputError("tdf: non-finite sample in feature window");
    return out;
}

std::vector<TrainingPair> make_dataset(std::span<const double> series, const TdfConfig& cfg) {
    cfg.validate();
    if (series.size() <= static_cast<std::size_t>(cfg.lookback))
        throw InputError("tdf: series of length " + std::to_string(series.size()) +
                         " is too short for lookback " + std::to_string(cfg.lookback));
    std::vector<TrainingPair> pairs;
    pairs.reserve(series.size() - cfg.lookback);
    for (std::size_t t = cfg.lookback; t < series.size(); ++t)
        pairs.push_back(TrainingPair{build_features(series, t, cfg), series[t], t});
    return pairs;
}

void write_dataset_csv(const std::vector<TrainingPair>& pairs, const std::string& path) {
    std::ofstream out(path);
    if (!out) throw InputError("cannot write '" + path + "'");
    const std::size_t k = pairs.empty() ? 0 : pairs.front().features.size();
    for (std::size_t c = 0; c < k; ++c) out << 'f' << (c + 1) << ',';
    out << "target\n";
    for (const auto& p : pairs) {
        for (double f : p.features) out << text::format_double(f) << ',';
        out << text::format_double(p.target) << '\n';
    }
}

}  // namespace fishmig::tdf
