#pragma once

// Time-domain feature vectors: an adjacent window of the samples right
// before the target, followed by a seasonal window centred on the same
// point one period earlier.

#include <cstddef>
#include <span>
#include <string>
#include <vector>

namespace fishmig::tdf {

struct TdfConfig {
    int lookback = 14;          ///< l: history the target needs, in samples
    int adjacent = 6;           ///< l_x: samples immediately preceding the target
    int seasonal = 3;           ///< l_y: samples centred one period back
    int samples_per_year = 12;  ///< 12 for monthly data, 1 for one-month-per-year series

    static TdfConfig monthly() { return {14, 6, 3, 12}; }
    static TdfConfig annual() { return {7, 6, 1, 1}; }

    std::size_t feature_length() const { return static_cast<std::size_t>(adjacent + seasonal); }

    /// Throws InputError when the windows do not fit inside the lookback.
    void validate() const;
};

using FeatureVector = std::vector<double>;

struct TrainingPair {
    FeatureVector features;
    double target = 0.0;
    std::size_t target_index = 0;
};

/// Features for the sample at `target_index`. Throws InputError if fewer
/// than `lookback` samples precede it.
FeatureVector build_features(std::span<const double> series, std::size_t target_index, const TdfConfig& cfg);

/// One pair per target index in [lookback, size).
std::vector<TrainingPair> make_dataset(std::span<const double> series, const TdfConfig& cfg);

/// `f1..fk,target` export.
void write_dataset_csv(const std::vector<TrainingPair>& pairs, const std::string& path);

}  // namespace fishmig::tdf
