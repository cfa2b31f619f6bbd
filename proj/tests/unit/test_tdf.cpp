#include <gtest/gtest.h>

#include <numeric>

#include "fishmig/error.hpp"
#include "fishmig/rng.hpp"
#include "fishmig/tdf.hpp"

using namespace fishmig::tdf;

namespace {

std::vector<double> ramp(int n) {
    std::vector<double> s(n);
    std::iota(s.begin(), s.end(), 0.0);
    return s;
}

}  // namespace

TEST(Tdf, PreviousSampleOnly) {
    const auto s = ramp(31);
    const TdfConfig cfg{13, 1, 0, 12};
    EXPECT_EQ(build_features(s, 20, cfg), (FeatureVector{19}));
}

TEST(Tdf, AdjacentThenSeasonal) {
    const auto s = ramp(31);
    const TdfConfig cfg{13, 2, 1, 12};
    EXPECT_EQ(build_features(s, 20, cfg), (FeatureVector{18, 19, 8}));
}

TEST(Tdf, SeasonalWindowCentredOnePeriodBack) {
    const auto s = ramp(40);
    const auto f = build_features(s, 30, TdfConfig::monthly());
    // 6 adjacent (24..29) then 3 seasonal centred on 18 (17, 18, 19).
    EXPECT_EQ(f, (FeatureVector{24, 25, 26, 27, 28, 29, 17, 18, 19}));
}

TEST(Tdf, AnnualSeasonalCollapsesToPreviousYear) {
    const auto s = ramp(20);
    const auto f = build_features(s, 10, TdfConfig::annual());
    EXPECT_EQ(f, (FeatureVector{4, 5, 6, 7, 8, 9, 9}));
}

TEST(Tdf, InsufficientHistory) {
    const auto s = ramp(31);
    try {
        build_features(s, 5, TdfConfig{13, 1, 0, 12});
        FAIL();
    } catch (const fishmig::InputError& e) {
        EXPECT_NE(std::string(e.what()).find("13"), std::string::npos);
    }
}

TEST(Tdf, ConfigValidation) {
    EXPECT_NO_THROW(TdfConfig::monthly().validate());
    EXPECT_NO_THROW(TdfConfig::annual().validate());
    EXPECT_THROW((TdfConfig{14, 0, 3, 12}.validate()), fishmig::InputError);
    EXPECT_THROW((TdfConfig{14, 6, -1, 12}.validate()), fishmig::InputError);
    EXPECT_THROW((TdfConfig{5, 6, 0, 12}.validate()), fishmig::InputError);
    EXPECT_THROW((TdfConfig{13, 6, 3, 12}.validate()), fishmig::InputError);
}

TEST(Tdf, DatasetCount) {
    const auto pairs = make_dataset(ramp(20), TdfConfig{13, 1, 0, 12});
    ASSERT_EQ(pairs.size(), 7u);
    for (std::size_t k = 0; k < pairs.size(); ++k) {
        EXPECT_EQ(pairs[k].target_index, 13 + k);
        EXPECT_DOUBLE_EQ(pairs[k].target, 13.0 + k);
    }
}

TEST(Tdf, DatasetTooShort) {
    EXPECT_THROW(make_dataset(ramp(13), TdfConfig{13, 1, 0, 12}), fishmig::InputError);
}

TEST(Tdf, ConstantSeriesPropagates) {
    const std::vector<double> s(40, 9.25);
    for (const auto& p : make_dataset(s, TdfConfig::monthly())) {
        EXPECT_DOUBLE_EQ(p.target, 9.25);
        for (double f : p.features) EXPECT_DOUBLE_EQ(f, 9.25);
    }
}

TEST(Tdf, MonotoneSeriesTargetsExceedAdjacent) {
    const auto s = ramp(50);
    const auto cfg = TdfConfig::monthly();
    for (const auto& p : make_dataset(s, cfg)) {
        for (int k = 0; k < cfg.adjacent; ++k) EXPECT_GT(p.target, p.features[k]);
    }
}

// Feature length and shift equivariance over random configs and series.
TEST(TdfProperty, LengthAndShiftEquivariance) {
    fishmig::Rng rng(2024);
    for (int trial = 0; trial < 200; ++trial) {
        const int period = rng.below(2) ? 12 : 1;
        const int seasonal = static_cast<int>(rng.below(4));
        const int adjacent = 1 + static_cast<int>(rng.below(8));
        const int need = seasonal > 0 ? period + (seasonal + 1) / 2 : 0;
        if ((seasonal + 1) / 2 > period) continue;
        const int lookback = std::max(adjacent, need) + static_cast<int>(rng.below(3));
        const TdfConfig cfg{lookback, adjacent, seasonal, period};
        cfg.validate();
        const int n = lookback + 1 + static_cast<int>(rng.below(30));
        std::vector<double> s(n), shifted(n);
        const double c = rng.uniform(-5, 5);
        for (int k = 0; k < n; ++k) {
            s[k] = rng.normal(10, 2);
            shifted[k] = s[k] + c;
        }
        const auto a = make_dataset(s, cfg);
        const auto b = make_dataset(shifted, cfg);
        ASSERT_EQ(a.size(), static_cast<std::size_t>(n - lookback));
        for (std::size_t k = 0; k < a.size(); ++k) {
            ASSERT_EQ(a[k].features.size(), cfg.feature_length());
            EXPECT_NEAR(b[k].target - a[k].target, c, 1e-12);
            for (std::size_t f = 0; f < a[k].features.size(); ++f) {
                EXPECT_NEAR(b[k].features[f] - a[k].features[f], c, 1e-12);
            }
        }
    }
}
