#include "fishmig/fishstats.hpp"

#include <algorithm>
#include <cmath>
#include <fstream>
#include <numbers>

#include "fishmig/error.hpp"
#include "fishmig/text.hpp"

namespace fishmig::fishstats {

Interval FishProfile::livable() const { return livable_range(mu, sigma); }

FishProfile FishProfile::make(std::string species, double mu, double sigma) {
    if (!std::isfinite(mu)) throw InputError("profile '" + species + "': mean is not finite");
    if (!(sigma > 0.0) || !std::isfinite(sigma))
        throw InputError("profile '" + species + "': sigma must be > 0");
    return FishProfile{std::move(species), mu, sigma};
}

NormalFit fit_normal(std::span<const double> samples) {
    if (samples.size() < 2) throw InputError("fit_normal: need at least 2 samples");
    // Two-pass for accuracy on large, tightly clustered samples.
    double mean = 0.0;
    for (double x : samples) mean += x;
    mean /= static_cast<double>(samples.size());
    double ss = 0.0;
    for (double x : samples) ss += (x - mean) * (x - mean);
    const double sigma = std::sqrt(ss / static_cast<double>(samples.size() - 1));
    if (!(sigma > 0.0)) throw InputError("fit_normal: samples have zero variance");
    return {mean, sigma};
}

Interval livable_range(double mu, double sigma) {
    if (!(sigma > 0.0)) throw InputError("livable_range: sigma must be > 0");
    return {mu - 2.0 * sigma, mu + 2.0 * sigma};
}

double normal_pdf(double t, const FishProfile& p) {
    const double z = (t - p.mu) / p.sigma;
    return std::exp(-0.5 * z * z) / (std::sqrt(2.0 * std::numbers::pi) * p.sigma);
}

double normal_cdf(double t, const FishProfile& p) {
    return 0.5 * std::erfc(-(t - p.mu) / (p.sigma * std::numbers::sqrt2));
}

double transition_probability(double t, const FishProfile& p) {
    // |F(t) - F(mu)| = erf(|z| / sqrt2) / 2; keeping erf avoids cancellation near mu.
    const double z = std::abs(t - p.mu) / p.sigma;
    return std::clamp(std::erf(z / std::numbers::sqrt2), 0.0, 1.0);
}

double standard_normal_quantile(double p) {
    if (!(p > 0.0 && p < 1.0)) throw InputError("normal quantile requires 0 < p < 1");
    // Acklam's rational approximation, refined by one Halley step on erfc.
    static constexpr double a[] = {-3.969683028665376e+01, 2.209460984245205e+02, -2.759285104469687e+02,
                                   1.383577518672690e+02,  -3.066479806614716e+01, 2.506628277459239e+00};
    static constexpr double b[] = {-5.447609879822406e+01, 1.615858368580409e+02, -1.556989798598866e+02,
                                   6.680131188771972e+01,  -1.328068155288572e+01};
    static constexpr double c[] = {-7.784894002430293e-03, -3.223964580411365e-01, -2.400758277161838e+00,
                                   -2.549732539343734e+00, 4.374664141464968e+00,  2.938163982698783e+00};
    static constexpr double d[] = {7.784695709041462e-03, 3.224671290700398e-01, 2.445134137142996e+00,
                                   3.754408661907416e+00};
    constexpr double plow = 0.02425;
    double x;
    if (p < plow) {
        const double q = std::sqrt(-2.0 * std::log(p));
        x = (((((c[0] * q + c[1]) * q + c[2]) * q + c[3]) * q + c[4]) * q + c[5]) /
            ((((d[0] * q + d[1]) * q + d[2]) * q + d[3]) * q + 1.0);
    } else if (p <= 1.0 - plow) {
        const double q = p - 0.5;
        const double r = q * q;
        x = (((((a[0] * r + a[1]) * r + a[2]) * r + a[3]) * r + a[4]) * r + a[5]) * q /
            (((((b[0] * r + b[1]) * r + b[2]) * r + b[3]) * r + b[4]) * r + 1.0);
    } else {
        const double q = std::sqrt(-2.0 * std::log(1.0 - p));
        x = -(((((c[0] * q + c[1]) * q + c[2]) * q + c[3]) * q + c[4]) * q + c[5]) /
            ((((d[0] * q + d[1]) * q + d[2]) * q + d[3]) * q + 1.0);
    }
    const double e = 0.5 * std::erfc(-x / std::numbers::sqrt2) - p;
    const double u = e * std::sqrt(2.0 * std::numbers::pi) * std::exp(0.5 * x * x);
    return x - u / (1.0 + 0.5 * x * u);
}

QqResult qq_points(std::span<const double> samples) {
    if (samples.size() < 3) throw InputError("qq_points: need at least 3 samples");
    const auto fit = fit_normal(samples);
    std::vector<double> sorted(samples.begin(), samples.end());
    std::sort(sorted.begin(), sorted.end());
    const double n = static_cast<double>(sorted.size());
    QqResult out;
    out.points.reserve(sorted.size());
    for (std::size_t k = 0; k < sorted.size(); ++k) {
        const double q = standard_normal_quantile((static_cast<double>(k) + 0.5) / n);
        const double theo = fit.mu + fit.sigma * q;
        out.points.emplace_back(theo, sorted[k]);
        out.max_deviation = std::max(out.max_deviation, std::abs(sorted[k] - theo));
    }
    return out;
}

std::vector<OccurrenceRecord> load_occurrences(const std::string& path) {
    const auto lines = text::read_lines(path);
    if (lines.empty() || text::trim(lines.front()) != "species,sst_c")
        throw ParseError(path, 1, "expected header species,sst_c");
    std::vector<OccurrenceRecord> out;
    for (std::size_t n = 1; n < lines.size(); ++n) {
        if (text::trim(lines[n]).empty()) continue;
        const auto f = text::split(lines[n], ',');
        if (f.size() != 2) throw ParseError(path, n + 1, "expected 2 fields");
        const auto species = text::trim(f[0]);
        const auto t = text::parse_double(f[1]);
        if (species.empty()) throw ParseError(path, n + 1, "empty species tag");
        if (!t || !std::isfinite(*t)) throw ParseError(path, n + 1, "malformed temperature");
        out.push_back({std::string(species), *t});
    }
    return out;
}

void write_occurrences(const std::vector<OccurrenceRecord>& records, const std::string& path) {
    std::ofstream out(path);
    if (!out) throw InputError("cannot write '" + path + "'");
    out << "species,sst_c\n";
    for (const auto& r : records) out << r.species << ',' << text::format_double(r.sst_c) << '\n';
}

ProfileSet fit_profiles(const std::vector<OccurrenceRecord>& records) {
    std::map<std::string, std::vector<double>> grouped;
    for (const auto& r : records) grouped[r.species].push_back(r.sst_c);
    ProfileSet out;
    for (const auto& [species, temps] : grouped) {
        NormalFit fit;
        try {
            fit = fit_normal(temps);
        } catch (const InputError& e) {
            throw InputError("species '" + species + "': " + e.what());
        }
        out.emplace(species, FishProfile::make(species, fit.mu, fit.sigma));
    }
    return out;
}

void write_profiles(const ProfileSet& profiles, const std::string& path) {
    std::ofstream out(path);
    if (!out) throw InputError("cannot write '" + path + "'");
    out << "species,mu,sigma,tb,ts_lo,ts_hi\n";
    for (const auto& [name, p] : profiles) {
        const auto band = p.livable();
        out << name << ',' << text::format_double(p.mu) << ',' << text::format_double(p.sigma) << ','
            << text::format_double(p.best_temp()) << ',' << text::format_double(band.lo) << ','
            << text::format_double(band.hi) << '\n';
    }
}

ProfileSet load_profiles(const std::string& path) {
    const auto lines = text::read_lines(path);
    if (lines.empty() || text::trim(lines.front()) != "species,mu,sigma,tb,ts_lo,ts_hi")
        throw ParseError(path, 1, "expected header species,mu,sigma,tb,ts_lo,ts_hi");
    ProfileSet out;
    for (std::size_t n = 1; n < lines.size(); ++n) {
        if (text::trim(lines[n]).empty()) continue;
        const auto f = text::split(lines[n], ',');
        if (f.size() != 6) throw ParseError(path, n + 1, "expected 6 fields");
        const auto mu = text::parse_double(f[1]);
        const auto sigma = text::parse_double(f[2]);
        if (!mu || !sigma) throw ParseError(path, n + 1, "malformed number");
        try {
            auto p = FishProfile::make(std::string(text::trim(f[0])), *mu, *sigma);
            if (!out.emplace(p.species, p).second) throw InputError("duplicate species '" + p.species + "'");
        } catch (const InputError& e) {
            throw ParseError(path, n + 1, e.what());
        }
    }
    return out;
}

void write_qq_csv(const QqResult& qq, const std::string& path) {
    std::ofstream out(path);
    if (!out) throw InputError("cannot write '" + path + "'");
    out << "theoretical,empirical\n";
    for (const auto& [t, e] : qq.points) out << text::format_double(t) << ',' << text::format_double(e) << '\n';
}

FishProfile herring_profile() { return FishProfile::make("herring", 10.397, 0.010); }
FishProfile mackerel_profile() { return FishProfile::make("mackerel", 10.304, 0.119); }

}  // namespace fishmig::fishstats
