#include "fishmig/scenario.hpp"

#include <algorithm>
#include <cmath>
#include <fstream>
#include <future>
#include <limits>
#include <thread>

#include "fishmig/error.hpp"
#include "fishmig/text.hpp"

namespace fishmig::scenario {

double estimate_k(std::span<const double> years, std::span<const double> temps) {
    if (years.size() != temps.size()) throw InputError("estimate_k: years and temperatures differ in length");
    if (years.size() < 2) throw InputError("estimate_k: need at least 2 annual points");
    const double n = static_cast<double>(years.size());
    double mx = 0.0, my = 0.0;
    for (std::size_t k = 0; k < years.size(); ++k) {
        mx += years[k];
        my += temps[k];
    }
    mx /= n;
    my /= n;
    double sxy = 0.0, sxx = 0.0;
    for (std::size_t k = 0; k < years.size(); ++k) {
        sxy += (years[k] - mx) * (temps[k] - my);
        sxx += (years[k] - mx) * (years[k] - mx);
    }
    if (sxx == 0.0) throw InputError("estimate_k: all points share one year");
    return sxy / sxx;
}

double estimate_k(std::span<const double> annual_series) {
    std::vector<double> years(annual_series.size());
    for (std::size_t k = 0; k < years.size(); ++k) years[k] = static_cast<double>(k);
    return estimate_k(years, annual_series);
}

sst::GridField corrected_field(const sst::GridField& baseline, double k, double alpha, int n) {
    if (n < 0) throw InputError("corrected_field: year offset must be >= 0");
    const double shift = alpha * k * n;
    std::vector<double> temps(static_cast<std::size_t>(baseline.rows()) * baseline.cols(),
                              std::numeric_limits<double>::quiet_NaN());
    for (int i = 0; i < baseline.rows(); ++i)
        for (int j = 0; j < baseline.cols(); ++j)
            if (const auto t = baseline.temperature(i, j))
                temps[static_cast<std::size_t>(i) * baseline.cols() + j] = *t + shift;
    return sst::GridField(n, baseline.mask(), std::move(temps));
}

sst::GridField corrected_forecast(const sst::GridField& baseline, const sst::GridField& forecast, double alpha) {
    if (!(baseline.mask() == forecast.mask())) throw InputError("forecast field does not match the baseline grid");
    std::vector<double> temps(static_cast<std::size_t>(baseline.rows()) * baseline.cols(),
                              std::numeric_limits<double>::quiet_NaN());
    for (int i = 0; i < baseline.rows(); ++i)
        for (int j = 0; j < baseline.cols(); ++j)
            if (const auto t = baseline.temperature(i, j))
                temps[static_cast<std::size_t>(i) * baseline.cols() + j] = *t + alpha * (forecast.at(i, j) - *t);
    return sst::GridField(forecast.year(), baseline.mask(), std::move(temps));
}

// ---------------------------------------------------------------- predicate

BoundaryPredicate BoundaryPredicate::parse(const std::string& spec) {
    const auto parts = text::split(spec, ':');
    BoundaryPredicate p;
    const auto kind = text::trim(parts.front());
    if (kind == "centroid_cross")
        p.kind = Kind::CentroidCross;
    else if (kind == "fraction_beyond")
        p.kind = Kind::FractionBeyond;
    else
        throw InputError("unknown predicate kind '" + std::string(kind) + "'");
    bool have_col = false;
    for (std::size_t n = 1; n < parts.size(); ++n) {
        const auto eq = parts[n].find('=');
        if (eq == std::string_view::npos) throw InputError("predicate field '" + std::string(parts[n]) + "' lacks '='");
        const auto key = text::trim(parts[n].substr(0, eq));
        const auto val = text::trim(parts[n].substr(eq + 1));
        if (key == "col") {
            const auto c = text::parse_int(val);
            if (!c) throw InputError("predicate column is not an integer");
            p.column = static_cast<int>(*c);
            have_col = true;
        } else if (key == "species") {
            p.species = std::string(val);
        } else if (key == "p") {
            const auto f = text::parse_double(val);
            if (!f) throw InputError("predicate fraction is not a number");
            p.fraction = *f;
        } else {
            throw InputError("unknown predicate field '" + std::string(key) + "'");
        }
    }
    if (!have_col) throw InputError("predicate needs col=<column>");
    if (p.kind == Kind::CentroidCross && p.fraction != 1.0)
        throw InputError("centroid_cross does not take p=");
    return p;
}

std::string BoundaryPredicate::to_string() const {
    std::string s = kind == Kind::CentroidCross ? "centroid_cross" : "fraction_beyond";
    s += ":col=" + std::to_string(column) + ":species=" + species;
    if (kind == Kind::FractionBeyond) s += ":p=" + text::format_double(fraction);
    return s;
}

void BoundaryPredicate::validate(int cols) const {
    if (column < 0 || column >= cols)
        throw InputError("predicate column " + std::to_string(column) + " outside 0.." + std::to_string(cols - 1));
    if (!(fraction > 0.0 && fraction <= 1.0)) throw InputError("predicate fraction must be in (0, 1]");
    if (species.empty()) throw InputError("predicate species is empty");
}

bool BoundaryPredicate::holds(const eca::CellSpace& space) const {
    const auto pos = space.positions(species);
    if (pos.empty()) return false;
    if (kind == Kind::CentroidCross) return eca::centroid(space, species).second >= column;
    const auto beyond = std::count_if(pos.begin(), pos.end(), [&](const eca::Coord& c) { return c.j >= column; });
    return static_cast<double>(beyond) >= fraction * static_cast<double>(pos.size());
}

// ---------------------------------------------------------------- config

double parse_alpha(const std::string& value) {
    if (value == "business_as_usual") return 1.0;
    if (value == "mitigation") return 0.5;
    if (value == "aggressive_mitigation") return 0.25;
    const auto a = text::parse_double(value);
    if (!a) throw InputError("alpha '" + value + "' is neither a number nor a preset");
    if (!(*a >= 0.0) || !std::isfinite(*a)) throw InputError("alpha must be a finite value >= 0");
    return *a;
}

ScenarioConfig ScenarioConfig::from_kv(const KvConfig& kv) {
    kv.reject_unknown({"alpha", "k", "horizon", "predicate", "field_source", "seed", "hop_budget", "movement"});
    ScenarioConfig c;
    if (const auto a = kv.get("alpha")) c.alpha = parse_alpha(*a);
    c.k = kv.get_double("k", c.k);
    c.horizon = static_cast<int>(kv.get_int("horizon", c.horizon));
    if (const auto p = kv.get("predicate")) c.predicate = BoundaryPredicate::parse(*p);
    const auto src = kv.get_string("field_source", "linear");
    if (src == "linear")
        c.source = FieldSource::Linear;
    else if (src == "lstm")
        c.source = FieldSource::Lstm;
    else
        throw InputError("field_source must be linear or lstm, got '" + src + "'");
    const auto seed = kv.get_int("seed", 1);
    if (seed < 0) throw InputError("seed must be non-negative");
    c.seed = static_cast<std::uint64_t>(seed);
    c.step.hop_budget = static_cast<int>(kv.get_int("hop_budget", 1));
    const auto mv = kv.get_string("movement", "stochastic");
    if (mv == "stochastic")
        c.step.rule = eca::MovementRule::Stochastic;
    else if (mv == "always")
        c.step.rule = eca::MovementRule::Always;
    else
        throw InputError("movement must be stochastic or always, got '" + mv + "'");
    return c;
}

void ScenarioConfig::validate() const {
    // alpha = 0 is accepted as the frozen-climate limit.
    if (!(alpha >= 0.0) || !std::isfinite(alpha)) throw InputError("alpha must be >= 0");
    if (!std::isfinite(k)) throw InputError("k must be finite");
    if (horizon < 1) throw InputError("horizon must be >= 1");
    if (step.hop_budget < 1) throw InputError("hop_budget must be >= 1");
    predicate.validate(baseline.cols());
    if (source == FieldSource::Lstm && static_cast<int>(forecast.size()) < horizon)
        throw InputError("lstm field source needs forecast fields for years 1.." + std::to_string(horizon));
}

sst::GridField ScenarioConfig::field_for_year(int n) const {
    if (source == FieldSource::Linear) return corrected_field(baseline, k, alpha, n);
    const auto& f = forecast.at(static_cast<std::size_t>(n - 1));
    if (f.year() != n) throw InputError("forecast field list is missing year " + std::to_string(n));
    return corrected_forecast(baseline, f, alpha);
}

ElapsedTimeResult elapsed_time(const ScenarioConfig& config, const eca::CellSpace& initial,
                               const fishstats::ProfileSet& profiles) {
    config.validate();
    if (initial.year() != 0) throw InputError("scenario initial space must start at year 0");
    ElapsedTimeResult result;
    result.trajectory.initial = initial;
    if (config.predicate.holds(initial)) {
        result.years = 0;
        return result;
    }
    Rng rng(config.seed);
    result.trajectory.snapshots.reserve(static_cast<std::size_t>(config.horizon));
    const eca::CellSpace* current = &result.trajectory.initial;
    for (int n = 1; n <= config.horizon; ++n) {
        auto [space, report] = eca::step_year(*current, config.field_for_year(n), profiles, config.step, rng);
        result.trajectory.snapshots.push_back(eca::Snapshot{n, std::move(space), std::move(report)});
        current = &result.trajectory.snapshots.back().space;
        if (config.predicate.holds(*current)) {
            result.years = n;
            break;
        }
    }
    return result;
}

std::vector<SweepRow> sweep(const ScenarioConfig& base, std::span<const double> alphas, const eca::CellSpace& initial,
                            const fishstats::ProfileSet& profiles, unsigned threads) {
    if (threads == 0) threads = std::max(1u, std::thread::hardware_concurrency());
    std::vector<SweepRow> rows(alphas.size());
    for (std::size_t start = 0; start < alphas.size(); start += threads) {
        const std::size_t end = std::min(alphas.size(), start + threads);
        std::vector<std::future<std::optional<int>>> jobs;
        for (std::size_t n = start; n < end; ++n) {
            jobs.push_back(std::async(std::launch::async, [&, n] {
                ScenarioConfig cfg = base;
                cfg.alpha = alphas[n];
                return elapsed_time(cfg, initial, profiles).years;
            }));
        }
        for (std::size_t n = start; n < end; ++n) rows[n] = SweepRow{alphas[n], jobs[n - start].get()};
    }
    return rows;
}

void write_sweep_csv(const std::vector<SweepRow>& rows, const std::string& path) {
    std::ofstream out(path);
    if (!out) throw InputError("cannot write '" + path + "'");
    out << "alpha,years_elapsed\n";
    for (const auto& r : rows) {
        out << text::format_double(r.alpha) << ',';
        if (r.years)
            out << *r.years;
        else
            out << "not_reached";
        out << '\n';
    }
    if (!out) throw InputError("write failed for '" + path + "'");
}

}  // namespace fishmig::scenario
