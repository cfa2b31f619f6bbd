#include "fishmig/sst_data.hpp"

#include <algorithm>
#include <cctype>
#include <cmath>
#include <filesystem>
#include <fstream>
#include <limits>
#include <set>
#include <sstream>
#include <stdexcept>

#include "fishmig/error.hpp"
#include "fishmig/text.hpp"

namespace fishmig::sst {

namespace {

constexpr double kLatticeTol = 1e-9;

std::optional<int> to_half_units(double deg) {
    const double twice = deg * 2.0;
    const double r = std::round(twice);
    if (!std::isfinite(deg) || std::abs(twice - r) > kLatticeTol) return std::nullopt;
    return static_cast<int>(r);
}

std::string cell_name(int i, int j) {
    return "(" + std::to_string(i) + ", " + std::to_string(j) + ")";
}

}  // namespace

Vertex Vertex::from_degrees(double lat, double lon) {
    const auto la = to_half_units(lat);
    const auto lo = to_half_units(lon);
    if (!la || !lo)
        throw InputError("coordinate (" + text::format_double(lat) + ", " + text::format_double(lon) +
                         ") is not on the 0.5 degree lattice");
    if (lat < -90.0 || lat > 90.0 || lon < -180.0 || lon > 360.0)
        throw InputError("coordinate (" + text::format_double(lat) + ", " + text::format_double(lon) +
                         ") is out of range");
    return Vertex{*la, *lo};
}

// ---------------------------------------------------------------- store

void SstSeriesStore::insert(const SstRecord& rec) {
    insert(Vertex::from_degrees(rec.lat, rec.lon), Sample{rec.year, rec.month, rec.temp_c});
}

void SstSeriesStore::insert(Vertex v, Sample s) {
    if (s.month < 1 || s.month > 12)
        throw InputError("month " + std::to_string(s.month) + " outside 1..12");
    if (!std::isfinite(s.temp_c) || s.temp_c < kMinSaneTemp || s.temp_c > kMaxSaneTemp)
        throw InputError("temperature " + text::format_double(s.temp_c) + " outside [-5, 45] C");
    auto& seq = series_[v];
    const auto key = [](const Sample& x) { return std::pair{x.year, x.month}; };
    const auto it = std::lower_bound(seq.begin(), seq.end(), s,
                                     [&](const Sample& a, const Sample& b) { return key(a) < key(b); });
    if (it != seq.end() && key(*it) == key(s))
        throw InputError("duplicate sample for vertex (" + text::format_double(v.lat()) + ", " +
                         text::format_double(v.lon()) + ") at " + std::to_string(s.year) + "-" +
                         std::to_string(s.month));
    seq.insert(it, s);
}

const std::vector<Sample>* SstSeriesStore::find(Vertex v) const {
    const auto it = series_.find(v);
    return it == series_.end() ? nullptr : &it->second;
}

std::size_t SstSeriesStore::sample_count() const {
    std::size_t n = 0;
    for (const auto& [v, seq] : series_) n += seq.size();
    return n;
}

SstSeriesStore load_sst_csv(const std::string& path) {
    const auto lines = text::read_lines(path);
    if (lines.empty()) throw ParseError(path, 1, "empty file, expected header year,month,lat,lon,temp_c");
    if (text::trim(lines.front()) != "year,month,lat,lon,temp_c")
        throw ParseError(path, 1, "expected header year,month,lat,lon,temp_c");

    SstSeriesStore store;
    for (std::size_t n = 1; n < lines.size(); ++n) {
        const std::size_t line_no = n + 1;
        if (text::trim(lines[n]).empty()) continue;
        const auto f = text::split(lines[n], ',');
        if (f.size() != 5) throw ParseError(path, line_no, "expected 5 fields, got " + std::to_string(f.size()));
        const auto year = text::parse_int(f[0]);
        const auto month = text::parse_int(f[1]);
        const auto lat = text::parse_double(f[2]);
        const auto lon = text::parse_double(f[3]);
        const auto temp = text::parse_double(f[4]);
        if (!year || !month || !lat || !lon || !temp) throw ParseError(path, line_no, "malformed number");
        try {
            store.insert(SstRecord{static_cast<int>(*year), static_cast<int>(*month), *lat, *lon, *temp});
        } catch (const InputError& e) {
            throw ParseError(path, line_no, e.what());
        }
    }
    return store;
}

void write_sst_csv(const SstSeriesStore& store, const std::string& path) {
    std::ofstream out(path);
    if (!out) throw InputError("cannot write '" + path + "'");
    out << "year,month,lat,lon,temp_c\n";
    for (const auto& [v, seq] : store.series())
        for (const auto& s : seq)
            out << s.year << ',' << s.month << ',' << text::format_double(v.lat()) << ','
                << text::format_double(v.lon()) << ',' << text::format_double(s.temp_c) << '\n';
    if (!out) throw InputError("write failed for '" + path + "'");
}

SstSeriesStore filter_month(const SstSeriesStore& store, int month) {
    if (month < 1 || month > 12) throw InputError("month " + std::to_string(month) + " outside 1..12");
    SstSeriesStore out;
    for (const auto& [v, seq] : store.series())
        for (const auto& s : seq)
            if (s.month == month) out.insert(v, s);
    return out;
}

double cell_temperature(double v_nw, double v_ne, double v_sw, double v_se) {
    if (!std::isfinite(v_nw) || !std::isfinite(v_ne) || !std::isfinite(v_sw) || !std::isfinite(v_se))
        throw InputError("cell_temperature: non-finite corner temperature");
    return (v_nw + v_ne + v_sw + v_se) / 4.0;
}

// ---------------------------------------------------------------- geometry

void MapExtent::validate() const {
    if (rows < 1 || cols < 1) throw InputError("map extent must have at least one row and column");
    (void)Vertex::from_degrees(north_lat, west_lon);
    (void)Vertex::from_degrees(north_lat - rows, west_lon + cols);
}

Vertex MapExtent::corner(int i, int j, Corner c) const {
    const int north = static_cast<int>(std::lround(north_lat * 2.0)) - 2 * i;
    const int west = static_cast<int>(std::lround(west_lon * 2.0)) + 2 * j;
    switch (c) {
        case Corner::NW: return {north, west};
        case Corner::NE: return {north, west + 2};
        case Corner::SW: return {north - 2, west};
        case Corner::SE: return {north - 2, west + 2};
    }
    throw std::logic_error("bad corner");
}

LandMask::LandMask(int rows, int cols, std::vector<std::uint8_t> land)
    : rows_(rows), cols_(cols), land_(std::move(land)) {
    if (rows < 0 || cols < 0 || land_.size() != static_cast<std::size_t>(rows) * cols)
        throw InputError("land mask size does not match " + std::to_string(rows) + "x" + std::to_string(cols));
}

LandMask LandMask::all_water(int rows, int cols) {
    return LandMask(rows, cols, std::vector<std::uint8_t>(static_cast<std::size_t>(rows) * cols, 0));
}

bool LandMask::is_land(int i, int j) const {
    if (!in_bounds(i, j)) throw std::out_of_range("land mask index " + cell_name(i, j));
    return land_[static_cast<std::size_t>(i) * cols_ + j] != 0;
}

void LandMask::set_land(int i, int j, bool land) {
    if (!in_bounds(i, j)) throw std::out_of_range("land mask index " + cell_name(i, j));
    land_[static_cast<std::size_t>(i) * cols_ + j] = land ? 1 : 0;
}

std::size_t LandMask::water_count() const {
    return static_cast<std::size_t>(std::count(land_.begin(), land_.end(), 0));
}

LandMask load_land_mask(const std::string& path) {
    const auto lines = text::read_lines(path);
    std::vector<std::uint8_t> land;
    int rows = 0;
    int cols = -1;
    for (std::size_t n = 0; n < lines.size(); ++n) {
        const auto row = text::trim(lines[n]);
        if (row.empty()) continue;
        if (cols >= 0 && static_cast<int>(row.size()) != cols)
            throw ParseError(path, n + 1, "row width " + std::to_string(row.size()) + " differs from " +
                                              std::to_string(cols));
        cols = static_cast<int>(row.size());
        for (char c : row) {
            if (c != '0' && c != '1') throw ParseError(path, n + 1, "expected only '0' or '1'");
            land.push_back(c == '1' ? 1 : 0);
        }
        ++rows;
    }
    if (rows == 0) throw InputError("land mask '" + path + "' is empty");
    return LandMask(rows, cols, std::move(land));
}

void write_land_mask(const LandMask& mask, const std::string& path) {
    std::ofstream out(path);
    if (!out) throw InputError("cannot write '" + path + "'");
    for (int i = 0; i < mask.rows(); ++i) {
        for (int j = 0; j < mask.cols(); ++j) out << (mask.is_land(i, j) ? '1' : '0');
        out << '\n';
    }
}

// ---------------------------------------------------------------- fields

GridField::GridField(int year, LandMask mask, std::vector<double> temps)
    : year_(year), mask_(std::move(mask)), temps_(std::move(temps)) {
    if (temps_.size() != static_cast<std::size_t>(mask_.rows()) * mask_.cols())
        throw InputError("field has " + std::to_string(temps_.size()) + " entries, mask needs " +
                         std::to_string(mask_.rows() * mask_.cols()));
    for (int i = 0; i < mask_.rows(); ++i)
        for (int j = 0; j < mask_.cols(); ++j) {
            auto& t = temps_[static_cast<std::size_t>(i) * mask_.cols() + j];
            if (mask_.is_land(i, j))
                t = std::numeric_limits<double>::quiet_NaN();
            else if (!std::isfinite(t))
                throw InputError("water cell " + cell_name(i, j) + " has no finite temperature");
        }
}

std::optional<double> GridField::temperature(int i, int j) const {
    if (mask_.is_land(i, j)) return std::nullopt;
    return temps_[static_cast<std::size_t>(i) * mask_.cols() + j];
}

double GridField::at(int i, int j) const {
    const auto t = temperature(i, j);
    if (!t) throw std::out_of_range("cell " + cell_name(i, j) + " is land");
    return *t;
}

GridField GridField::with_year(int year) const {
    GridField copy = *this;
    copy.year_ = year;
    return copy;
}

bool GridField::operator==(const GridField& o) const {
    if (year_ != o.year_ || !(mask_ == o.mask_)) return false;
    for (int i = 0; i < rows(); ++i)
        for (int j = 0; j < cols(); ++j)
            if (temperature(i, j) != o.temperature(i, j)) return false;
    return true;
}

VertexLayer vertex_layer(const SstSeriesStore& store, int year, int month) {
    VertexLayer layer;
    for (const auto& [v, seq] : store.series()) {
        const auto it = std::find_if(seq.begin(), seq.end(),
                                     [&](const Sample& s) { return s.year == year && s.month == month; });
        if (it != seq.end()) layer.emplace(v, it->temp_c);
    }
    return layer;
}

GridField build_grid_field(const VertexLayer& layer, const LandMask& mask, const MapExtent& extent, int year) {
    extent.validate();
    if (mask.rows() != extent.rows || mask.cols() != extent.cols)
        throw InputError("land mask " + std::to_string(mask.rows()) + "x" + std::to_string(mask.cols()) +
                         " does not match extent " + std::to_string(extent.rows) + "x" +
                         std::to_string(extent.cols));
    using C = MapExtent::Corner;
    std::vector<double> temps(static_cast<std::size_t>(extent.rows) * extent.cols,
                              std::numeric_limits<double>::quiet_NaN());
    for (int i = 0; i < extent.rows; ++i)
        for (int j = 0; j < extent.cols; ++j) {
            if (mask.is_land(i, j)) continue;
            double corner_t[4];
            int k = 0;
            for (C c : {C::NW, C::NE, C::SW, C::SE}) {
                const auto it = layer.find(extent.corner(i, j, c));
                if (it == layer.end())
                    throw InputError("water cell " + cell_name(i, j) + " is missing corner vertex data");
                corner_t[k++] = it->second;
            }
            temps[static_cast<std::size_t>(i) * extent.cols + j] =
                cell_temperature(corner_t[0], corner_t[1], corner_t[2], corner_t[3]);
        }
    return GridField(year, mask, std::move(temps));
}

std::vector<Sample> cell_series(const SstSeriesStore& store, const MapExtent& extent, int i, int j) {
    using C = MapExtent::Corner;
    const std::vector<Sample>* seqs[4];
    int k = 0;
    for (C c : {C::NW, C::NE, C::SW, C::SE}) {
        seqs[k] = store.find(extent.corner(i, j, c));
        if (!seqs[k]) throw InputError("cell " + cell_name(i, j) + " is missing corner vertex data");
        ++k;
    }
    std::vector<Sample> out;
    for (const auto& s : *seqs[0]) {
        double t[4] = {s.temp_c, 0, 0, 0};
        bool complete = true;
        for (int c = 1; c < 4 && complete; ++c) {
            const auto it = std::find_if(seqs[c]->begin(), seqs[c]->end(), [&](const Sample& x) {
                return x.year == s.year && x.month == s.month;
            });
            if (it == seqs[c]->end())
                complete = false;
            else
                t[c] = it->temp_c;
        }
        if (complete) out.push_back(Sample{s.year, s.month, cell_temperature(t[0], t[1], t[2], t[3])});
    }
    return out;
}

void write_field_csv(const GridField& field, const std::string& path) {
    std::ofstream out(path);
    if (!out) throw InputError("cannot write '" + path + "'");
    out << "i,j,temp_c\n";
    for (int i = 0; i < field.rows(); ++i)
        for (int j = 0; j < field.cols(); ++j) {
            out << i << ',' << j << ',';
            if (const auto t = field.temperature(i, j)) out << text::format_double(*t);
            out << '\n';
        }
    if (!out) throw InputError("write failed for '" + path + "'");
}

GridField read_field_csv(const std::string& path, int year) {
    const auto lines = text::read_lines(path);
    if (lines.empty() || text::trim(lines.front()) != "i,j,temp_c")
        throw ParseError(path, 1, "expected header i,j,temp_c");
    struct Entry {
        int i, j;
        std::optional<double> t;
    };
    std::vector<Entry> entries;
    int rows = 0, cols = 0;
    for (std::size_t n = 1; n < lines.size(); ++n) {
        if (text::trim(lines[n]).empty()) continue;
        const auto f = text::split(lines[n], ',');
        if (f.size() != 3) throw ParseError(path, n + 1, "expected 3 fields");
        const auto i = text::parse_int(f[0]);
        const auto j = text::parse_int(f[1]);
        if (!i || !j || *i < 0 || *j < 0) throw ParseError(path, n + 1, "malformed cell index");
        std::optional<double> t;
        if (!text::trim(f[2]).empty()) {
            t = text::parse_double(f[2]);
            if (!t) throw ParseError(path, n + 1, "malformed temperature");
        }
        entries.push_back({static_cast<int>(*i), static_cast<int>(*j), t});
        rows = std::max(rows, static_cast<int>(*i) + 1);
        cols = std::max(cols, static_cast<int>(*j) + 1);
    }
    if (entries.size() != static_cast<std::size_t>(rows) * cols)
        throw InputError("field '" + path + "' does not list every cell of a " + std::to_string(rows) + "x" +
                         std::to_string(cols) + " grid");
    std::vector<std::uint8_t> land(entries.size(), 1);
    std::vector<double> temps(entries.size(), std::numeric_limits<double>::quiet_NaN());
    std::set<std::pair<int, int>> seen;
    for (const auto& e : entries) {
        if (!seen.emplace(e.i, e.j).second)
            throw InputError("field '" + path + "' lists cell " + cell_name(e.i, e.j) + " twice");
        const auto idx = static_cast<std::size_t>(e.i) * cols + e.j;
        if (e.t) {
            land[idx] = 0;
            temps[idx] = *e.t;
        }
    }
    return GridField(year, LandMask(rows, cols, std::move(land)), std::move(temps));
}

// ---------------------------------------------------------------- rendering

Rgb ramp_color(double temp_c) {
    const double t = std::clamp((temp_c - kRampColdC) / (kRampWarmC - kRampColdC), 0.0, 1.0);
    // Both channels rounded independently so the midpoint mixes evenly.
    return Rgb{static_cast<std::uint8_t>(std::lround(255.0 * t)), 0,
               static_cast<std::uint8_t>(std::lround(255.0 * (1.0 - t)))};
}

Rgb occupancy_color(int count) {
    switch (std::clamp(count, 0, 3)) {
        case 0: return {16, 32, 64};
        case 1: return {255, 230, 120};
        case 2: return {255, 150, 40};
        default: return {200, 40, 0};
    }
}

Pixmap::Pixmap(int width, int height, Rgb fill)
    : width_(width), height_(height), pixels_(static_cast<std::size_t>(width) * height, fill) {
    if (width < 0 || height < 0) throw std::invalid_argument("negative pixmap size");
}

void Pixmap::write_ppm(const std::string& path) const {
    std::ofstream out(path, std::ios::binary);
    if (!out) throw InputError("cannot write '" + path + "'");
    out << "P6\n" << width_ << ' ' << height_ << "\n255\n";
    for (const auto& p : pixels_) {
        const char px[3] = {static_cast<char>(p.r), static_cast<char>(p.g), static_cast<char>(p.b)};
        out.write(px, 3);
    }
    if (!out) throw InputError("write failed for '" + path + "'");
}

Pixmap Pixmap::read_ppm(const std::string& path) {
    std::ifstream in(path, std::ios::binary);
    if (!in) throw InputError("cannot open '" + path + "'");
    const auto next_token = [&]() {
        std::string tok;
        int c;
        while ((c = in.get()) != EOF) {
            if (c == '#') {
                while ((c = in.get()) != EOF && c != '\n') {}
                continue;
            }
            if (std::isspace(c)) {
                if (!tok.empty()) break;
                continue;
            }
            tok.push_back(static_cast<char>(c));
        }
        return tok;
    };
    const auto magic = next_token();
    if (magic != "P6" && magic != "P3") throw InputError("'" + path + "' is not a P3/P6 pixmap");
    const auto w = text::parse_int(next_token());
    const auto h = text::parse_int(next_token());
    const auto maxval = text::parse_int(next_token());
    if (!w || !h || !maxval || *maxval != 255) throw InputError("'" + path + "' has an unsupported header");
    Pixmap pm(static_cast<int>(*w), static_cast<int>(*h));
    for (auto& p : pm.pixels_) {
        std::uint8_t ch[3];
        for (auto& c : ch) {
            if (magic == "P6") {
                const int v = in.get();
                if (v == EOF) throw InputError("'" + path + "' is truncated");
                c = static_cast<std::uint8_t>(v);
            } else {
                const auto v = text::parse_int(next_token());
                if (!v || *v < 0 || *v > 255) throw InputError("'" + path + "' has a bad sample");
                c = static_cast<std::uint8_t>(*v);
            }
        }
        p = Rgb{ch[0], ch[1], ch[2]};
    }
    return pm;
}

namespace {

template <typename ColorAt>
Pixmap rasterize(int rows, int cols, int scale, ColorAt color_at) {
    if (scale < 1) throw InputError("pixel scale must be >= 1");
    Pixmap pm(cols * scale, rows * scale);
    for (int i = 0; i < rows; ++i)
        for (int j = 0; j < cols; ++j) {
            const Rgb c = color_at(i, j);
            for (int dy = 0; dy < scale; ++dy)
                for (int dx = 0; dx < scale; ++dx) pm.at(j * scale + dx, i * scale + dy) = c;
        }
    return pm;
}

}  // namespace

Pixmap rasterize_field(const GridField& field, int scale) {
    return rasterize(field.rows(), field.cols(), scale, [&](int i, int j) {
        const auto t = field.temperature(i, j);
        return t ? ramp_color(*t) : kLandColor;
    });
}

Pixmap rasterize_counts(const LandMask& mask, const std::vector<int>& counts, int scale) {
    if (counts.size() != static_cast<std::size_t>(mask.rows()) * mask.cols())
        throw InputError("occupancy counts do not match the mask dimensions");
    return rasterize(mask.rows(), mask.cols(), scale, [&](int i, int j) {
        return mask.is_land(i, j) ? kLandColor
                                  : occupancy_color(counts[static_cast<std::size_t>(i) * mask.cols() + j]);
    });
}

void render_heatmap(const GridField& field, const std::string& path, int scale) {
    rasterize_field(field, scale).write_ppm(path);
    write_field_csv(field, std::filesystem::path(path).replace_extension(".csv").string());
}

}  // namespace fishmig::sst
