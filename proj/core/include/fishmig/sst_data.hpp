#pragma once

// Monthly SST records on a 0.5 degree vertex lattice, per-cell fields built
// from them, the land mask, and raster/CSV rendering of fields.

#include <compare>
#include <cstdint>
#include <map>
#include <optional>
#include <string>
#include <vector>

namespace fishmig::sst {

/// Lattice vertex stored in half-degree units so keys compare exactly.
struct Vertex {
    int lat_half = 0;
    int lon_half = 0;

    double lat() const { return lat_half * 0.5; }
    double lon() const { return lon_half * 0.5; }

    /// Throws InputError when (lat, lon) is not on the 0.5 degree lattice.
    static Vertex from_degrees(double lat, double lon);

    auto operator<=>(const Vertex&) const = default;
};

struct SstRecord {
    int year = 0;
    int month = 0;
    double lat = 0.0;
    double lon = 0.0;
    double temp_c = 0.0;
};

struct Sample {
    int year = 0;
    int month = 0;
    double temp_c = 0.0;

    bool operator==(const Sample&) const = default;
};

inline constexpr double kMinSaneTemp = -5.0;
inline constexpr double kMaxSaneTemp = 45.0;

/// Per-vertex, time-ordered sample sequences. Each sequence is kept
/// strictly increasing in (year, month); duplicates are rejected.
class SstSeriesStore {
public:
    using SeriesMap = std::map<Vertex, std::vector<Sample>>;

    /// Validates bounds and inserts in order. Throws InputError on a
    /// duplicate (vertex, year, month) or an out-of-range value.
    void insert(const SstRecord& rec);
    void insert(Vertex v, Sample s);

    const SeriesMap& series() const { return series_; }
    const std::vector<Sample>* find(Vertex v) const;
    std::size_t vertex_count() const { return series_.size(); }
    std::size_t sample_count() const;
    bool empty() const { return series_.empty(); }

    bool operator==(const SstSeriesStore&) const = default;

private:
    SeriesMap series_;
};

/// Reads `year,month,lat,lon,temp_c`. Errors name the offending line.
SstSeriesStore load_sst_csv(const std::string& path);
void write_sst_csv(const SstSeriesStore& store, const std::string& path);

SstSeriesStore filter_month(const SstSeriesStore& store, int month);

/// Mean of the four corner temperatures of a grid cell.
double cell_temperature(double v_nw, double v_ne, double v_sw, double v_se);

/// Placement of the cell grid on the vertex lattice. Cell (i, j) spans
/// 1 degree: its north-west corner is (north_lat - i, west_lon + j).
/// Row 0 is the northernmost row.
struct MapExtent {
    double north_lat = 67.5;
    double west_lon = -20.5;
    int rows = 13;
    int cols = 27;

    enum class Corner { NW, NE, SW, SE };
    Vertex corner(int i, int j, Corner c) const;
    void validate() const;
};

class LandMask {
public:
    LandMask() = default;
    LandMask(int rows, int cols, std::vector<std::uint8_t> land);

    static LandMask all_water(int rows, int cols);

    int rows() const { return rows_; }
    int cols() const { return cols_; }
    bool in_bounds(int i, int j) const { return i >= 0 && j >= 0 && i < rows_ && j < cols_; }
    bool is_land(int i, int j) const;
    void set_land(int i, int j, bool land);
    std::size_t water_count() const;

    bool operator==(const LandMask&) const = default;

private:
    int rows_ = 0;
    int cols_ = 0;
    std::vector<std::uint8_t> land_;
};

/// Text grid of '0'/'1' characters, one line per row, north to south.
LandMask load_land_mask(const std::string& path);
void write_land_mask(const LandMask& mask, const std::string& path);

/// Cell temperatures for one year. Land cells carry no temperature.
class GridField {
public:
    GridField() = default;
    /// `temps` is row-major rows*cols; entries under land are ignored.
    /// Throws InputError when a water entry is not finite.
    GridField(int year, LandMask mask, std::vector<double> temps);

    int year() const { return year_; }
    int rows() const { return mask_.rows(); }
    int cols() const { return mask_.cols(); }
    const LandMask& mask() const { return mask_; }
    bool is_land(int i, int j) const { return mask_.is_land(i, j); }

    std::optional<double> temperature(int i, int j) const;
    /// Water temperature; throws std::out_of_range for land or out-of-bounds.
    double at(int i, int j) const;

    GridField with_year(int year) const;

    bool operator==(const GridField& o) const;

private:
    int year_ = 0;
    LandMask mask_;
    std::vector<double> temps_;
};

using VertexLayer = std::map<Vertex, double>;

/// Temperatures of every vertex that has a sample at (year, month).
VertexLayer vertex_layer(const SstSeriesStore& store, int year, int month);

/// Cell field from corner vertexes. Throws InputError naming (i, j) when a
/// water cell is missing a corner; land cells need no data.
GridField build_grid_field(const VertexLayer& layer, const LandMask& mask,
                           const MapExtent& extent, int year);

/// Time series of one cell: the four-corner mean at every (year, month)
/// sampled by all four corners, in time order.
std::vector<Sample> cell_series(const SstSeriesStore& store, const MapExtent& extent, int i, int j);

/// Field sidecar format: `i,j,temp_c`, empty temperature for land.
void write_field_csv(const GridField& field, const std::string& path);
GridField read_field_csv(const std::string& path, int year);

struct Rgb {
    std::uint8_t r = 0;
    std::uint8_t g = 0;
    std::uint8_t b = 0;
    bool operator==(const Rgb&) const = default;
};

inline constexpr double kRampColdC = 2.0;
inline constexpr double kRampWarmC = 12.0;
inline constexpr Rgb kLandColor{255, 255, 255};

/// Linear blue -> red ramp over [2, 12] C, clamped outside.
Rgb ramp_color(double temp_c);

/// Discrete ramp for cell occupancy 0..3.
Rgb occupancy_color(int count);

class Pixmap {
public:
    Pixmap() = default;
    Pixmap(int width, int height, Rgb fill = {});

    int width() const { return width_; }
    int height() const { return height_; }
    Rgb& at(int x, int y) { return pixels_[static_cast<std::size_t>(y) * width_ + x]; }
    const Rgb& at(int x, int y) const { return pixels_[static_cast<std::size_t>(y) * width_ + x]; }

    /// Binary P6 portable pixmap.
    void write_ppm(const std::string& path) const;
    /// Reads P6 or P3 with maxval 255.
    static Pixmap read_ppm(const std::string& path);

private:
    int width_ = 0;
    int height_ = 0;
    std::vector<Rgb> pixels_;
};

/// One `scale` x `scale` pixel block per cell; raster is (cols*scale, rows*scale).
Pixmap rasterize_field(const GridField& field, int scale = 1);
Pixmap rasterize_counts(const LandMask& mask, const std::vector<int>& counts, int scale = 1);

/// Writes the pixmap and a sidecar CSV (same stem, `.csv`) of raw temperatures.
void render_heatmap(const GridField& field, const std::string& path, int scale = 1);

}  // namespace fishmig::sst
