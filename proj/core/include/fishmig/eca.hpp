#pragma once

// Enhanced cellular automaton for thermally driven fish movement.
//
// Each grid holds at most three cells (a cell stands for 10 000 fish of one
// species). Every simulated year the grid temperatures are replaced by that
// year's field, cells outside their species' livable band become unsteady,
// and each unsteady cell tries to hop to the Von Neumann neighbour whose
// temperature is closest to its best temperature, succeeding with the
// transition probability of its current grid.

#include <compare>
#include <cstdint>
#include <map>
#include <optional>
#include <string>
#include <utility>
#include <vector>

#include "fishmig/fishstats.hpp"
#include "fishmig/rng.hpp"
#include "fishmig/sst_data.hpp"

namespace fishmig::eca {

inline constexpr int kMaxCellsPerGrid = 3;
inline constexpr int kFishPerCell = 10000;

enum class Stability { Steady, Unsteady };

struct Coord {
    int i = 0;
    int j = 0;
    auto operator<=>(const Coord&) const = default;
};

struct Cell {
    std::uint32_t id = 0;
    std::string species;
    Stability stability = Stability::Steady;

    bool operator==(const Cell&) const = default;
};

struct GridState {
    int i = 0;
    int j = 0;
    std::optional<double> temp;  ///< empty on land or before the first field
    std::vector<Cell> cells;     ///< index is k; size is the occupancy S_ij

    int occupancy() const { return static_cast<int>(cells.size()); }
    bool operator==(const GridState&) const = default;
};

class CellSpace {
public:
    CellSpace() = default;
    /// `year` is the year whose temperatures the space holds; 0 = none yet.
    explicit CellSpace(sst::LandMask mask, int year = 0);

    int rows() const { return mask_.rows(); }
    int cols() const { return mask_.cols(); }
    int year() const { return year_; }
    const sst::LandMask& mask() const { return mask_; }

    const GridState& grid(Coord c) const;
    GridState& grid(Coord c);

    /// Places a new cell. Throws InputError on land, out of bounds, or a full grid.
    std::uint32_t add_cell(Coord c, const std::string& species);

    /// Copies temperatures from `field` and sets the year to field.year().
    /// Throws InputError if dimensions or the land mask differ.
    void apply_field(const sst::GridField& field);

    std::size_t total_cells() const;
    std::map<std::string, std::size_t> cells_per_species() const;
    /// Coordinates of every cell of `species`, with multiplicity, row-major.
    std::vector<Coord> positions(const std::string& species) const;

    bool operator==(const CellSpace&) const = default;

private:
    std::size_t index(Coord c) const;

    int year_ = 0;
    sst::LandMask mask_;
    std::vector<GridState> grids_;
    std::uint32_t next_id_ = 0;
};

Stability classify_stability(double temp_c, const fishstats::FishProfile& profile);

/// In-bounds subset of up, down, left, right, in that order.
std::vector<Coord> von_neumann_neighbors(Coord c, int rows, int cols);

/// Admissible neighbour (water, occupancy < 3) minimizing |T - T_b|; ties
/// go to the earlier neighbour in up/down/left/right order.
std::optional<Coord> select_target(Coord origin, const CellSpace& space, const sst::GridField& field,
                                   const fishstats::FishProfile& profile);

enum class MoveOutcome { Moved, Stayed, Blocked };
const char* to_string(MoveOutcome o);

struct MoveRecord {
    int year = 0;
    std::uint32_t cell_id = 0;
    std::string species;
    Coord from;
    Coord to;
    int hop = 0;
    double p_move = 0.0;
    std::optional<double> draw;  ///< absent when no draw was made
    MoveOutcome outcome = MoveOutcome::Stayed;
};

struct StepReport {
    int year = 0;
    std::vector<MoveRecord> moves;  ///< one entry per movement attempt
    std::size_t steady = 0;
    std::size_t unsteady = 0;
    std::size_t blocked = 0;
};

enum class MovementRule {
    Stochastic,  ///< hop with the transition probability
    Always,      ///< every unsteady cell hops (probability-1 regime)
};

struct StepOptions {
    int hop_budget = 1;
    MovementRule rule = MovementRule::Stochastic;
};

/// Advances one year. `field.year()` must be `space.year() + 1`.
/// Cells are processed in row-major grid order then by k, and moves are
/// applied immediately, so later cells see earlier moves.
std::pair<CellSpace, StepReport> step_year(const CellSpace& space, const sst::GridField& field,
                                           const fishstats::ProfileSet& profiles, const StepOptions& opts,
                                           Rng& rng);

struct Snapshot {
    int year = 0;
    CellSpace space;
    StepReport report;
};

struct Trajectory {
    CellSpace initial;
    std::vector<Snapshot> snapshots;
};

/// Runs one step per field. Fields must cover years initial.year()+1, +2, ...
/// without gaps.
Trajectory run_simulation(const CellSpace& initial, const std::vector<sst::GridField>& fields,
                          const fishstats::ProfileSet& profiles, std::uint64_t seed, const StepOptions& opts = {});

/// Mean (row, col) over the species' cells. Throws InputError if it has none.
std::pair<double, double> centroid(const CellSpace& space, const std::string& species);

/// `i,j,species,cell_count`
CellSpace load_seeding_csv(const std::string& path, const sst::LandMask& mask);
void write_seeding_csv(const CellSpace& space, const std::string& path);

/// Places `counts[species]` cells uniformly over water grids whose
/// temperature lies in that species' livable band.
CellSpace seed_uniform(const sst::GridField& field, const fishstats::ProfileSet& profiles,
                       const std::map<std::string, int>& counts, Rng& rng);

/// `year,i,j,species,cells`; the initial space is written as its own year.
void write_occupancy_csv(const Trajectory& traj, const std::string& path);
/// `year,cell,species,from_i,from_j,to_i,to_j,hop,p_move,draw,outcome`
void write_movement_csv(const Trajectory& traj, const std::string& path);

struct OccupancyRow {
    int year = 0;
    Coord at;
    std::string species;
    int cells = 0;
};
std::vector<OccupancyRow> load_occupancy_csv(const std::string& path);

/// Cell counts per grid (all species) in row-major order.
std::vector<int> occupancy_counts(const CellSpace& space);

}  // namespace fishmig::eca
