#include "fishmig/eca.hpp"

#include <algorithm>
#include <cmath>
#include <fstream>
#include <unordered_map>

#include "fishmig/error.hpp"
#include "fishmig/text.hpp"

namespace fishmig::eca {

namespace {

std::string coord_name(Coord c) { return "(" + std::to_string(c.i) + ", " + std::to_string(c.j) + ")"; }

const fishstats::FishProfile& profile_for(const fishstats::ProfileSet& profiles, const std::string& species) {
    const auto it = profiles.find(species);
    if (it == profiles.end()) throw InputError("no thermal profile for species '" + species + "'");
    return it->second;
}

}  // namespace

// ---------------------------------------------------------------- CellSpace

CellSpace::CellSpace(sst::LandMask mask, int year) : year_(year), mask_(std::move(mask)) {
    grids_.reserve(static_cast<std::size_t>(rows()) * cols());
    for (int i = 0; i < rows(); ++i)
        for (int j = 0; j < cols(); ++j) grids_.push_back(GridState{i, j, std::nullopt, {}});
}

std::size_t CellSpace::index(Coord c) const {
    if (!mask_.in_bounds(c.i, c.j)) throw InputError("grid " + coord_name(c) + " is out of bounds");
    return static_cast<std::size_t>(c.i) * cols() + c.j;
}

const GridState& CellSpace::grid(Coord c) const { return grids_[index(c)]; }
GridState& CellSpace::grid(Coord c) { return grids_[index(c)]; }

std::uint32_t CellSpace::add_cell(Coord c, const std::string& species) {
    auto& g = grid(c);
    if (mask_.is_land(c.i, c.j)) throw InputError("cannot place a cell on land at " + coord_name(c));
    if (g.occupancy() >= kMaxCellsPerGrid)
        throw InputError("grid " + coord_name(c) + " already holds " + std::to_string(kMaxCellsPerGrid) + " cells");
    if (species.empty()) throw InputError("cell species tag is empty");
    const auto id = next_id_++;
    g.cells.push_back(Cell{id, species, Stability::Steady});
    return id;
}

void CellSpace::apply_field(const sst::GridField& field) {
    if (field.rows() != rows() || field.cols() != cols())
        throw InputError("field " + std::to_string(field.rows()) + "x" + std::to_string(field.cols()) +
                         " does not match cell space " + std::to_string(rows()) + "x" + std::to_string(cols()));
    if (!(field.mask() == mask_)) throw InputError("field land mask differs from the cell space mask");
    for (auto& g : grids_) g.temp = field.temperature(g.i, g.j);
    year_ = field.year();
}

std::size_t CellSpace::total_cells() const {
    std::size_t n = 0;
    for (const auto& g : grids_) n += g.cells.size();
    return n;
}

std::map<std::string, std::size_t> CellSpace::cells_per_species() const {
    std::map<std::string, std::size_t> out;
    for (const auto& g : grids_)
        for (const auto& c : g.cells) ++out[c.species];
    return out;
}

std::vector<Coord> CellSpace::positions(const std::string& species) const {
    std::vector<Coord> out;
    for (const auto& g : grids_)
        for (const auto& c : g.cells)
            if (c.species == species) out.push_back({g.i, g.j});
    return out;
}

// ---------------------------------------------------------------- rules

Stability classify_stability(double temp_c, const fishstats::FishProfile& profile) {
    return profile.livable().contains(temp_c) ? Stability::Steady : Stability::Unsteady;
}

std::vector<Coord> von_neumann_neighbors(Coord c, int rows, int cols) {
    if (c.i < 0 || c.j < 0 || c.i >= rows || c.j >= cols)
        throw InputError("grid " + coord_name(c) + " is out of bounds");
    std::vector<Coord> out;
    out.reserve(4);
    for (const Coord n : {Coord{c.i - 1, c.j}, Coord{c.i + 1, c.j}, Coord{c.i, c.j - 1}, Coord{c.i, c.j + 1}})
        if (n.i >= 0 && n.j >= 0 && n.i < rows && n.j < cols) out.push_back(n);
    return out;
}

std::optional<Coord> select_target(Coord origin, const CellSpace& space, const sst::GridField& field,
                                   const fishstats::FishProfile& profile) {
    std::optional<Coord> best;
    double best_gap = 0.0;
    for (const Coord n : von_neumann_neighbors(origin, space.rows(), space.cols())) {
        const auto t = field.temperature(n.i, n.j);
        if (!t || space.grid(n).occupancy() >= kMaxCellsPerGrid) continue;
        const double gap = std::abs(*t - profile.best_temp());
        if (!best || gap < best_gap) {
            best = n;
            best_gap = gap;
        }
    }
    return best;
}

const char* to_string(MoveOutcome o) {
    switch (o) {
        case MoveOutcome::Moved: return "moved";
        case MoveOutcome::Stayed: return "stayed";
        case MoveOutcome::Blocked: return "blocked";
    }
    return "?";
}

std::pair<CellSpace, StepReport> step_year(const CellSpace& space, const sst::GridField& field,
                                           const fishstats::ProfileSet& profiles, const StepOptions& opts,
                                           Rng& rng) {
    if (opts.hop_budget < 1) throw InputError("hop budget must be >= 1");
    if (field.year() != space.year() + 1)
        throw InputError("field for year " + std::to_string(field.year()) + " cannot follow year " +
                         std::to_string(space.year()));
    CellSpace next = space;
    next.apply_field(field);

    StepReport report;
    report.year = field.year();

    // Fix the visiting order before anything moves.
    std::vector<std::pair<std::uint32_t, Coord>> order;
    order.reserve(space.total_cells());
    for (int i = 0; i < next.rows(); ++i)
        for (int j = 0; j < next.cols(); ++j)
            for (const auto& c : next.grid({i, j}).cells) order.emplace_back(c.id, Coord{i, j});

    for (const auto& [id, start] : order) {
        Coord at = start;
        std::string species;
        {
            const auto& cells = next.grid(at).cells;
            const auto it = std::find_if(cells.begin(), cells.end(), [&](const Cell& c) { return c.id == id; });
            species = it->species;
        }
        const auto& profile = profile_for(profiles, species);
        if (classify_stability(*next.grid(at).temp, profile) == Stability::Steady) {
            ++report.steady;
            continue;
        }
        ++report.unsteady;

        for (int hop = 1; hop <= opts.hop_budget; ++hop) {
            const double p = fishstats::transition_probability(*next.grid(at).temp, profile);
            MoveRecord rec{report.year, id, species, at, at, hop, p, std::nullopt, MoveOutcome::Stayed};
            const auto target = select_target(at, next, field, profile);
            if (!target) {
                rec.outcome = MoveOutcome::Blocked;
                report.moves.push_back(std::move(rec));
                ++report.blocked;
                break;
            }
            bool go = true;
            if (opts.rule == MovementRule::Stochastic) {
                const double u = rng.uniform();
                rec.draw = u;
                go = u < p;
            }
            if (!go) {
                report.moves.push_back(std::move(rec));
                break;
            }
            auto& from_cells = next.grid(at).cells;
            const auto it = std::find_if(from_cells.begin(), from_cells.end(), [&](const Cell& c) { return c.id == id; });
            Cell moving = std::move(*it);
            from_cells.erase(it);
            next.grid(*target).cells.push_back(std::move(moving));
            rec.to = *target;
            rec.outcome = MoveOutcome::Moved;
            report.moves.push_back(std::move(rec));
            at = *target;
            if (classify_stability(*next.grid(at).temp, profile) == Stability::Steady) break;
        }
    }

    for (int i = 0; i < next.rows(); ++i)
        for (int j = 0; j < next.cols(); ++j) {
            auto& g = next.grid({i, j});
            for (auto& c : g.cells) c.stability = classify_stability(*g.temp, profile_for(profiles, c.species));
        }
    return {std::move(next), std::move(report)};
}

Trajectory run_simulation(const CellSpace& initial, const std::vector<sst::GridField>& fields,
                          const fishstats::ProfileSet& profiles, std::uint64_t seed, const StepOptions& opts) {
    Trajectory traj;
    traj.initial = initial;
    traj.snapshots.reserve(fields.size());
    Rng rng(seed);
    const CellSpace* current = &traj.initial;
    for (std::size_t n = 0; n < fields.size(); ++n) {
        const int expected = initial.year() + static_cast<int>(n) + 1;
        if (fields[n].year() != expected)
            throw InputError("missing field for year " + std::to_string(expected) + " (got year " +
                             std::to_string(fields[n].year()) + ")");
        auto [space, report] = step_year(*current, fields[n], profiles, opts, rng);
        traj.snapshots.push_back(Snapshot{expected, std::move(space), std::move(report)});
        current = &traj.snapshots.back().space;
    }
    return traj;
}

std::pair<double, double> centroid(const CellSpace& space, const std::string& species) {
    const auto pos = space.positions(species);
    if (pos.empty()) throw InputError("no cells of species '" + species + "'");
    double si = 0.0, sj = 0.0;
    for (const auto& c : pos) {
        si += c.i;
        sj += c.j;
    }
    const double n = static_cast<double>(pos.size());
    return {si / n, sj / n};
}

// ---------------------------------------------------------------- files

CellSpace load_seeding_csv(const std::string& path, const sst::LandMask& mask) {
    const auto lines = text::read_lines(path);
    if (lines.empty() || text::trim(lines.front()) != "i,j,species,cell_count")
        throw ParseError(path, 1, "expected header i,j,species,cell_count");
    CellSpace space(mask);
    for (std::size_t n = 1; n < lines.size(); ++n) {
        if (text::trim(lines[n]).empty()) continue;
        const auto f = text::split(lines[n], ',');
        if (f.size() != 4) throw ParseError(path, n + 1, "expected 4 fields");
        const auto i = text::parse_int(f[0]);
        const auto j = text::parse_int(f[1]);
        const auto count = text::parse_int(f[3]);
        const std::string species(text::trim(f[2]));
        if (!i || !j || !count || *count < 0) throw ParseError(path, n + 1, "malformed number");
        try {
            for (long long k = 0; k < *count; ++k)
                space.add_cell({static_cast<int>(*i), static_cast<int>(*j)}, species);
        } catch (const InputError& e) {
            throw ParseError(path, n + 1, e.what());
        }
    }
    return space;
}

void write_seeding_csv(const CellSpace& space, const std::string& path) {
    std::ofstream out(path);
    if (!out) throw InputError("cannot write '" + path + "'");
    out << "i,j,species,cell_count\n";
    for (int i = 0; i < space.rows(); ++i)
        for (int j = 0; j < space.cols(); ++j) {
            std::map<std::string, int> counts;
            for (const auto& c : space.grid({i, j}).cells) ++counts[c.species];
            for (const auto& [sp, n] : counts) out << i << ',' << j << ',' << sp << ',' << n << '\n';
        }
}

CellSpace seed_uniform(const sst::GridField& field, const fishstats::ProfileSet& profiles,
                       const std::map<std::string, int>& counts, Rng& rng) {
    CellSpace space(field.mask(), field.year());
    space.apply_field(field);
    for (const auto& [species, count] : counts) {
        const auto& profile = profile_for(profiles, species);
        std::vector<Coord> livable;
        for (int i = 0; i < field.rows(); ++i)
            for (int j = 0; j < field.cols(); ++j)
                if (const auto t = field.temperature(i, j); t && profile.livable().contains(*t))
                    livable.push_back({i, j});
        for (int k = 0; k < count; ++k) {
            std::vector<Coord> open;
            for (const auto& c : livable)
                if (space.grid(c).occupancy() < kMaxCellsPerGrid) open.push_back(c);
            if (open.empty())
                throw InputError("not enough livable grids to seed " + std::to_string(count) + " cells of '" +
                                 species + "'");
            space.add_cell(open[rng.below(open.size())], species);
        }
    }
    return space;
}

namespace {

void write_occupancy_rows(std::ostream& out, int year, const CellSpace& space) {
    for (int i = 0; i < space.rows(); ++i)
        for (int j = 0; j < space.cols(); ++j) {
            std::map<std::string, int> counts;
            for (const auto& c : space.grid({i, j}).cells) ++counts[c.species];
            for (const auto& [sp, n] : counts) out << year << ',' << i << ',' << j << ',' << sp << ',' << n << '\n';
        }
}

}  // namespace

void write_occupancy_csv(const Trajectory& traj, const std::string& path) {
    std::ofstream out(path);
    if (!out) throw InputError("cannot write '" + path + "'");
    out << "year,i,j,species,cells\n";
    write_occupancy_rows(out, traj.initial.year(), traj.initial);
    for (const auto& s : traj.snapshots) write_occupancy_rows(out, s.year, s.space);
    if (!out) throw InputError("write failed for '" + path + "'");
}

void write_movement_csv(const Trajectory& traj, const std::string& path) {
    std::ofstream out(path);
    if (!out) throw InputError("cannot write '" + path + "'");
    out << "year,cell,species,from_i,from_j,to_i,to_j,hop,p_move,draw,outcome\n";
    for (const auto& s : traj.snapshots)
        for (const auto& m : s.report.moves) {
            out << m.year << ',' << m.cell_id << ',' << m.species << ',' << m.from.i << ',' << m.from.j << ','
                << m.to.i << ',' << m.to.j << ',' << m.hop << ',' << text::format_double(m.p_move) << ',';
            if (m.draw) out << text::format_double(*m.draw);
            out << ',' << to_string(m.outcome) << '\n';
        }
    if (!out) throw InputError("write failed for '" + path + "'");
}

std::vector<OccupancyRow> load_occupancy_csv(const std::string& path) {
    const auto lines = text::read_lines(path);
    if (lines.empty() || text::trim(lines.front()) != "year,i,j,species,cells")
        throw ParseError(path, 1, "expected header year,i,j,species,cells");
    std::vector<OccupancyRow> rows;
    for (std::size_t n = 1; n < lines.size(); ++n) {
        if (text::trim(lines[n]).empty()) continue;
        const auto f = text::split(lines[n], ',');
        if (f.size() != 5) throw ParseError(path, n + 1, "expected 5 fields");
        const auto y = text::parse_int(f[0]);
        const auto i = text::parse_int(f[1]);
        const auto j = text::parse_int(f[2]);
        const auto c = text::parse_int(f[4]);
        if (!y || !i || !j || !c || *c < 0) throw ParseError(path, n + 1, "malformed number");
        rows.push_back({static_cast<int>(*y), {static_cast<int>(*i), static_cast<int>(*j)},
                        std::string(text::trim(f[3])), static_cast<int>(*c)});
    }
    return rows;
}

std::vector<int> occupancy_counts(const CellSpace& space) {
    std::vector<int> out;
    out.reserve(static_cast<std::size_t>(space.rows()) * space.cols());
    for (int i = 0; i < space.rows(); ++i)
        for (int j = 0; j < space.cols(); ++j) out.push_back(space.grid({i, j}).occupancy());
    return out;
}

}  // namespace fishmig::eca
