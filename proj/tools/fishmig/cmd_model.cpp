#include <algorithm>
#include <atomic>
#include <filesystem>
#include <fstream>
#include <iostream>
#include <optional>
#include <thread>

#include "commands.hpp"
#include "fishmig/error.hpp"
#include "fishmig/lstm.hpp"
#include "fishmig/sst_data.hpp"
#include "fishmig/text.hpp"

namespace fishmig::cli {

namespace fs = std::filesystem;

namespace {

std::string block_name(const eca::Coord& c) { return std::to_string(c.i) + "_" + std::to_string(c.j); }

struct BlockJob {
    eca::Coord at;
    std::vector<double> series;
    int last_year = 0;
};

struct BlockOutcome {
    std::optional<lstm::TrainResult> result;
    std::string error;
};

std::vector<eca::Coord> selected_blocks(const Run& run, const sst::LandMask& mask) {
    std::vector<eca::Coord> out;
    const auto spec = run.get("blocks");
    if (spec.empty()) {
        for (int i = 0; i < mask.rows(); ++i)
            for (int j = 0; j < mask.cols(); ++j)
                if (!mask.is_land(i, j)) out.push_back({i, j});
        return out;
    }
    for (auto part : text::split(spec, ';')) {
        const auto c = parse_coord(std::string(text::trim(part)));
        if (!mask.in_bounds(c.i, c.j) || mask.is_land(c.i, c.j))
            throw InputError("train: block (" + std::to_string(c.i) + ", " + std::to_string(c.j) +
                             ") is not a water block of the grid");
        out.push_back(c);
    }
    return out;
}

int train(Run& run) {
    const auto input = run.require("input");
    run.add_input(input);

    sst::MapExtent extent;
    extent.north_lat = run.get_double("north_lat");
    extent.west_lon = run.get_double("west_lon");
    extent.rows = static_cast<int>(run.get_int("rows"));
    extent.cols = static_cast<int>(run.get_int("cols"));
    extent.validate();

    sst::LandMask mask = sst::LandMask::all_water(extent.rows, extent.cols);
    if (const auto mp = run.get("mask"); !mp.empty()) {
        run.add_input(mp);
        mask = sst::load_land_mask(mp);
        if (mask.rows() != extent.rows || mask.cols() != extent.cols)
            throw InputError("train: mask is " + std::to_string(mask.rows()) + "x" + std::to_string(mask.cols()) +
                             " but the grid is " + std::to_string(extent.rows) + "x" + std::to_string(extent.cols));
    }

    tdf::TdfConfig features;
    features.lookback = static_cast<int>(run.get_int("lookback"));
    features.adjacent = static_cast<int>(run.get_int("adjacent"));
    features.seasonal = static_cast<int>(run.get_int("seasonal"));
    features.samples_per_year = static_cast<int>(run.get_int("samples_per_year"));
    features.validate();

    lstm::TrainConfig base;
    base.hidden_size = static_cast<int>(run.get_int("hidden"));
    base.learning_rate = run.get_double("lr");
    base.epochs = static_cast<int>(run.get_int("epochs"));
    base.clip_norm = run.get_double("clip");
    base.init_scale = run.get_double("init_scale");
    base.output_form = run.get_bool("conventional_output") ? lstm::OutputForm::Conventional : lstm::OutputForm::GateThenTanh;
    base.normalization = lstm::normalization_from_string(run.get("normalization"));
    base.validate();

    const auto month = static_cast<int>(run.get_int("month"));
    const auto store = sst::load_sst_csv(input);
    const auto blocks = selected_blocks(run, mask);
    if (blocks.empty()) throw InputError("train: no water blocks to train");

    std::vector<BlockJob> jobs;
    for (const auto& c : blocks) {
        BlockJob job{c, {}, 0};
        for (const auto& s : sst::cell_series(store, extent, c.i, c.j)) {
            if (month != 0 && s.month != month) continue;
            job.series.push_back(s.temp_c);
            job.last_year = s.year;
        }
        if (static_cast<int>(job.series.size()) <= features.lookback)
            throw InputError("train: block (" + std::to_string(c.i) + ", " + std::to_string(c.j) + ") has " +
                             std::to_string(job.series.size()) + " samples, needs more than " +
                             std::to_string(features.lookback));
        jobs.push_back(std::move(job));
    }

    // Per-block seeds depend only on the block position, so results do not
    // depend on the thread count or scheduling.
    const auto block_seed = [&](const eca::Coord& c) {
        return Rng::derive(run.seed(), static_cast<std::uint64_t>(c.i * extent.cols + c.j));
    };
    std::vector<BlockOutcome> outcomes(jobs.size());
    std::atomic<std::size_t> next{0};
    const auto worker = [&] {
        for (std::size_t k = next++; k < jobs.size(); k = next++) {
            auto cfg = base;
            cfg.seed = block_seed(jobs[k].at);
            try {
                const auto data = tdf::make_dataset(jobs[k].series, features);
                outcomes[k].result = lstm::train(data, cfg);
            } catch (const std::exception& e) {
                outcomes[k].error = e.what();
            }
        }
    };
    auto threads = static_cast<unsigned>(std::max<long long>(0, run.get_int("threads")));
    if (threads == 0) threads = std::max(1u, std::thread::hardware_concurrency());
    threads = std::min<unsigned>(threads, static_cast<unsigned>(jobs.size()));
    std::vector<std::thread> pool;
    for (unsigned t = 1; t < threads; ++t) pool.emplace_back(worker);
    worker();
    for (auto& t : pool) t.join();

    const auto dir = run.output("checkpoints");
    fs::create_directories(dir);
    auto trained = sst::LandMask(mask.rows(), mask.cols(),
                                 std::vector<std::uint8_t>(static_cast<std::size_t>(mask.rows()) * mask.cols(), 1));
    std::ofstream summary(run.output("training_summary.csv"));
    summary << "i,j,samples,final_loss,status\n";
    std::size_t failed = 0;
    for (std::size_t k = 0; k < jobs.size(); ++k) {
        const auto& job = jobs[k];
        const auto name = block_name(job.at);
        summary << job.at.i << ',' << job.at.j << ',' << job.series.size() << ',';
        if (!outcomes[k].result) {
            ++failed;
            summary << ",failed\n";
            std::cerr << "block (" << job.at.i << ", " << job.at.j << ") failed: " << outcomes[k].error << '\n';
            continue;
        }
        const auto& res = *outcomes[k].result;
        lstm::Checkpoint ckpt;
        ckpt.model = res.model;
        ckpt.features = features;
        ckpt.training = base;
        ckpt.training.seed = block_seed(job.at);
        ckpt.last_year = job.last_year;
        ckpt.history = job.series;
        lstm::save_checkpoint(ckpt, dir + "/block_" + name + ".json");
        lstm::write_loss_csv(res.loss_history, dir + "/loss_" + name + ".csv");
        trained.set_land(job.at.i, job.at.j, false);
        summary << text::format_double(res.loss_history.back()) << ",ok\n";
    }
    sst::write_land_mask(trained, dir + "/grid_mask.txt");

    std::cout << "trained " << jobs.size() - failed << " of " << jobs.size() << " blocks\n";
    if (failed > 0) {
        std::cerr << failed << " block(s) failed; see training_summary.csv\n";
        return 1;
    }
    return 0;
}

int forecast(Run& run) {
    const auto dir = run.require("checkpoints");
    run.add_input(dir);
    const auto years = parse_int_list(run.require("years"));
    for (int y : years)
        if (y < 1) throw InputError("forecast: --years entries must be >= 1");
    const int horizon = *std::max_element(years.begin(), years.end());

    const auto mask = sst::load_land_mask(dir + "/grid_mask.txt");
    std::vector<std::vector<double>> temps(years.size(),
                                           std::vector<double>(static_cast<std::size_t>(mask.rows()) * mask.cols(), 0.0));
    for (int i = 0; i < mask.rows(); ++i)
        for (int j = 0; j < mask.cols(); ++j) {
            if (mask.is_land(i, j)) continue;
            const auto path = dir + "/block_" + block_name({i, j}) + ".json";
            if (!fs::exists(path)) throw InputError("forecast: missing checkpoint '" + path + "'");
            const auto ckpt = lstm::load_checkpoint(path);
            const auto path_values = lstm::forecast(ckpt.model, ckpt.history, ckpt.features, horizon);
            for (std::size_t k = 0; k < years.size(); ++k)
                temps[k][static_cast<std::size_t>(i) * mask.cols() + j] =
                    path_values[static_cast<std::size_t>(years[k] - 1)];
        }
    for (std::size_t k = 0; k < years.size(); ++k)
        sst::write_field_csv(sst::GridField(years[k], mask, temps[k]),
                             run.output("field_" + std::to_string(years[k]) + ".csv"));
    std::cout << "wrote " << years.size() << " forecast field(s) for " << mask.water_count() << " blocks\n";
    return 0;
}

}  // namespace

std::vector<Command> model_commands() {
    return {
        {"train",
         "fit one LSTM per water block and write checkpoints",
         {{"input", "", "SST CSV (raw or from ingest)"},
          {"mask", "", "land mask; all water when empty"},
          {"rows", "13", "grid rows"},
          {"cols", "27", "grid columns"},
          {"north_lat", "67.5", "latitude of the northern edge"},
          {"west_lon", "-20.5", "longitude of the western edge"},
          {"month", "8", "month forming the series (0 uses every month)"},
          {"blocks", "", "restrict to blocks, e.g. 3,4;5,6"},
          {"lookback", "7", "history a target needs, in samples"},
          {"adjacent", "6", "adjacent window length"},
          {"seasonal", "1", "seasonal window length"},
          {"samples_per_year", "1", "samples per seasonal period"},
          {"hidden", "16", "hidden units"},
          {"lr", "0.05", "learning rate"},
          {"epochs", "2000", "full-batch epochs"},
          {"clip", "5", "gradient norm clip"},
          {"init_scale", "0.1", "initial weight range"},
          {"conventional_output", "false", "use h = o * tanh(m) instead of tanh(o * m)"},
          {"normalization", "window", "none|global|window"},
          {"threads", "0", "worker threads (0 = all cores)"}},
         train},
        {"forecast",
         "roll trained blocks forward and write yearly fields",
         {{"checkpoints", "", "directory written by train"}, {"years", "10,20,30,40,50", "years ahead, e.g. 10,20 or 1-50"}},
         forecast},
    };
}

}  // namespace fishmig::cli
