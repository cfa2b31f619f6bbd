#include "fishmig/lstm.hpp"

#include <algorithm>
#include <cmath>
#include <fstream>
#include <json.hpp>
#include <numeric>

#include "fishmig/error.hpp"
#include "fishmig/text.hpp"

namespace fishmig::lstm {

using Eigen::MatrixXd;
using Eigen::VectorXd;

double sigmoid(double x) {
    if (x >= 0.0) return 1.0 / (1.0 + std::exp(-x));
    const double e = std::exp(x);
    return e / (1.0 + e);
}

std::string_view to_string(OutputForm f) {
    return f == OutputForm::GateThenTanh ? "gate_then_tanh" : "conventional";
}

OutputForm output_form_from_string(std::string_view s) {
    if (s == "gate_then_tanh") return OutputForm::GateThenTanh;
    if (s == "conventional") return OutputForm::Conventional;
    throw InputError("unknown LSTM output form '" + std::string(s) + "'");
}

std::string_view to_string(Normalization n) {
    switch (n) {
        case Normalization::None: return "none";
        case Normalization::Global: return "global";
        default: return "window";
    }
}

Normalization normalization_from_string(std::string_view s) {
    if (s == "none") return Normalization::None;
    if (s == "global") return Normalization::Global;
    if (s == "window") return Normalization::Window;
    throw InputError("unknown normalization '" + std::string(s) + "'");
}

double Scaler::anchor(std::span<const double> features) const {
    if (!window_relative || features.empty()) return offset;
    double sum = 0.0;
    for (double f : features) sum += f;
    return sum / static_cast<double>(features.size());
}

LstmParams LstmParams::zeros(int input_size, int hidden_size, OutputForm form) {
    if (input_size < 1 || hidden_size < 1) throw InputError("LSTM sizes must be positive");
    const int cols = input_size + hidden_size;
    LstmParams p;
    p.input_size = input_size;
    p.hidden_size = hidden_size;
    p.output_form = form;
    for (MatrixXd* w : {&p.w_input, &p.w_forget, &p.w_output, &p.w_candidate}) *w = MatrixXd::Zero(hidden_size, cols);
    for (VectorXd* b : {&p.b_input, &p.b_forget, &p.b_output, &p.b_candidate}) *b = VectorXd::Zero(hidden_size);
    return p;
}

LstmParams LstmParams::random(int input_size, int hidden_size, double scale, Rng& rng, OutputForm form) {
    LstmParams p = zeros(input_size, hidden_size, form);
    for (MatrixXd* w : {&p.w_input, &p.w_forget, &p.w_output, &p.w_candidate})
        for (Eigen::Index k = 0; k < w->size(); ++k) w->data()[k] = rng.uniform(-scale, scale);
    for (VectorXd* b : {&p.b_input, &p.b_forget, &p.b_output, &p.b_candidate})
        for (Eigen::Index k = 0; k < b->size(); ++k) (*b)[k] = rng.uniform(-scale, scale);
    return p;
}

void LstmParams::validate() const {
    const int cols = input_size + hidden_size;
    for (const MatrixXd* w : {&w_input, &w_forget, &w_output, &w_candidate})
        if (w->rows() != hidden_size || w->cols() != cols) throw InputError("LSTM gate matrix has wrong shape");
    for (const VectorXd* b : {&b_input, &b_forget, &b_output, &b_candidate})
        if (b->size() != hidden_size) throw InputError("LSTM bias has wrong length");
}

LstmState LstmState::zeros(int hidden_size) {
    return {VectorXd::Zero(hidden_size), VectorXd::Zero(hidden_size)};
}

Model Model::zeros(int hidden_size, OutputForm form) {
    return Model{LstmParams::zeros(1, hidden_size, form), Readout{VectorXd::Zero(hidden_size), 0.0}, Scaler{}};
}

Model Model::random(int hidden_size, double init_scale, Rng& rng, OutputForm form) {
    Model m;
    m.cell = LstmParams::random(1, hidden_size, init_scale, rng, form);
    m.readout.weights = VectorXd(hidden_size);
    for (int k = 0; k < hidden_size; ++k) m.readout.weights[k] = rng.uniform(-init_scale, init_scale);
    m.readout.bias = 0.0;
    return m;
}

std::vector<ParamBlock> param_blocks(Model& m) {
    auto mat = [](const char* name, MatrixXd& x) {
        return ParamBlock{name, x.data(), static_cast<std::size_t>(x.size())};
    };
    auto vec = [](const char* name, VectorXd& x) {
        return ParamBlock{name, x.data(), static_cast<std::size_t>(x.size())};
    };
    return {mat("W_input", m.cell.w_input),     mat("W_forget", m.cell.w_forget),
            mat("W_output", m.cell.w_output),   mat("W_candidate", m.cell.w_candidate),
            vec("b_input", m.cell.b_input),     vec("b_forget", m.cell.b_forget),
            vec("b_output", m.cell.b_output),   vec("b_candidate", m.cell.b_candidate),
            vec("readout_w", m.readout.weights), ParamBlock{"readout_b", &m.readout.bias, 1}};
}

std::size_t param_count(const Model& model) {
    const auto h = static_cast<std::size_t>(model.cell.hidden_size);
    const auto cols = static_cast<std::size_t>(model.cell.input_size + model.cell.hidden_size);
    return 4 * h * cols + 4 * h + h + 1;
}

namespace {

struct StepTrace {
    VectorXd concat;  // H
    VectorXd in, forget, out, cand;
    VectorXd memory_prev, memory, hidden;
    VectorXd memory_tanh;  // conventional form only
};

VectorXd sigmoid_vec(const VectorXd& a) {
    return a.unaryExpr([](double v) { return sigmoid(v); });
}

StepTrace step_traced(const LstmParams& p, const VectorXd& x, const LstmState& prev) {
    StepTrace s;
    s.concat.resize(p.input_size + p.hidden_size);
    s.concat << x, prev.hidden;
    s.in = sigmoid_vec(p.w_input * s.concat + p.b_input);
    s.forget = sigmoid_vec(p.w_forget * s.concat + p.b_forget);
    s.out = sigmoid_vec(p.w_output * s.concat + p.b_output);
    s.cand = (p.w_candidate * s.concat + p.b_candidate).array().tanh().matrix();
    s.memory_prev = prev.memory;
    s.memory = s.forget.cwiseProduct(prev.memory) + s.in.cwiseProduct(s.cand);
    if (p.output_form == OutputForm::GateThenTanh) {
        s.hidden = s.out.cwiseProduct(s.memory).array().tanh().matrix();
    } else {
        s.memory_tanh = s.memory.array().tanh().matrix();
        s.hidden = s.out.cwiseProduct(s.memory_tanh);
    }
    return s;
}

void check_input(const LstmParams& p, const VectorXd& x, const LstmState& prev) {
    if (x.size() != p.input_size) throw InputError("LSTM input has wrong length");
    if (prev.memory.size() != p.hidden_size || prev.hidden.size() != p.hidden_size)
        throw InputError("LSTM state has wrong length");
}

void check_model(const Model& m) {
    m.cell.validate();
    if (m.cell.input_size != 1) throw InputError("sequence model expects input_size 1");
    if (m.readout.weights.size() != m.cell.hidden_size) throw InputError("readout has wrong length");
}

std::vector<StepTrace> run_sequence(const Model& m, std::span<const double> features) {
    std::vector<StepTrace> trace;
    trace.reserve(features.size());
    LstmState state = LstmState::zeros(m.cell.hidden_size);
    VectorXd x(1);
    const double a = m.scaler.anchor(features);
    for (double f : features) {
        x[0] = m.scaler.normalize(f, a);
        trace.push_back(step_traced(m.cell, x, state));
        state.memory = trace.back().memory;
        state.hidden = trace.back().hidden;
    }
    return trace;
}

}  // namespace

LstmState lstm_step(const LstmParams& params, const VectorXd& x, const LstmState& prev) {
    params.validate();
    check_input(params, x, prev);
    auto s = step_traced(params, x, prev);
    return {std::move(s.memory), std::move(s.hidden)};
}

double forward(const Model& model, std::span<const double> features) {
    if (features.empty()) throw InputError("forward: empty feature vector");
    check_model(model);
    const auto trace = run_sequence(model, features);
    const double y = model.readout.weights.dot(trace.back().hidden) + model.readout.bias;
    return model.scaler.denormalize(y, model.scaler.anchor(features));
}

double mse_loss(std::span<const double> predictions, std::span<const double> targets) {
    if (predictions.size() != targets.size())
        throw InputError("mse_loss: " + std::to_string(predictions.size()) + " predictions vs " +
                         std::to_string(targets.size()) + " targets");
    if (predictions.empty()) throw InputError("mse_loss: empty input");
    double acc = 0.0;
    for (std::size_t k = 0; k < predictions.size(); ++k) {
        const double d = predictions[k] - targets[k];
        acc += d * d;
    }
    return acc / static_cast<double>(predictions.size());
}

Gradients bptt_gradients(const Model& model, std::span<const tdf::TrainingPair> batch, double clip_norm) {
    if (batch.empty()) throw InputError("bptt_gradients: empty batch");
    check_model(model);
    const LstmParams& p = model.cell;
    const int hs = p.hidden_size;
    const double n = static_cast<double>(batch.size());

    Gradients g;
    g.grad = Model::zeros(hs, p.output_form);
    LstmParams& gp = g.grad.cell;
    Readout& gr = g.grad.readout;

    double loss = 0.0;
    for (const auto& pair : batch) {
        if (pair.features.empty()) throw InputError("bptt_gradients: empty feature vector");
        const auto trace = run_sequence(model, pair.features);
        const VectorXd& h_last = trace.back().hidden;
        const double pred = model.scaler.denormalize(model.readout.weights.dot(h_last) + model.readout.bias,
                                                     model.scaler.anchor(pair.features));
        const double err = pred - pair.target;
        loss += err * err;

        // dL/d(readout pre-scale output)
        const double dy = 2.0 * err / n * model.scaler.scale;
        gr.weights += dy * h_last;
        gr.bias += dy;

        VectorXd dh = dy * model.readout.weights;
        VectorXd dm_next = VectorXd::Zero(hs);
        for (auto t = trace.size(); t-- > 0;) {
            const StepTrace& s = trace[t];
            VectorXd d_out, dm;
            if (p.output_form == OutputForm::GateThenTanh) {
                const VectorXd dz = dh.cwiseProduct((1.0 - s.hidden.array().square()).matrix());
                d_out = dz.cwiseProduct(s.memory);
                dm = dm_next + dz.cwiseProduct(s.out);
            } else {
                d_out = dh.cwiseProduct(s.memory_tanh);
                dm = dm_next +
                     dh.cwiseProduct(s.out).cwiseProduct((1.0 - s.memory_tanh.array().square()).matrix());
            }
            const VectorXd da_in = (dm.cwiseProduct(s.cand).array() * s.in.array() * (1.0 - s.in.array())).matrix();
            const VectorXd da_forget =
                (dm.cwiseProduct(s.memory_prev).array() * s.forget.array() * (1.0 - s.forget.array())).matrix();
            const VectorXd da_out = (d_out.array() * s.out.array() * (1.0 - s.out.array())).matrix();
            const VectorXd da_cand = (dm.cwiseProduct(s.in).array() * (1.0 - s.cand.array().square())).matrix();

            gp.w_input.noalias() += da_in * s.concat.transpose();
            gp.w_forget.noalias() += da_forget * s.concat.transpose();
            gp.w_output.noalias() += da_out * s.concat.transpose();
            gp.w_candidate.noalias() += da_cand * s.concat.transpose();
            gp.b_input += da_in;
            gp.b_forget += da_forget;
            gp.b_output += da_out;
            gp.b_candidate += da_cand;

            const VectorXd d_concat = p.w_input.transpose() * da_in + p.w_forget.transpose() * da_forget +
                                      p.w_output.transpose() * da_out + p.w_candidate.transpose() * da_cand;
            dh = d_concat.tail(hs);
            dm_next = dm.cwiseProduct(s.forget);
        }
    }
    g.loss = loss / n;

    double sq = 0.0;
    for (const auto& blk : param_blocks(g.grad)) {
        for (std::size_t k = 0; k < blk.size; ++k) {
            if (!std::isfinite(blk.data[k])) throw NumericError("non-finite gradient in block " + blk.name);
            sq += blk.data[k] * blk.data[k];
        }
    }
    g.norm_before_clip = std::sqrt(sq);
    if (g.norm_before_clip > clip_norm) {
        const double f = clip_norm / g.norm_before_clip;
        for (const auto& blk : param_blocks(g.grad))
            for (std::size_t k = 0; k < blk.size; ++k) blk.data[k] *= f;
        g.clipped = true;
    }
    return g;
}

void TrainConfig::validate() const {
    if (!(learning_rate > 0.0)) throw InputError("learning rate must be > 0");
    if (epochs < 1) throw InputError("epochs must be >= 1");
    if (!(clip_norm > 0.0)) throw InputError("gradient clip threshold must be > 0");
    if (hidden_size < 1) throw InputError("hidden size must be >= 1");
    if (!(init_scale >= 0.0)) throw InputError("initialization scale must be >= 0");
}

TrainResult train(std::span<const tdf::TrainingPair> dataset, const TrainConfig& cfg) {
    cfg.validate();
    if (dataset.empty()) throw InputError("train: empty dataset");

    Scaler scaler;
    if (cfg.normalization != Normalization::None) {
        scaler.window_relative = cfg.normalization == Normalization::Window;
        // Spread of targets around their anchors (the dataset mean, or each window's mean).
        double mean = 0.0;
        for (const auto& p : dataset) mean += p.target;
        mean /= static_cast<double>(dataset.size());
        if (!scaler.window_relative) scaler.offset = mean;
        double var = 0.0;
        for (const auto& p : dataset) {
            const double d = p.target - scaler.anchor(p.features);
            var += d * d;
        }
        const double sd = std::sqrt(var / static_cast<double>(dataset.size()));
        scaler.scale = sd > 1e-9 ? sd : 1.0;
    }
    // Work in normalized units with an identity scaler, then attach the real one.
    std::vector<tdf::TrainingPair> work(dataset.begin(), dataset.end());
    for (auto& p : work) {
        const double a = scaler.anchor(p.features);
        for (double& f : p.features) f = scaler.normalize(f, a);
        p.target = scaler.normalize(p.target, a);
    }

    Rng rng(cfg.seed);
    TrainResult result;
    result.model = Model::random(cfg.hidden_size, cfg.init_scale, rng, cfg.output_form);
    result.loss_history.reserve(static_cast<std::size_t>(cfg.epochs));
    const double loss_scale = scaler.scale * scaler.scale;

    for (int epoch = 0; epoch < cfg.epochs; ++epoch) {
        Gradients g;
        try {
            g = bptt_gradients(result.model, work, cfg.clip_norm);
        } catch (const NumericError& e) {
            throw NumericError("training diverged at epoch " + std::to_string(epoch) + ": " + e.what());
        }
        if (!std::isfinite(g.loss))
            throw NumericError("training diverged at epoch " + std::to_string(epoch) + ": loss is not finite");
        result.loss_history.push_back(g.loss * loss_scale);
        auto params = param_blocks(result.model);
        const auto grads = param_blocks(g.grad);
        for (std::size_t b = 0; b < params.size(); ++b)
            for (std::size_t k = 0; k < params[b].size; ++k) params[b].data[k] -= cfg.learning_rate * grads[b].data[k];
    }
    result.model.scaler = scaler;
    return result;
}

std::vector<double> forecast(const Model& model, std::span<const double> series, const tdf::TdfConfig& cfg,
                             int horizon) {
    if (horizon < 1) throw InputError("forecast horizon must be >= 1");
    cfg.validate();
    if (series.size() < static_cast<std::size_t>(cfg.lookback))
        throw InputError("forecast: series of length " + std::to_string(series.size()) +
                         " is shorter than lookback " + std::to_string(cfg.lookback));
    std::vector<double> history(series.begin(), series.end());
    std::vector<double> out;
    out.reserve(static_cast<std::size_t>(horizon));
    for (int step = 0; step < horizon; ++step) {
        // Placeholder slot for the target so build_features sees a full index.
        history.push_back(0.0);
        const auto features = tdf::build_features(history, history.size() - 1, cfg);
        const double y = forward(model, features);
        history.back() = y;
        out.push_back(y);
    }
    return out;
}

// ---------------------------------------------------------------- checkpoints

namespace {

constexpr const char* kFormat = "fishmig-lstm";
constexpr int kVersion = 1;

nlohmann::json matrix_json(const MatrixXd& m) {
    nlohmann::json rows = nlohmann::json::array();
    for (Eigen::Index r = 0; r < m.rows(); ++r) {
        nlohmann::json row = nlohmann::json::array();
        for (Eigen::Index c = 0; c < m.cols(); ++c) row.push_back(m(r, c));
        rows.push_back(std::move(row));
    }
    return rows;
}

nlohmann::json vector_json(const VectorXd& v) {
    return std::vector<double>(v.data(), v.data() + v.size());
}

MatrixXd matrix_from(const nlohmann::json& j, int rows, int cols) {
    if (!j.is_array() || static_cast<int>(j.size()) != rows) throw InputError("checkpoint matrix has wrong shape");
    MatrixXd m(rows, cols);
    for (int r = 0; r < rows; ++r) {
        if (!j[r].is_array() || static_cast<int>(j[r].size()) != cols)
            throw InputError("checkpoint matrix has wrong shape");
        for (int c = 0; c < cols; ++c) m(r, c) = j[r][c].get<double>();
    }
    return m;
}

VectorXd vector_from(const nlohmann::json& j, int size) {
    const auto v = j.get<std::vector<double>>();
    if (static_cast<int>(v.size()) != size) throw InputError("checkpoint vector has wrong length");
    return Eigen::Map<const VectorXd>(v.data(), size);
}

}  // namespace

void save_checkpoint(const Checkpoint& ck, const std::string& path) {
    const auto& c = ck.model.cell;
    nlohmann::json j;
    j["format"] = kFormat;
    j["version"] = kVersion;
    j["input_size"] = c.input_size;
    j["hidden_size"] = c.hidden_size;
    j["output_form"] = std::string(to_string(c.output_form));
    j["W_input"] = matrix_json(c.w_input);
    j["W_forget"] = matrix_json(c.w_forget);
    j["W_output"] = matrix_json(c.w_output);
    j["W_candidate"] = matrix_json(c.w_candidate);
    j["b_input"] = vector_json(c.b_input);
    j["b_forget"] = vector_json(c.b_forget);
    j["b_output"] = vector_json(c.b_output);
    j["b_candidate"] = vector_json(c.b_candidate);
    j["readout"] = {{"weights", vector_json(ck.model.readout.weights)}, {"bias", ck.model.readout.bias}};
    j["scaler"] = {{"offset", ck.model.scaler.offset},
                   {"scale", ck.model.scaler.scale},
                   {"window_relative", ck.model.scaler.window_relative}};
    j["features"] = {{"lookback", ck.features.lookback},
                     {"adjacent", ck.features.adjacent},
                     {"seasonal", ck.features.seasonal},
                     {"samples_per_year", ck.features.samples_per_year}};
    j["training"] = {{"hidden_size", ck.training.hidden_size},     {"learning_rate", ck.training.learning_rate},
                     {"epochs", ck.training.epochs},               {"clip_norm", ck.training.clip_norm},
                     {"seed", ck.training.seed},                   {"init_scale", ck.training.init_scale},
                     {"normalization", std::string(to_string(ck.training.normalization))}};
    j["last_year"] = ck.last_year;
    j["history"] = ck.history;

    std::ofstream out(path);
    if (!out) throw InputError("cannot write '" + path + "'");
    out << j.dump(1) << '\n';
    if (!out) throw InputError("write failed for '" + path + "'");
}

Checkpoint load_checkpoint(const std::string& path) {
    std::ifstream in(path);
    if (!in) throw InputError("cannot open '" + path + "'");
    try {
        const auto j = nlohmann::json::parse(in);
        if (j.at("format") != kFormat) throw InputError("'" + path + "' is not an LSTM checkpoint");
        if (j.at("version").get<int>() != kVersion)
            throw InputError("'" + path + "' has unsupported checkpoint version");
        Checkpoint ck;
        const int in_sz = j.at("input_size").get<int>();
        const int hs = j.at("hidden_size").get<int>();
        auto& c = ck.model.cell;
        c = LstmParams::zeros(in_sz, hs, output_form_from_string(j.at("output_form").get<std::string>()));
        c.w_input = matrix_from(j.at("W_input"), hs, in_sz + hs);
        c.w_forget = matrix_from(j.at("W_forget"), hs, in_sz + hs);
        c.w_output = matrix_from(j.at("W_output"), hs, in_sz + hs);
        c.w_candidate = matrix_from(j.at("W_candidate"), hs, in_sz + hs);
        c.b_input = vector_from(j.at("b_input"), hs);
        c.b_forget = vector_from(j.at("b_forget"), hs);
        c.b_output = vector_from(j.at("b_output"), hs);
        c.b_candidate = vector_from(j.at("b_candidate"), hs);
        ck.model.readout.weights = vector_from(j.at("readout").at("weights"), hs);
        ck.model.readout.bias = j.at("readout").at("bias").get<double>();
        ck.model.scaler.offset = j.at("scaler").at("offset").get<double>();
        ck.model.scaler.scale = j.at("scaler").at("scale").get<double>();
        ck.model.scaler.window_relative = j.at("scaler").at("window_relative").get<bool>();
        const auto& f = j.at("features");
        ck.features = tdf::TdfConfig{f.at("lookback").get<int>(), f.at("adjacent").get<int>(),
                                     f.at("seasonal").get<int>(), f.at("samples_per_year").get<int>()};
        const auto& t = j.at("training");
        ck.training.hidden_size = t.at("hidden_size").get<int>();
        ck.training.learning_rate = t.at("learning_rate").get<double>();
        ck.training.epochs = t.at("epochs").get<int>();
        ck.training.clip_norm = t.at("clip_norm").get<double>();
        ck.training.seed = t.at("seed").get<std::uint64_t>();
        ck.training.init_scale = t.at("init_scale").get<double>();
        ck.training.normalization = normalization_from_string(t.at("normalization").get<std::string>());
        ck.training.output_form = c.output_form;
        ck.last_year = j.at("last_year").get<int>();
        ck.history = j.at("history").get<std::vector<double>>();
        return ck;
    } catch (const nlohmann::json::exception& e) {
        throw InputError("'" + path + "' is not a valid checkpoint: " + e.what());
    }
}

void write_loss_csv(std::span<const double> losses, const std::string& path) {
    std::ofstream out(path);
    if (!out) throw InputError("cannot write '" + path + "'");
    out << "epoch,loss\n";
    for (std::size_t e = 0; e < losses.size(); ++e) out << e << ',' << text::format_double(losses[e]) << '\n';
}

}  // namespace fishmig::lstm
