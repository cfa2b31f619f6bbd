#pragma once

// Single-layer LSTM regressor for one grid block's SST series.
//
// Cell equations:
//   H   = [x_t; h_{t-1}]
//   i_t = sigmoid(W_i H + b_i),  f_t = sigmoid(W_f H + b_f),  o_t = sigmoid(W_o H + b_o)
//   c_t = tanh(W_c H + b_c)
//   m_t = f_t * m_{t-1} + i_t * c_t
//   h_t = tanh(o_t * m_t)            (OutputForm::GateThenTanh, default)
//   h_t = o_t * tanh(m_t)            (OutputForm::Conventional)
// A linear readout maps the final h_t to a temperature.

#include <Eigen/Dense>
#include <cstdint>
#include <limits>
#include <span>
#include <string>
#include <string_view>
#include <vector>

#include "fishmig/rng.hpp"
#include "fishmig/tdf.hpp"

namespace fishmig::lstm {

/// Logistic function, stable for large |x|.
double sigmoid(double x);

enum class OutputForm { GateThenTanh, Conventional };

std::string_view to_string(OutputForm f);
OutputForm output_form_from_string(std::string_view s);

struct LstmParams {
    int input_size = 1;
    int hidden_size = 1;
    OutputForm output_form = OutputForm::GateThenTanh;
    // Each gate matrix is hidden x (input + hidden).
    Eigen::MatrixXd w_input, w_forget, w_output, w_candidate;
    Eigen::VectorXd b_input, b_forget, b_output, b_candidate;

    static LstmParams zeros(int input_size, int hidden_size, OutputForm form = OutputForm::GateThenTanh);
    /// Entries uniform in [-scale, scale].
    static LstmParams random(int input_size, int hidden_size, double scale, Rng& rng,
                             OutputForm form = OutputForm::GateThenTanh);

    void validate() const;
};

struct LstmState {
    Eigen::VectorXd memory;  ///< m_t
    Eigen::VectorXd hidden;  ///< h_t

    static LstmState zeros(int hidden_size);
};

struct Readout {
    Eigen::VectorXd weights;
    double bias = 0.0;
};

/// Affine map between temperatures and the network's working units:
/// network inputs are (x - a) / scale and predictions are scale * y + a,
/// where the anchor a is the fixed `offset`, or the mean of the feature
/// vector being evaluated when `window_relative` is set. Identity by default.
struct Scaler {
    double offset = 0.0;
    double scale = 1.0;
    bool window_relative = false;

    double anchor(std::span<const double> features) const;
    double normalize(double x, double anchor) const { return (x - anchor) / scale; }
    double denormalize(double y, double anchor) const { return scale * y + anchor; }
};

struct Model {
    LstmParams cell;
    Readout readout;
    Scaler scaler;

    static Model zeros(int hidden_size, OutputForm form = OutputForm::GateThenTanh);
    static Model random(int hidden_size, double init_scale, Rng& rng, OutputForm form = OutputForm::GateThenTanh);
};

/// Contiguous view of one parameter block, for flat iteration.
struct ParamBlock {
    std::string name;
    double* data;
    std::size_t size;
};
std::vector<ParamBlock> param_blocks(Model& model);
std::size_t param_count(const Model& model);

LstmState lstm_step(const LstmParams& params, const Eigen::VectorXd& x, const LstmState& prev);

/// Feeds one feature per time step from a zero state and reads out the final h.
double forward(const Model& model, std::span<const double> features);

double mse_loss(std::span<const double> predictions, std::span<const double> targets);

struct Gradients {
    Model grad;  ///< same shapes as the model; scaler unused
    double loss = 0.0;
    double norm_before_clip = 0.0;
    bool clipped = false;
};

/// Exact gradients of the batch MSE with respect to every cell and readout
/// parameter, unrolled over each feature sequence. If the global norm
/// exceeds `clip_norm` the gradients are rescaled to that norm.
/// Throws NumericError naming the first block with a non-finite entry.
Gradients bptt_gradients(const Model& model, std::span<const tdf::TrainingPair> batch,
                         double clip_norm = std::numeric_limits<double>::infinity());

/// How train() maps temperatures into network units.
enum class Normalization {
    None,    ///< raw temperatures
    Global,  ///< standardize with the dataset's target mean and spread
    Window,  ///< centre each feature vector on its own mean; scale by the spread of target departures
};

std::string_view to_string(Normalization n);
Normalization normalization_from_string(std::string_view s);

struct TrainConfig {
    int hidden_size = 16;
    double learning_rate = 0.05;
    int epochs = 2000;
    double clip_norm = 5.0;
    std::uint64_t seed = 1;
    double init_scale = 0.1;
    OutputForm output_form = OutputForm::GateThenTanh;
    Normalization normalization = Normalization::Window;

    void validate() const;
};

struct TrainResult {
    Model model;
    std::vector<double> loss_history;  ///< full-batch MSE per epoch, in C^2, before that epoch's update
};

/// Full-batch gradient descent. Throws NumericError with the epoch index
/// if the loss becomes non-finite.
TrainResult train(std::span<const tdf::TrainingPair> dataset, const TrainConfig& cfg);

/// Rolling forecast: each prediction is appended to the history and feeds
/// the next step. Returns `horizon` values.
std::vector<double> forecast(const Model& model, std::span<const double> series, const tdf::TdfConfig& cfg,
                             int horizon);

/// Versioned JSON checkpoint holding every matrix, bias, the readout,
/// scaler, and the feature/training settings it was produced with.
struct Checkpoint {
    Model model;
    tdf::TdfConfig features;
    TrainConfig training;
    int last_year = 0;               ///< last observed year of the training series
    std::vector<double> history;     ///< series tail needed to start a forecast
};

void save_checkpoint(const Checkpoint& ckpt, const std::string& path);
Checkpoint load_checkpoint(const std::string& path);

void write_loss_csv(std::span<const double> losses, const std::string& path);

}  // namespace fishmig::lstm
