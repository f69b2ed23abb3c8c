#pragma once

// Bidirectional LSTM regressor with hand-derived backpropagation through time.
//
// Shapes follow the column-per-sample convention: a batch at one time step is
// a (features x batch) matrix, and a sequence batch is one such matrix per
// step. Gate blocks inside the stacked LSTM matrices are ordered
// forget, input, output, candidate.

#include "wavecast/rng.hpp"

#include <Eigen/Dense>

#include <cstddef>
#include <cstdint>
#include <span>
#include <string>
#include <string_view>
#include <vector>

namespace wavecast {

enum class Activation { Relu, Elu, Tanh, Identity };

Activation parse_activation(std::string_view name);
const char* to_string(Activation a);

struct LstmCellParams {
    Eigen::MatrixXd W;  // 4H x input
    Eigen::MatrixXd U;  // 4H x H
    Eigen::VectorXd b;  // 4H

    Eigen::Index hidden() const { return U.cols(); }
    Eigen::Index input() const { return W.cols(); }

    static LstmCellParams zeros(Eigen::Index input, Eigen::Index hidden);
};

struct LstmStepCache {
    Eigen::MatrixXd x;
    Eigen::MatrixXd h_prev;
    Eigen::MatrixXd c_prev;
    Eigen::MatrixXd gates;  // post-activation f, i, o, g stacked (4H x B)
    Eigen::MatrixXd c;
    Eigen::MatrixXd tanh_c;
};

struct LstmStepOutput {
    Eigen::MatrixXd h;
    Eigen::MatrixXd c;
    LstmStepCache cache;
};

/// One LSTM step for a batch of column vectors.
LstmStepOutput lstm_cell_step(const LstmCellParams& p, const Eigen::MatrixXd& x, const Eigen::MatrixXd& h_prev,
                              const Eigen::MatrixXd& c_prev);

struct BdLstmLayer {
    LstmCellParams forward;
    LstmCellParams backward;
    double dropout = 0.0;

    Eigen::Index hidden() const { return forward.hidden(); }
    Eigen::Index output_width() const { return 2 * forward.hidden(); }
};

using SequenceBatch = std::vector<Eigen::MatrixXd>;  // T x (width x batch)

/// Output at step t is [h_fwd(t); h_bwd(t)], the backward cell having scanned
/// from the last step to the first.
SequenceBatch bdlstm_forward(const BdLstmLayer& layer, const SequenceBatch& sequence);

struct DenseLayer {
    Eigen::MatrixXd W;
    Eigen::VectorXd b;
    Activation activation = Activation::Identity;
};

struct ModelSpec {
    Eigen::Index input_size = 0;
    std::vector<int> bdlstm_sizes;
    std::vector<double> dropout;  // per BDLSTM layer; the last rate repeats
    std::vector<int> fc_sizes;
    Activation activation = Activation::Tanh;
    Eigen::Index horizon = 1;
    double l2 = 0.0;
};

struct BdLstmModel {
    std::vector<BdLstmLayer> bdlstm;
    std::vector<DenseLayer> dense;
    DenseLayer output;
    double l2 = 0.0;

    Eigen::Index input_size() const { return bdlstm.front().forward.input(); }
    Eigen::Index horizon() const { return output.W.rows(); }
    ModelSpec spec() const;

    /// Same topology with every parameter set to zero.
    BdLstmModel zeros_like() const;
};

/// Uniform(-sqrt(1/fan_in), sqrt(1/fan_in)) weights, zero biases except the
/// forget gate at 1.
BdLstmModel init_model(const ModelSpec& spec, Rng& rng);

/// Throws on inconsistent shapes.
void validate_model(const BdLstmModel& model);

struct ParamRef {
    std::string name;
    double* data = nullptr;
    Eigen::Index rows = 0;
    Eigen::Index cols = 0;
    bool is_weight = false;  // weight matrices carry the L2 penalty, biases do not

    std::size_t size() const { return static_cast<std::size_t>(rows * cols); }
    std::span<double> values() const { return {data, size()}; }
};

/// Every trainable tensor in a fixed order; identical for models of the same topology.
std::vector<ParamRef> parameters(BdLstmModel& model);

struct ForwardCache {
    bool valid = false;
    bool training = false;
    std::vector<SequenceBatch> layer_inputs;
    std::vector<std::vector<LstmStepCache>> fwd_steps;
    std::vector<std::vector<LstmStepCache>> bwd_steps;
    std::vector<SequenceBatch> masks;  // inverted-dropout scale per layer output
    std::vector<Eigen::MatrixXd> dense_inputs;
    std::vector<Eigen::MatrixXd> dense_outputs;  // post-activation
};

/// Predictions (horizon x batch). With `training` set, inverted dropout is
/// drawn from `rng` and applied to every BDLSTM layer's output.
Eigen::MatrixXd forward_batch(const BdLstmModel& model, const SequenceBatch& inputs, bool training, Rng* rng,
                              ForwardCache* cache);

/// Single sequence given as (steps x features); returns horizon predictions.
Eigen::VectorXd model_forward(const BdLstmModel& model, const Eigen::MatrixXd& sequence, bool training = false,
                              Rng* rng = nullptr);

/// Mean squared error over all outputs.
double mse(const Eigen::MatrixXd& predictions, const Eigen::MatrixXd& targets);

/// Sum of squared weight-matrix entries (biases excluded).
double weight_penalty(const BdLstmModel& model);

/// mse + l2 * weight_penalty.
double loss(const Eigen::MatrixXd& predictions, const Eigen::MatrixXd& targets, const BdLstmModel& model);

/// Accumulates exact gradients of `loss` into `grads` (shaped like `model`),
/// given d loss / d predictions excluding the L2 term.
void backward(const BdLstmModel& model, const ForwardCache& cache, const Eigen::MatrixXd& d_predictions,
              BdLstmModel& grads);

struct LossAndGradients {
    double loss = 0.0;
    double mse = 0.0;
    BdLstmModel gradients;
};

/// Forward + backward on one batch. A null rng means inference-mode forward
/// (no dropout).
LossAndGradients loss_and_gradients(const BdLstmModel& model, const SequenceBatch& inputs,
                                    const Eigen::MatrixXd& targets, Rng* rng);

enum class OptimizerKind { Adam, RmsProp };

OptimizerKind parse_optimizer(std::string_view name);
const char* to_string(OptimizerKind k);

struct OptimizerState {
    OptimizerKind kind = OptimizerKind::Adam;
    double learning_rate = 0.001;
    double decay = 0.0;
    std::int64_t step = 0;
    double beta1 = 0.9;
    double beta2 = 0.999;
    double rho = 0.9;
    double epsilon = 1e-8;
    std::vector<std::vector<double>> first;   // Adam only
    std::vector<std::vector<double>> second;  // Adam v or RMSprop mean square

    double effective_learning_rate() const {
        return learning_rate / (1.0 + decay * static_cast<double>(step));
    }
};

/// Applies one update. Throws a numeric error, leaving everything untouched,
/// if any gradient entry is not finite.
void optimizer_step(OptimizerState& state, const std::vector<std::span<double>>& params,
                    const std::vector<std::span<const double>>& grads);

void optimizer_step(OptimizerState& state, BdLstmModel& model, BdLstmModel& grads);

}  // namespace wavecast
