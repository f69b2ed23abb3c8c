#include "wavecast/network.hpp"

#include "wavecast/error.hpp"

#include <cmath>

namespace wavecast {

Activation parse_activation(std::string_view name) {
    if (name == "relu" || name == "ReLU") return Activation::Relu;
    if (name == "elu" || name == "ELU") return Activation::Elu;
    if (name == "tanh" || name == "Tanh") return Activation::Tanh;
    if (name == "identity" || name == "Identity" || name == "linear") return Activation::Identity;
    fail(ErrorKind::Usage, "unknown activation '" + std::string(name) + "'");
}

const char* to_string(Activation a) {
    switch (a) {
    case Activation::Relu: return "relu";
    case Activation::Elu: return "elu";
    case Activation::Tanh: return "tanh";
    case Activation::Identity: return "identity";
    }
    return "identity";
}

OptimizerKind parse_optimizer(std::string_view name) {
    if (name == "adam" || name == "Adam") return OptimizerKind::Adam;
    if (name == "rmsprop" || name == "RMSprop") return OptimizerKind::RmsProp;
    fail(ErrorKind::Usage, "unknown optimizer '" + std::string(name) + "'");
}

const char* to_string(OptimizerKind k) { return k == OptimizerKind::Adam ? "adam" : "rmsprop"; }

LstmCellParams LstmCellParams::zeros(Eigen::Index input, Eigen::Index hidden) {
    LstmCellParams p;
    p.W = Eigen::MatrixXd::Zero(4 * hidden, input);
    p.U = Eigen::MatrixXd::Zero(4 * hidden, hidden);
    p.b = Eigen::VectorXd::Zero(4 * hidden);
    return p;
}

namespace {

Eigen::MatrixXd sigmoid(const Eigen::MatrixXd& z) {
    return z.unaryExpr([](double v) { return 1.0 / (1.0 + std::exp(-v)); });
}

Eigen::MatrixXd activate(Activation a, const Eigen::MatrixXd& z) {
    switch (a) {
    case Activation::Relu: return z.cwiseMax(0.0);
    case Activation::Elu: return z.unaryExpr([](double v) { return v > 0.0 ? v : std::expm1(v); });
    case Activation::Tanh: return z.array().tanh().matrix();
    case Activation::Identity: return z;
    }
    return z;
}

// Derivative in terms of the activation's output.
Eigen::MatrixXd activation_slope(Activation a, const Eigen::MatrixXd& out) {
    switch (a) {
    case Activation::Relu: return out.unaryExpr([](double v) { return v > 0.0 ? 1.0 : 0.0; });
    case Activation::Elu: return out.unaryExpr([](double v) { return v > 0.0 ? 1.0 : v + 1.0; });
    case Activation::Tanh: return (1.0 - out.array().square()).matrix();
    case Activation::Identity: return Eigen::MatrixXd::Ones(out.rows(), out.cols());
    }
    return Eigen::MatrixXd::Ones(out.rows(), out.cols());
}

// Advances (h, c) by one step; fills `cache` when given.
void cell_step(const LstmCellParams& p, const Eigen::MatrixXd& x, Eigen::MatrixXd& h, Eigen::MatrixXd& c,
               LstmStepCache* cache) {
    const Eigen::Index H = p.hidden();
    const Eigen::Index B = x.cols();
    Eigen::MatrixXd z = p.W * x + p.U * h;
    z.colwise() += p.b;
    Eigen::MatrixXd gates(4 * H, B);
    gates.topRows(3 * H) = sigmoid(z.topRows(3 * H));
    gates.bottomRows(H) = z.bottomRows(H).array().tanh().matrix();

    if (cache) {
        cache->x = x;
        cache->h_prev = h;
        cache->c_prev = c;
    }
    c = gates.topRows(H).cwiseProduct(c) + gates.middleRows(H, H).cwiseProduct(gates.bottomRows(H));
    Eigen::MatrixXd tanh_c = c.array().tanh().matrix();
    h = gates.middleRows(2 * H, H).cwiseProduct(tanh_c);
    if (cache) {
        cache->gates = std::move(gates);
        cache->c = c;
        cache->tanh_c = std::move(tanh_c);
    }
}

// Backpropagates one step. `dc` carries d/dC_t in and d/dC_{t-1} out.
void cell_step_backward(const LstmCellParams& p, const LstmStepCache& s, const Eigen::MatrixXd& dh, Eigen::MatrixXd& dc,
                        Eigen::MatrixXd& dh_prev, Eigen::MatrixXd& dx, LstmCellParams& g) {
    const Eigen::Index H = p.hidden();
    const auto f = s.gates.topRows(H).array();
    const auto i = s.gates.middleRows(H, H).array();
    const auto o = s.gates.middleRows(2 * H, H).array();
    const auto cand = s.gates.bottomRows(H).array();
    const auto tc = s.tanh_c.array();

    const Eigen::ArrayXXd d_o = dh.array() * tc;
    const Eigen::ArrayXXd d_c = dc.array() + dh.array() * o * (1.0 - tc.square());

    Eigen::MatrixXd dz(4 * H, dh.cols());
    dz.topRows(H) = (d_c * s.c_prev.array() * f * (1.0 - f)).matrix();
    dz.middleRows(H, H) = (d_c * cand * i * (1.0 - i)).matrix();
    dz.middleRows(2 * H, H) = (d_o * o * (1.0 - o)).matrix();
    dz.bottomRows(H) = (d_c * i * (1.0 - cand.square())).matrix();

    dc = (d_c * f).matrix();
    g.W.noalias() += dz * s.x.transpose();
    g.U.noalias() += dz * s.h_prev.transpose();
    g.b.noalias() += dz.rowwise().sum();
    dx.noalias() += p.W.transpose() * dz;
    dh_prev.noalias() = p.U.transpose() * dz;
}

void check_sequence(const SequenceBatch& seq, Eigen::Index width) {
    require(!seq.empty(), ErrorKind::Usage, "empty input sequence");
    const Eigen::Index batch = seq.front().cols();
    require(batch > 0, ErrorKind::Usage, "empty batch");
    for (const auto& step : seq) {
        require(step.rows() == width && step.cols() == batch, ErrorKind::Usage,
                "sequence step has shape " + std::to_string(step.rows()) + "x" + std::to_string(step.cols()) +
                    ", expected " + std::to_string(width) + "x" + std::to_string(batch));
    }
}

// Runs one direction over the sequence; `reverse` scans from the last step.
void scan(const LstmCellParams& p, const SequenceBatch& xs, bool reverse, SequenceBatch& hs,
          std::vector<LstmStepCache>* caches) {
    const std::size_t T = xs.size();
    const Eigen::Index B = xs.front().cols();
    Eigen::MatrixXd h = Eigen::MatrixXd::Zero(p.hidden(), B);
    Eigen::MatrixXd c = Eigen::MatrixXd::Zero(p.hidden(), B);
    hs.resize(T);
    if (caches) {
        caches->assign(T, {});
    }
    for (std::size_t k = 0; k < T; ++k) {
        const std::size_t t = reverse ? T - 1 - k : k;
        cell_step(p, xs[t], h, c, caches ? &(*caches)[t] : nullptr);
        hs[t] = h;
    }
}

void fill_uniform(Eigen::MatrixXd& m, double bound, Rng& rng) {
    for (Eigen::Index r = 0; r < m.rows(); ++r) {
        for (Eigen::Index c = 0; c < m.cols(); ++c) {
            m(r, c) = rng.uniform(-bound, bound);
        }
    }
}

LstmCellParams init_cell(Eigen::Index input, Eigen::Index hidden, Rng& rng) {
    auto p = LstmCellParams::zeros(input, hidden);
    fill_uniform(p.W, std::sqrt(1.0 / static_cast<double>(input)), rng);
    fill_uniform(p.U, std::sqrt(1.0 / static_cast<double>(hidden)), rng);
    p.b.head(hidden).setOnes();
    return p;
}

DenseLayer init_dense(Eigen::Index input, Eigen::Index output, Activation a, Rng& rng) {
    DenseLayer d;
    d.W = Eigen::MatrixXd::Zero(output, input);
    d.b = Eigen::VectorXd::Zero(output);
    d.activation = a;
    fill_uniform(d.W, std::sqrt(1.0 / static_cast<double>(input)), rng);
    return d;
}

void check_cell(const LstmCellParams& p, const std::string& where) {
    const Eigen::Index H = p.U.cols();
    require(H > 0 && p.U.rows() == 4 * H && p.W.rows() == 4 * H && p.b.size() == 4 * H && p.W.cols() > 0,
            ErrorKind::Usage, where + ": inconsistent LSTM parameter shapes");
    require(p.W.allFinite() && p.U.allFinite() && p.b.allFinite(), ErrorKind::Numeric,
            where + ": non-finite LSTM parameters");
}

}  // namespace

LstmStepOutput lstm_cell_step(const LstmCellParams& p, const Eigen::MatrixXd& x, const Eigen::MatrixXd& h_prev,
                              const Eigen::MatrixXd& c_prev) {
    check_cell(p, "lstm_cell_step");
    require(x.rows() == p.input() && h_prev.rows() == p.hidden() && c_prev.rows() == p.hidden() &&
                h_prev.cols() == x.cols() && c_prev.cols() == x.cols(),
            ErrorKind::Usage, "lstm_cell_step: shape mismatch");
    LstmStepOutput out;
    out.h = h_prev;
    out.c = c_prev;
    cell_step(p, x, out.h, out.c, &out.cache);
    require(out.h.allFinite() && out.c.allFinite(), ErrorKind::Numeric, "lstm_cell_step: non-finite output");
    return out;
}

SequenceBatch bdlstm_forward(const BdLstmLayer& layer, const SequenceBatch& sequence) {
    check_sequence(sequence, layer.forward.input());
    SequenceBatch fwd, bwd;
    scan(layer.forward, sequence, false, fwd, nullptr);
    scan(layer.backward, sequence, true, bwd, nullptr);
    SequenceBatch out(sequence.size());
    for (std::size_t t = 0; t < sequence.size(); ++t) {
        out[t].resize(layer.output_width(), sequence[t].cols());
        out[t] << fwd[t], bwd[t];
    }
    return out;
}

ModelSpec BdLstmModel::spec() const {
    ModelSpec s;
    s.input_size = input_size();
    for (const auto& l : bdlstm) {
        s.bdlstm_sizes.push_back(static_cast<int>(l.hidden()));
        s.dropout.push_back(l.dropout);
    }
    for (const auto& d : dense) {
        s.fc_sizes.push_back(static_cast<int>(d.W.rows()));
        s.activation = d.activation;
    }
    s.horizon = horizon();
    s.l2 = l2;
    return s;
}

BdLstmModel BdLstmModel::zeros_like() const {
    BdLstmModel z = *this;
    for (auto& p : parameters(z)) {
        std::fill(p.data, p.data + p.size(), 0.0);
    }
    return z;
}

BdLstmModel init_model(const ModelSpec& spec, Rng& rng) {
    require(spec.input_size >= 1, ErrorKind::Usage, "model input size must be positive");
    require(!spec.bdlstm_sizes.empty(), ErrorKind::Usage, "model needs at least one BDLSTM layer");
    require(spec.horizon >= 1, ErrorKind::Usage, "model horizon must be positive");
    require(spec.l2 >= 0.0, ErrorKind::Usage, "l2 must be non-negative");
    for (const double p : spec.dropout) {
        require(p >= 0.0 && p < 1.0, ErrorKind::Usage, "dropout rate must be in [0, 1)");
    }

    BdLstmModel m;
    m.l2 = spec.l2;
    Eigen::Index width = spec.input_size;
    for (std::size_t l = 0; l < spec.bdlstm_sizes.size(); ++l) {
        const int h = spec.bdlstm_sizes[l];
        require(h >= 1, ErrorKind::Usage, "BDLSTM width must be positive");
        BdLstmLayer layer;
        layer.forward = init_cell(width, h, rng);
        layer.backward = init_cell(width, h, rng);
        if (!spec.dropout.empty()) {
            layer.dropout = spec.dropout[std::min(l, spec.dropout.size() - 1)];
        }
        width = layer.output_width();
        m.bdlstm.push_back(std::move(layer));
    }
    for (const int n : spec.fc_sizes) {
        require(n >= 1, ErrorKind::Usage, "dense width must be positive");
        m.dense.push_back(init_dense(width, n, spec.activation, rng));
        width = n;
    }
    m.output = init_dense(width, spec.horizon, Activation::Identity, rng);
    return m;
}

void validate_model(const BdLstmModel& model) {
    require(!model.bdlstm.empty(), ErrorKind::Usage, "model has no BDLSTM layers");
    Eigen::Index width = model.bdlstm.front().forward.input();
    for (std::size_t l = 0; l < model.bdlstm.size(); ++l) {
        const auto& layer = model.bdlstm[l];
        const std::string where = "bdlstm" + std::to_string(l);
        check_cell(layer.forward, where);
        check_cell(layer.backward, where);
        require(layer.forward.input() == width && layer.backward.input() == width &&
                    layer.forward.hidden() == layer.backward.hidden(),
                ErrorKind::Usage, where + ": layer widths do not chain");
        require(layer.dropout >= 0.0 && layer.dropout < 1.0, ErrorKind::Usage, where + ": bad dropout rate");
        width = layer.output_width();
    }
    auto check_dense = [&](const DenseLayer& d, const std::string& where) {
        require(d.W.cols() == width && d.b.size() == d.W.rows() && d.W.rows() > 0, ErrorKind::Usage,
                where + ": layer widths do not chain");
        require(d.W.allFinite() && d.b.allFinite(), ErrorKind::Numeric, where + ": non-finite parameters");
        width = d.W.rows();
    };
    for (std::size_t k = 0; k < model.dense.size(); ++k) {
        check_dense(model.dense[k], "dense" + std::to_string(k));
    }
    check_dense(model.output, "output");
    require(model.output.activation == Activation::Identity, ErrorKind::Usage, "output layer must be linear");
    require(model.l2 >= 0.0, ErrorKind::Usage, "l2 must be non-negative");
}

std::vector<ParamRef> parameters(BdLstmModel& model) {
    std::vector<ParamRef> out;
    auto add = [&](std::string name, Eigen::MatrixXd& m, bool weight) {
        out.push_back({std::move(name), m.data(), m.rows(), m.cols(), weight});
    };
    auto add_vec = [&](std::string name, Eigen::VectorXd& v) {
        out.push_back({std::move(name), v.data(), v.size(), 1, false});
    };
    for (std::size_t l = 0; l < model.bdlstm.size(); ++l) {
        const std::string base = "bdlstm" + std::to_string(l);
        const std::pair<const char*, LstmCellParams*> cells[] = {{"fwd", &model.bdlstm[l].forward},
                                                                 {"bwd", &model.bdlstm[l].backward}};
        for (const auto& [dir, cell] : cells) {
            add(base + "." + dir + ".W", cell->W, true);
            add(base + "." + dir + ".U", cell->U, true);
            add_vec(base + "." + dir + ".b", cell->b);
        }
    }
    for (std::size_t k = 0; k < model.dense.size(); ++k) {
        const std::string base = "dense" + std::to_string(k);
        add(base + ".W", model.dense[k].W, true);
        add_vec(base + ".b", model.dense[k].b);
    }
    add("output.W", model.output.W, true);
    add_vec("output.b", model.output.b);
    return out;
}

Eigen::MatrixXd forward_batch(const BdLstmModel& model, const SequenceBatch& inputs, bool training, Rng* rng,
                              ForwardCache* cache) {
    check_sequence(inputs, model.input_size());
    const bool use_dropout = training && rng != nullptr;
    const std::size_t T = inputs.size();
    const std::size_t L = model.bdlstm.size();
    if (cache) {
        *cache = ForwardCache{};
        cache->training = use_dropout;
        cache->layer_inputs.resize(L);
        cache->fwd_steps.resize(L);
        cache->bwd_steps.resize(L);
        cache->masks.resize(L);
    }

    SequenceBatch x = inputs;
    for (std::size_t l = 0; l < L; ++l) {
        const auto& layer = model.bdlstm[l];
        SequenceBatch fwd, bwd;
        scan(layer.forward, x, false, fwd, cache ? &cache->fwd_steps[l] : nullptr);
        scan(layer.backward, x, true, bwd, cache ? &cache->bwd_steps[l] : nullptr);
        if (cache) {
            cache->layer_inputs[l] = std::move(x);
        }
        x.assign(T, {});
        for (std::size_t t = 0; t < T; ++t) {
            x[t].resize(layer.output_width(), fwd[t].cols());
            x[t] << fwd[t], bwd[t];
        }
        if (use_dropout && layer.dropout > 0.0) {
            const double keep_scale = 1.0 / (1.0 - layer.dropout);
            SequenceBatch masks(T);
            for (std::size_t t = 0; t < T; ++t) {
                masks[t].resize(x[t].rows(), x[t].cols());
                for (Eigen::Index c = 0; c < x[t].cols(); ++c) {
                    for (Eigen::Index r = 0; r < x[t].rows(); ++r) {
                        masks[t](r, c) = rng->uniform() < layer.dropout ? 0.0 : keep_scale;
                    }
                }
                x[t] = x[t].cwiseProduct(masks[t]);
            }
            if (cache) {
                cache->masks[l] = std::move(masks);
            }
        }
    }

    Eigen::MatrixXd z = x.back();
    for (const auto& d : model.dense) {
        if (cache) {
            cache->dense_inputs.push_back(z);
        }
        Eigen::MatrixXd pre = d.W * z;
        pre.colwise() += d.b;
        z = activate(d.activation, pre);
        if (cache) {
            cache->dense_outputs.push_back(z);
        }
    }
    if (cache) {
        cache->dense_inputs.push_back(z);
    }
    Eigen::MatrixXd out = model.output.W * z;
    out.colwise() += model.output.b;
    require(out.allFinite(), ErrorKind::Numeric, "model produced non-finite predictions");
    if (cache) {
        cache->valid = true;
    }
    return out;
}

Eigen::VectorXd model_forward(const BdLstmModel& model, const Eigen::MatrixXd& sequence, bool training, Rng* rng) {
    require(sequence.cols() == model.input_size() && sequence.rows() >= 1, ErrorKind::Usage,
            "sequence must be (steps x " + std::to_string(model.input_size()) + ")");
    SequenceBatch batch(static_cast<std::size_t>(sequence.rows()));
    for (Eigen::Index t = 0; t < sequence.rows(); ++t) {
        batch[static_cast<std::size_t>(t)] = sequence.row(t).transpose();
    }
    return forward_batch(model, batch, training, rng, nullptr).col(0);
}

double mse(const Eigen::MatrixXd& predictions, const Eigen::MatrixXd& targets) {
    require(predictions.rows() == targets.rows() && predictions.cols() == targets.cols() && predictions.size() > 0,
            ErrorKind::Usage, "prediction and target shapes differ");
    return (predictions - targets).squaredNorm() / static_cast<double>(predictions.size());
}

double weight_penalty(const BdLstmModel& model) {
    double sum = 0.0;
    for (const auto& p : parameters(const_cast<BdLstmModel&>(model))) {
        if (p.is_weight) {
            for (const double v : p.values()) {
                sum += v * v;
            }
        }
    }
    return sum;
}

double loss(const Eigen::MatrixXd& predictions, const Eigen::MatrixXd& targets, const BdLstmModel& model) {
    const double data = mse(predictions, targets);
    return model.l2 > 0.0 ? data + model.l2 * weight_penalty(model) : data;
}

void backward(const BdLstmModel& model, const ForwardCache& cache, const Eigen::MatrixXd& d_predictions,
              BdLstmModel& grads) {
    require(cache.valid, ErrorKind::State, "backward called without a forward cache");
    require(d_predictions.rows() == model.horizon(), ErrorKind::Usage, "gradient shape does not match model output");

    // Dense head.
    Eigen::MatrixXd dz = d_predictions;
    grads.output.W.noalias() += dz * cache.dense_inputs.back().transpose();
    grads.output.b.noalias() += dz.rowwise().sum();
    dz = model.output.W.transpose() * dz;
    for (std::size_t k = model.dense.size(); k-- > 0;) {
        const auto& d = model.dense[k];
        const Eigen::MatrixXd dpre = dz.cwiseProduct(activation_slope(d.activation, cache.dense_outputs[k]));
        grads.dense[k].W.noalias() += dpre * cache.dense_inputs[k].transpose();
        grads.dense[k].b.noalias() += dpre.rowwise().sum();
        dz = d.W.transpose() * dpre;
    }

    // Only the final step of the last BDLSTM layer feeds the head.
    const std::size_t T = cache.layer_inputs.front().size();
    const Eigen::Index B = dz.cols();
    SequenceBatch dy(T);
    for (std::size_t t = 0; t + 1 < T; ++t) {
        dy[t] = Eigen::MatrixXd::Zero(model.bdlstm.back().output_width(), B);
    }
    dy[T - 1] = dz;

    for (std::size_t l = model.bdlstm.size(); l-- > 0;) {
        const auto& layer = model.bdlstm[l];
        auto& g = grads.bdlstm[l];
        const Eigen::Index H = layer.hidden();
        if (!cache.masks[l].empty()) {
            for (std::size_t t = 0; t < T; ++t) {
                dy[t] = dy[t].cwiseProduct(cache.masks[l][t]);
            }
        }
        SequenceBatch dx(T);
        for (std::size_t t = 0; t < T; ++t) {
            dx[t] = Eigen::MatrixXd::Zero(layer.forward.input(), B);
        }

        Eigen::MatrixXd dh_next = Eigen::MatrixXd::Zero(H, B);
        Eigen::MatrixXd dc = Eigen::MatrixXd::Zero(H, B);
        for (std::size_t t = T; t-- > 0;) {
            const Eigen::MatrixXd dh = dy[t].topRows(H) + dh_next;
            cell_step_backward(layer.forward, cache.fwd_steps[l][t], dh, dc, dh_next, dx[t], g.forward);
        }
        // The backward cell scanned T-1 .. 0, so its recurrence unrolls 0 .. T-1.
        dh_next.setZero();
        dc.setZero();
        for (std::size_t t = 0; t < T; ++t) {
            const Eigen::MatrixXd dh = dy[t].bottomRows(H) + dh_next;
            cell_step_backward(layer.backward, cache.bwd_steps[l][t], dh, dc, dh_next, dx[t], g.backward);
        }
        dy = std::move(dx);
    }

    if (model.l2 > 0.0) {
        auto src = parameters(const_cast<BdLstmModel&>(model));
        auto dst = parameters(grads);
        for (std::size_t i = 0; i < src.size(); ++i) {
            if (!src[i].is_weight) {
                continue;
            }
            for (std::size_t k = 0; k < src[i].size(); ++k) {
                dst[i].data[k] += 2.0 * model.l2 * src[i].data[k];
            }
        }
    }
}

LossAndGradients loss_and_gradients(const BdLstmModel& model, const SequenceBatch& inputs,
                                    const Eigen::MatrixXd& targets, Rng* rng) {
    ForwardCache cache;
    const Eigen::MatrixXd predictions = forward_batch(model, inputs, rng != nullptr, rng, &cache);
    LossAndGradients out;
    out.mse = mse(predictions, targets);
    out.loss = model.l2 > 0.0 ? out.mse + model.l2 * weight_penalty(model) : out.mse;
    out.gradients = model.zeros_like();
    const Eigen::MatrixXd d_pred = 2.0 * (predictions - targets) / static_cast<double>(predictions.size());
    backward(model, cache, d_pred, out.gradients);
    return out;
}

void optimizer_step(OptimizerState& state, const std::vector<std::span<double>>& params,
                    const std::vector<std::span<const double>>& grads) {
    require(params.size() == grads.size(), ErrorKind::Usage, "parameter and gradient lists differ in length");
    for (std::size_t i = 0; i < params.size(); ++i) {
        require(params[i].size() == grads[i].size(), ErrorKind::Usage, "gradient shape mismatch");
        for (const double g : grads[i]) {
            if (!std::isfinite(g)) {
                fail(ErrorKind::Numeric, "non-finite gradient; optimizer step aborted");
            }
        }
    }
    const bool adam = state.kind == OptimizerKind::Adam;
    auto ensure = [&](std::vector<std::vector<double>>& acc) {
        if (acc.empty()) {
            for (const auto& p : params) {
                acc.emplace_back(p.size(), 0.0);
            }
        }
        require(acc.size() == params.size(), ErrorKind::Usage, "optimizer state does not match parameters");
        for (std::size_t i = 0; i < params.size(); ++i) {
            require(acc[i].size() == params[i].size(), ErrorKind::Usage, "optimizer state does not match parameters");
        }
    };
    ensure(state.second);
    if (adam) {
        ensure(state.first);
    }

    const double lr = state.effective_learning_rate();
    if (adam) {
        const double t = static_cast<double>(state.step + 1);
        const double bc1 = 1.0 - std::pow(state.beta1, t);
        const double bc2 = 1.0 - std::pow(state.beta2, t);
        for (std::size_t i = 0; i < params.size(); ++i) {
            auto& m = state.first[i];
            auto& v = state.second[i];
            for (std::size_t k = 0; k < params[i].size(); ++k) {
                const double g = grads[i][k];
                m[k] = state.beta1 * m[k] + (1.0 - state.beta1) * g;
                v[k] = state.beta2 * v[k] + (1.0 - state.beta2) * g * g;
                params[i][k] -= lr * (m[k] / bc1) / (std::sqrt(v[k] / bc2) + state.epsilon);
            }
        }
    } else {
        for (std::size_t i = 0; i < params.size(); ++i) {
            auto& v = state.second[i];
            for (std::size_t k = 0; k < params[i].size(); ++k) {
                const double g = grads[i][k];
                v[k] = state.rho * v[k] + (1.0 - state.rho) * g * g;
                params[i][k] -= lr * g / (std::sqrt(v[k]) + state.epsilon);
            }
        }
    }
    ++state.step;
}

void optimizer_step(OptimizerState& state, BdLstmModel& model, BdLstmModel& grads) {
    std::vector<std::span<double>> p;
    std::vector<std::span<const double>> g;
    for (const auto& ref : parameters(model)) {
        p.push_back(ref.values());
    }
    for (const auto& ref : parameters(grads)) {
        g.emplace_back(ref.values());
    }
    optimizer_step(state, p, g);
}

}  // namespace wavecast
