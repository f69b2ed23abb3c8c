#include "wavecast/checkpoint.hpp"

#include "wavecast/csv.hpp"
#include "wavecast/error.hpp"

namespace wavecast {

using nlohmann::json;

namespace {

constexpr const char* kFormat = "wavecast-checkpoint";
constexpr int kVersion = 1;

// Storage is column-major; the document is row-major.
std::vector<double> to_row_major(const double* data, Eigen::Index rows, Eigen::Index cols) {
    std::vector<double> out;
    out.reserve(static_cast<std::size_t>(rows * cols));
    for (Eigen::Index r = 0; r < rows; ++r) {
        for (Eigen::Index c = 0; c < cols; ++c) {
            out.push_back(data[c * rows + r]);
        }
    }
    return out;
}

void from_row_major(const std::vector<double>& in, double* data, Eigen::Index rows, Eigen::Index cols) {
    for (Eigen::Index r = 0; r < rows; ++r) {
        for (Eigen::Index c = 0; c < cols; ++c) {
            data[c * rows + r] = in[static_cast<std::size_t>(r * cols + c)];
        }
    }
}

template <typename T>
T get(const json& j, const char* key) {
    require(j.is_object() && j.contains(key), ErrorKind::Format, std::string("checkpoint is missing '") + key + "'");
    try {
        return j.at(key).get<T>();
    } catch (const json::exception&) {
        fail(ErrorKind::Format, std::string("checkpoint field '") + key + "' has the wrong type");
    }
}

json spec_to_json(const ModelSpec& s) {
    return {{"input_size", s.input_size}, {"bdlstm_sizes", s.bdlstm_sizes}, {"dropout", s.dropout},
            {"fc_sizes", s.fc_sizes},     {"activation", to_string(s.activation)},
            {"horizon", s.horizon},       {"l2", s.l2}};
}

ModelSpec spec_from_json(const json& j) {
    ModelSpec s;
    s.input_size = get<Eigen::Index>(j, "input_size");
    s.bdlstm_sizes = get<std::vector<int>>(j, "bdlstm_sizes");
    s.dropout = get<std::vector<double>>(j, "dropout");
    s.fc_sizes = get<std::vector<int>>(j, "fc_sizes");
    s.activation = parse_activation(get<std::string>(j, "activation"));
    s.horizon = get<Eigen::Index>(j, "horizon");
    s.l2 = get<double>(j, "l2");
    return s;
}

}  // namespace

json model_to_json(const BdLstmModel& model) {
    validate_model(model);
    json params = json::array();
    for (const auto& p : parameters(const_cast<BdLstmModel&>(model))) {
        params.push_back({{"name", p.name}, {"shape", {p.rows, p.cols}}, {"data", to_row_major(p.data, p.rows, p.cols)}});
    }
    return {{"topology", spec_to_json(model.spec())}, {"parameters", params}};
}

BdLstmModel model_from_json(const json& j) {
    const ModelSpec spec = spec_from_json(get<json>(j, "topology"));
    Rng scratch(0);
    BdLstmModel model = init_model(spec, scratch);
    auto refs = parameters(model);
    const json params = get<json>(j, "parameters");
    require(params.is_array() && params.size() == refs.size(), ErrorKind::Format,
            "checkpoint parameter list does not match its topology");
    for (std::size_t i = 0; i < refs.size(); ++i) {
        const auto& p = params[i];
        const auto name = get<std::string>(p, "name");
        const auto shape = get<std::vector<Eigen::Index>>(p, "shape");
        const auto data = get<std::vector<double>>(p, "data");
        require(name == refs[i].name, ErrorKind::Format, "expected parameter '" + refs[i].name + "', found '" + name + "'");
        require(shape.size() == 2 && shape[0] == refs[i].rows && shape[1] == refs[i].cols &&
                    data.size() == refs[i].size(),
                ErrorKind::Format, "parameter '" + name + "' has the wrong shape");
        from_row_major(data, refs[i].data, refs[i].rows, refs[i].cols);
    }
    validate_model(model);
    return model;
}

std::string checkpoint_to_string(const Checkpoint& ckpt) {
    json doc = model_to_json(ckpt.model);
    doc["format"] = kFormat;
    doc["version"] = kVersion;

    const auto& o = ckpt.optimizer;
    json opt = {{"kind", to_string(o.kind)}, {"learning_rate", o.learning_rate}, {"decay", o.decay},
                {"step", o.step},            {"beta1", o.beta1},                 {"beta2", o.beta2},
                {"rho", o.rho},              {"epsilon", o.epsilon}};
    auto refs = parameters(const_cast<BdLstmModel&>(ckpt.model));
    auto moments = [&](const std::vector<std::vector<double>>& acc) {
        json arr = json::array();
        if (acc.empty()) {
            return arr;
        }
        require(acc.size() == refs.size(), ErrorKind::State, "optimizer state does not match the model");
        for (std::size_t i = 0; i < refs.size(); ++i) {
            require(acc[i].size() == refs[i].size(), ErrorKind::State, "optimizer state does not match the model");
            arr.push_back(to_row_major(acc[i].data(), refs[i].rows, refs[i].cols));
        }
        return arr;
    };
    opt["first"] = moments(o.first);
    opt["second"] = moments(o.second);
    doc["optimizer"] = opt;
    doc["rng"] = {{"seed", ckpt.rng_seed}, {"state", ckpt.rng_state}};
    if (!ckpt.pipeline.is_null()) {
        doc["pipeline"] = ckpt.pipeline;
    }
    return doc.dump(1) + "\n";
}

Checkpoint checkpoint_from_string(std::string_view text) {
    json doc;
    try {
        doc = json::parse(text);
    } catch (const json::parse_error& e) {
        fail(ErrorKind::Format, std::string("checkpoint is not valid JSON: ") + e.what());
    }
    require(doc.is_object() && doc.value("format", "") == kFormat, ErrorKind::Format, "not a wavecast checkpoint");
    require(get<int>(doc, "version") == kVersion, ErrorKind::Format, "unsupported checkpoint version");

    Checkpoint ckpt;
    ckpt.model = model_from_json(doc);

    const json opt = get<json>(doc, "optimizer");
    auto& o = ckpt.optimizer;
    o.kind = parse_optimizer(get<std::string>(opt, "kind"));
    o.learning_rate = get<double>(opt, "learning_rate");
    o.decay = get<double>(opt, "decay");
    o.step = get<std::int64_t>(opt, "step");
    o.beta1 = get<double>(opt, "beta1");
    o.beta2 = get<double>(opt, "beta2");
    o.rho = get<double>(opt, "rho");
    o.epsilon = get<double>(opt, "epsilon");
    require(o.step >= 0, ErrorKind::Format, "optimizer step must be non-negative");
    auto refs = parameters(ckpt.model);
    auto moments = [&](const char* key) {
        const auto arr = get<std::vector<std::vector<double>>>(opt, key);
        std::vector<std::vector<double>> acc;
        if (arr.empty()) {
            return acc;
        }
        require(arr.size() == refs.size(), ErrorKind::Format, std::string("optimizer '") + key + "' does not match the model");
        for (std::size_t i = 0; i < refs.size(); ++i) {
            require(arr[i].size() == refs[i].size(), ErrorKind::Format,
                    std::string("optimizer '") + key + "' does not match the model");
            acc.emplace_back(refs[i].size());
            from_row_major(arr[i], acc.back().data(), refs[i].rows, refs[i].cols);
        }
        return acc;
    };
    o.first = moments("first");
    o.second = moments("second");

    const json rng = get<json>(doc, "rng");
    ckpt.rng_seed = get<std::uint64_t>(rng, "seed");
    ckpt.rng_state = get<std::string>(rng, "state");
    if (!ckpt.rng_state.empty()) {
        Rng probe(ckpt.rng_seed);
        require(probe.set_state(ckpt.rng_state), ErrorKind::Format, "checkpoint RNG state is malformed");
    }
    if (doc.contains("pipeline")) {
        ckpt.pipeline = doc["pipeline"];
    }
    return ckpt;
}

void save_checkpoint(const std::filesystem::path& path, const Checkpoint& ckpt) {
    write_text_file(path, checkpoint_to_string(ckpt));
}

Checkpoint load_checkpoint(const std::filesystem::path& path) { return checkpoint_from_string(read_text_file(path)); }

}  // namespace wavecast
