#include "wavecast/manifest.hpp"

#include "wavecast/csv.hpp"
#include "wavecast/error.hpp"

#include <array>
#include <charconv>

namespace wavecast {

namespace {

constexpr std::array<std::string_view, 39> kKnownKeys = {
    "series",        "cases",          "frame",         "out",           "model",
    "mode",          "target",         "lookback",      "horizon",       "train_fraction",
    "epochs",        "batch_size",     "seed",          "dropout",       "swt_levels",
    "scope",         "units",          "shuffle",       "budget",        "threads",
    "verbosity",     "bdlstm",         "fc",            "activation",    "optimizer",
    "learning_rate", "decay",          "l2",            "grid.bdlstm",   "grid.fc",
    "grid.activation", "grid.optimizer", "grid.learning_rate", "grid.decay", "grid.l2",
    "seeds",         "compare.targets", "compare.modes", "max_lags",
};

int parse_int(std::string_view text, std::string_view what) {
    text = trim(text);
    int v = 0;
    const auto* end = text.data() + text.size();
    const auto [ptr, ec] = std::from_chars(text.data(), end, v);
    require(!text.empty() && ec == std::errc() && ptr == end, ErrorKind::Usage,
            "invalid " + std::string(what) + " '" + std::string(text) + "'");
    return v;
}

double parse_real(std::string_view text, std::string_view what) {
    const auto v = parse_double(trim(text));
    require(v.has_value(), ErrorKind::Usage, "invalid " + std::string(what) + " '" + std::string(text) + "'");
    return *v;
}

bool parse_bool(std::string_view text, std::string_view what) {
    text = trim(text);
    if (text == "true" || text == "1" || text == "yes") return true;
    if (text == "false" || text == "0" || text == "no") return false;
    fail(ErrorKind::Usage, "invalid " + std::string(what) + " '" + std::string(text) + "'");
}

// `64,64;32` -> {{64,64},{32}}
std::vector<std::vector<int>> parse_tuple_list(std::string_view text) {
    std::vector<std::vector<int>> out;
    for (const auto& part : split_list(text, ';')) {
        out.push_back(part == "none" ? std::vector<int>{} : parse_int_list(part));
    }
    return out;
}

}  // namespace

bool is_known_manifest_key(std::string_view key) {
    if (key.starts_with("ohlcv.") && key.size() > 6) {
        return true;
    }
    for (const auto k : kKnownKeys) {
        if (k == key) {
            return true;
        }
    }
    return false;
}

Manifest Manifest::parse(std::string_view text, std::filesystem::path base_dir) {
    Manifest m;
    m.base_dir_ = std::move(base_dir);
    std::size_t line_no = 0;
    for (const auto raw : split_lines(text)) {
        ++line_no;
        std::string_view line = raw;
        if (const auto hash = line.find('#'); hash != std::string_view::npos) {
            line = line.substr(0, hash);
        }
        line = trim(line);
        if (line.empty()) {
            continue;
        }
        const auto eq = line.find('=');
        const std::string where = "manifest line " + std::to_string(line_no) + ": ";
        require(eq != std::string_view::npos, ErrorKind::Usage, where + "expected key = value");
        const std::string key(trim(line.substr(0, eq)));
        const std::string value(trim(line.substr(eq + 1)));
        require(!key.empty(), ErrorKind::Usage, where + "empty key");
        require(is_known_manifest_key(key), ErrorKind::Usage, where + "unknown key '" + key + "'");
        require(!m.values_.contains(key), ErrorKind::Usage, where + "duplicate key '" + key + "'");
        m.values_.emplace(key, value);
    }
    return m;
}

Manifest Manifest::load(const std::filesystem::path& path) {
    const auto text = read_text_file(path);
    return parse(text, path.has_parent_path() ? path.parent_path() : std::filesystem::path("."));
}

bool Manifest::has(std::string_view key) const { return values_.find(key) != values_.end(); }

std::optional<std::string> Manifest::get(std::string_view key) const {
    const auto it = values_.find(key);
    if (it == values_.end()) {
        return std::nullopt;
    }
    return it->second;
}

std::string Manifest::get_or(std::string_view key, std::string fallback) const {
    auto v = get(key);
    return v ? *v : std::move(fallback);
}

void Manifest::set(std::string_view key, std::string value) {
    require(is_known_manifest_key(key), ErrorKind::Usage, "unknown manifest key '" + std::string(key) + "'");
    values_.insert_or_assign(std::string(key), std::move(value));
}

std::optional<std::filesystem::path> Manifest::optional_path(std::string_view key) const {
    const auto v = get(key);
    if (!v) {
        return std::nullopt;
    }
    std::filesystem::path p(*v);
    return (p.is_absolute() ? p : base_dir_ / p).lexically_normal();
}

std::filesystem::path Manifest::path(std::string_view key) const {
    auto p = optional_path(key);
    require(p.has_value(), ErrorKind::Usage, "manifest has no '" + std::string(key) + "' entry");
    return *p;
}

std::vector<std::string> split_list(std::string_view text, char sep) {
    std::vector<std::string> out;
    while (true) {
        const auto pos = text.find(sep);
        const auto item = trim(text.substr(0, pos));
        if (!item.empty()) {
            out.emplace_back(item);
        }
        if (pos == std::string_view::npos) {
            break;
        }
        text = text.substr(pos + 1);
    }
    return out;
}

std::vector<int> parse_int_list(std::string_view text) {
    std::vector<int> out;
    for (const auto& s : split_list(text)) {
        out.push_back(parse_int(s, "integer"));
    }
    require(!out.empty(), ErrorKind::Usage, "empty integer list");
    return out;
}

std::vector<double> parse_real_list(std::string_view text) {
    std::vector<double> out;
    for (const auto& s : split_list(text)) {
        out.push_back(parse_real(s, "number"));
    }
    return out;
}

std::uint64_t parse_u64(std::string_view text, std::string_view what) {
    text = trim(text);
    std::uint64_t v = 0;
    const auto* end = text.data() + text.size();
    const auto [ptr, ec] = std::from_chars(text.data(), end, v);
    require(!text.empty() && ec == std::errc() && ptr == end, ErrorKind::Usage,
            "invalid " + std::string(what) + " '" + std::string(text) + "'");
    return v;
}

std::vector<std::uint64_t> parse_seed_list(std::string_view text) {
    std::vector<std::uint64_t> out;
    for (const auto& s : split_list(text)) {
        out.push_back(parse_u64(s, "seed"));
    }
    require(!out.empty(), ErrorKind::Usage, "empty seed list");
    return out;
}

PipelineConfig pipeline_config(const Manifest& m) {
    PipelineConfig c;
    if (auto v = m.get("mode")) c.mode = parse_input_mode(*v);
    if (auto v = m.get("lookback")) c.lookback = static_cast<std::size_t>(std::max(0, parse_int(*v, "lookback")));
    if (auto v = m.get("horizon")) c.horizon = static_cast<std::size_t>(std::max(0, parse_int(*v, "horizon")));
    if (auto v = m.get("target")) c.target = *v;
    if (auto v = m.get("train_fraction")) c.train_fraction = parse_real(*v, "train_fraction");
    if (auto v = m.get("epochs")) c.epochs = parse_int(*v, "epochs");
    if (auto v = m.get("batch_size")) c.batch_size = static_cast<std::size_t>(std::max(0, parse_int(*v, "batch_size")));
    if (auto v = m.get("seed")) c.seed = parse_u64(*v, "seed");
    if (auto v = m.get("dropout")) c.dropout = parse_real_list(*v);
    if (auto v = m.get("swt_levels")) c.swt_levels = parse_int(*v, "swt_levels");
    if (auto v = m.get("scope")) c.scope = parse_swt_scope(*v);
    if (auto v = m.get("units")) c.units = parse_metric_units(*v);
    if (auto v = m.get("shuffle")) c.shuffle = parse_bool(*v, "shuffle");
    c.validate();
    return c;
}

HyperParams hyperparams(const Manifest& m) {
    HyperParams hp;
    if (auto v = m.get("bdlstm")) hp.bdlstm_sizes = parse_int_list(*v);
    if (auto v = m.get("fc")) hp.fc_sizes = v->empty() || *v == "none" ? std::vector<int>{} : parse_int_list(*v);
    if (auto v = m.get("activation")) hp.activation = parse_activation(*v);
    if (auto v = m.get("optimizer")) hp.optimizer = parse_optimizer(*v);
    if (auto v = m.get("learning_rate")) hp.learning_rate = parse_real(*v, "learning_rate");
    if (auto v = m.get("decay")) hp.decay = parse_real(*v, "decay");
    if (auto v = m.get("l2")) hp.l2 = parse_real(*v, "l2");
    for (const int s : hp.bdlstm_sizes) require(s >= 1, ErrorKind::Usage, "bdlstm sizes must be positive");
    for (const int s : hp.fc_sizes) require(s >= 1, ErrorKind::Usage, "fc sizes must be positive");
    require(hp.learning_rate > 0.0, ErrorKind::Usage, "learning_rate must be positive");
    require(hp.decay >= 0.0 && hp.l2 >= 0.0, ErrorKind::Usage, "decay and l2 must be non-negative");
    return hp;
}

GridSpace grid_space(const Manifest& m) {
    GridSpace s = default_grid_space();
    if (auto v = m.get("grid.bdlstm")) s.bdlstm_sizes = parse_tuple_list(*v);
    if (auto v = m.get("grid.fc")) s.fc_sizes = parse_tuple_list(*v);
    if (auto v = m.get("grid.activation")) {
        s.activations.clear();
        for (const auto& a : split_list(*v)) s.activations.push_back(parse_activation(a));
    }
    if (auto v = m.get("grid.optimizer")) {
        s.optimizers.clear();
        for (const auto& o : split_list(*v)) s.optimizers.push_back(parse_optimizer(o));
    }
    if (auto v = m.get("grid.learning_rate")) s.learning_rates = parse_real_list(*v);
    if (auto v = m.get("grid.decay")) s.decays = parse_real_list(*v);
    if (auto v = m.get("grid.l2")) s.l2s = parse_real_list(*v);
    require(s.size() > 0, ErrorKind::Usage, "hyperparameter grid is empty");
    return s;
}

}  // namespace wavecast
