#pragma once

// Plain-text run manifest: one `key = value` per line, `#` starts a comment.
// Relative paths are resolved against the manifest's directory.

#include "wavecast/trainer.hpp"

#include <cstdint>
#include <filesystem>
#include <map>
#include <optional>
#include <string>
#include <string_view>
#include <vector>

namespace wavecast {

class Manifest {
public:
    static Manifest parse(std::string_view text, std::filesystem::path base_dir = ".");
    static Manifest load(const std::filesystem::path& path);

    bool has(std::string_view key) const;
    std::optional<std::string> get(std::string_view key) const;
    std::string get_or(std::string_view key, std::string fallback) const;
    void set(std::string_view key, std::string value);

    /// Resolved path for `key`; throws a usage error when the key is absent.
    std::filesystem::path path(std::string_view key) const;
    std::optional<std::filesystem::path> optional_path(std::string_view key) const;

    const std::filesystem::path& base_dir() const { return base_dir_; }
    const std::map<std::string, std::string, std::less<>>& entries() const { return values_; }

private:
    std::filesystem::path base_dir_;
    std::map<std::string, std::string, std::less<>> values_;
};

/// Keys a manifest may contain; `ohlcv.<name>` entries are matched by prefix.
bool is_known_manifest_key(std::string_view key);

std::vector<std::string> split_list(std::string_view text, char sep = ',');
std::vector<int> parse_int_list(std::string_view text);
std::vector<double> parse_real_list(std::string_view text);
std::vector<std::uint64_t> parse_seed_list(std::string_view text);
std::uint64_t parse_u64(std::string_view text, std::string_view what);

PipelineConfig pipeline_config(const Manifest& m);
HyperParams hyperparams(const Manifest& m);

/// Grid axes from `grid.*` keys; each missing axis takes its default list.
GridSpace grid_space(const Manifest& m);

}  // namespace wavecast
