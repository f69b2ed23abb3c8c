#pragma once

// Batch commands behind the command-line front end. Each command reads its
// inputs from a manifest and writes only under the manifest's `out` directory.

#include "wavecast/manifest.hpp"
#include "wavecast/stationarity.hpp"
#include "wavecast/trainer.hpp"

#include <json.hpp>

#include <filesystem>
#include <string>
#include <string_view>
#include <vector>

namespace wavecast {

struct CommandResult {
    std::vector<std::filesystem::path> written;
    std::string report;  // human-readable summary
};

/// Known commands: ingest, stats, unitroot, decompose, train, gridsearch, forecast, compare.
const std::vector<std::string>& command_names();

CommandResult run_command(std::string_view command, const Manifest& manifest);

/// 0 quiet, 1 progress (default), 2 per-epoch detail; messages go to stderr.
void set_verbosity(int level);
int verbosity();

nlohmann::json to_json(const PipelineConfig& c);
PipelineConfig config_from_json(const nlohmann::json& j);
nlohmann::json to_json(const HyperParams& hp);
nlohmann::json to_json(const ScalerParams& s);
ScalerParams scaler_from_json(const nlohmann::json& j);
nlohmann::json to_json(const DescriptiveStats& s);
nlohmann::json to_json(const UnitRootResult& r);

/// `(k)` as printed next to a lag or bandwidth.
std::string parenthesized(int k);

}  // namespace wavecast
