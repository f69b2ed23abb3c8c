#pragma once

// Model checkpoints as a single JSON document: topology, parameters
// (row-major), optimizer state and RNG state.

#include "wavecast/network.hpp"

#include <json.hpp>

#include <cstdint>
#include <filesystem>
#include <string>
#include <string_view>

namespace wavecast {

struct Checkpoint {
    BdLstmModel model;
    OptimizerState optimizer;
    std::uint64_t rng_seed = 0;
    std::string rng_state;      // empty: not recorded
    nlohmann::json pipeline;    // scaler, config; null when absent
};

nlohmann::json model_to_json(const BdLstmModel& model);
BdLstmModel model_from_json(const nlohmann::json& j);

std::string checkpoint_to_string(const Checkpoint& ckpt);
Checkpoint checkpoint_from_string(std::string_view text);

void save_checkpoint(const std::filesystem::path& path, const Checkpoint& ckpt);
Checkpoint load_checkpoint(const std::filesystem::path& path);

}  // namespace wavecast
