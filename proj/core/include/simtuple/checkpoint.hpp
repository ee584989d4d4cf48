#pragma once

#include "simtuple/network.hpp"

#include <nlohmann/json.hpp>
#include <string>

namespace simtuple {

inline constexpr int kCheckpointFormat = 1;

/// JSON container with architecture, parameters, optimizer state and RNG
/// state. Doubles are written in shortest round-trip form, so save/load is
/// bit-exact.
nlohmann::json checkpoint_to_json(const EmbeddingModel& model);
EmbeddingModel checkpoint_from_json(const nlohmann::json& doc);

void save_checkpoint(const EmbeddingModel& model, const std::string& path);
EmbeddingModel load_checkpoint(const std::string& path);

}  // namespace simtuple
