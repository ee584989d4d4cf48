#pragma once

#include "simtuple/session.hpp"

#include <nlohmann/json.hpp>

#include <memory>
#include <string>

namespace simtuple::service {

struct ServiceConfig {
  /// Scene archive (JSONL) and model checkpoint the study runs on.
  std::string dataset;
  std::string checkpoint;
  /// One JSONL event log per session lives here; replayed on startup.
  std::string storage_dir = "sessions";
  std::string host = "127.0.0.1";
  int port = 8080;
  StudyConfig study;
  std::uint64_t seed = 0;
};

/// Reads the fields present in `doc` over the defaults in `base`.
ServiceConfig service_config_from_json(const nlohmann::json& doc, ServiceConfig base = {});
StudyConfig study_config_from_json(const nlohmann::json& doc, StudyConfig base = {});
nlohmann::json to_json(const ServiceConfig& cfg);

/// Throws invalid_input naming the first unusable field.
void validate(const ServiceConfig& cfg);

/// Loads the archive and checkpoint and builds the study context.
std::shared_ptr<const StudyContext> load_study_context(const ServiceConfig& cfg);

}  // namespace simtuple::service
