#pragma once

#include "simtuple/error.hpp"
#include "simtuple/session.hpp"

#include <nlohmann/json.hpp>

#include <filesystem>
#include <memory>
#include <string>

namespace simtuple::service {

struct ApiResponse {
  int status = 200;
  nlohmann::json body;
};

/// HTTP status for an error code: 404 not found, 409 conflicts and ordering,
/// 400 bad input, 500 otherwise.
int http_status(ErrorCode code) noexcept;

/// Annotation service over a fixed study context. Every state change is
/// appended to the session's log file before the request is acknowledged;
/// constructing a service over an existing storage directory replays it.
///
///   POST /sessions                 {annotator_id?, seed?}
///   GET  /sessions/{id}/query
///   POST /sessions/{id}/response   {query_id, choice | null, response_ms}
///   POST /sessions/{id}/survey     {answers}
///   GET  /sessions/{id}/metrics
///   GET  /scenes/{id}
///   GET  /export/report
class Service {
 public:
  Service(std::shared_ptr<const StudyContext> ctx, std::filesystem::path storage_dir, std::uint64_t seed = 0);
  ~Service();
  Service(const Service&) = delete;
  Service& operator=(const Service&) = delete;

  /// Routes one request without going through the network.
  ApiResponse handle(const std::string& method, const std::string& path, const std::string& body);

  /// Binds and serves on a background thread; port 0 picks a free port.
  /// Returns the bound port.
  int start(const std::string& host, int port);
  /// Blocks until stop() is called.
  void wait();
  void stop();

  std::size_t session_count() const;

 private:
  struct Impl;
  std::unique_ptr<Impl> impl_;
};

}  // namespace simtuple::service
