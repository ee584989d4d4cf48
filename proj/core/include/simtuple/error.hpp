#pragma once

#include <stdexcept>
#include <string>
#include <string_view>

namespace simtuple {

/// Error categories shared by the library, the CLI and the HTTP service.
enum class ErrorCode {
  invalid_input,
  parse,
  stale_model,
  posterior_not_ready,
  not_ready,
  out_of_order,
  conflict,
  not_found,
  calibration,
  divergence,
  io,
};

std::string_view to_string(ErrorCode code) noexcept;

class Error : public std::runtime_error {
 public:
  Error(ErrorCode code, const std::string& message)
      : std::runtime_error(message), code_(code) {}

  ErrorCode code() const noexcept { return code_; }

 private:
  ErrorCode code_;
};

[[noreturn]] inline void fail(ErrorCode code, const std::string& message) {
  throw Error(code, message);
}

inline void require(bool condition, const std::string& message) {
  if (!condition) throw Error(ErrorCode::invalid_input, message);
}

inline std::string_view to_string(ErrorCode code) noexcept {
  switch (code) {
    case ErrorCode::invalid_input: return "invalid_input";
    case ErrorCode::parse: return "parse_error";
    case ErrorCode::stale_model: return "stale_model";
    case ErrorCode::posterior_not_ready: return "posterior_not_ready";
    case ErrorCode::not_ready: return "not_ready";
    case ErrorCode::out_of_order: return "out_of_order";
    case ErrorCode::conflict: return "conflict";
    case ErrorCode::not_found: return "not_found";
    case ErrorCode::calibration: return "calibration_error";
    case ErrorCode::divergence: return "divergence";
    case ErrorCode::io: return "io_error";
  }
  return "unknown";
}

}  // namespace simtuple
