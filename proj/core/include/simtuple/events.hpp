#pragma once

#include <nlohmann/json.hpp>

#include <cstdint>
#include <iosfwd>
#include <string>
#include <vector>

namespace simtuple {

inline constexpr int kEventSchema = 1;

/// One entry of a session's append-only log.
struct Event {
  std::uint64_t seq = 0;
  std::int64_t ts_ms = 0;
  std::string type;
  nlohmann::json data = nlohmann::json::object();

  bool operator==(const Event&) const = default;
};

nlohmann::json to_json(const Event& e);
Event event_from_json(const nlohmann::json& doc);

/// JSON lines, one event per line.
void write_event(std::ostream& out, const Event& e);
std::vector<Event> read_event_log(std::istream& in);
std::vector<Event> read_event_log(const std::string& path);
void write_event_log(const std::string& path, const std::vector<Event>& events);

/// Fields that carry wall-clock measurements and are ignored by
/// equivalent_modulo_time.
bool is_timing_field(const std::string& key);

/// Equality after removing timing fields at every nesting level.
bool equivalent_modulo_time(const nlohmann::json& a, const nlohmann::json& b);
bool equivalent_modulo_time(const std::vector<Event>& a, const std::vector<Event>& b);

}  // namespace simtuple
