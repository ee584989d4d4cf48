#include "simtuple/events.hpp"

#include "simtuple/error.hpp"

#include <fstream>

namespace simtuple {

nlohmann::json to_json(const Event& e) {
  return {{"schema", kEventSchema}, {"seq", e.seq}, {"ts", e.ts_ms}, {"type", e.type}, {"data", e.data}};
}

Event event_from_json(const nlohmann::json& doc) {
  try {
    if (doc.at("schema").get<int>() != kEventSchema)
      fail(ErrorCode::parse, "event: unsupported schema " + doc.at("schema").dump());
    Event e;
    e.seq = doc.at("seq").get<std::uint64_t>();
    e.ts_ms = doc.at("ts").get<std::int64_t>();
    e.type = doc.at("type").get<std::string>();
    e.data = doc.value("data", nlohmann::json::object());
    return e;
  } catch (const nlohmann::json::exception& ex) {
    fail(ErrorCode::parse, std::string("event: ") + ex.what());
  }
}

void write_event(std::ostream& out, const Event& e) { out << to_json(e).dump() << '\n'; }

std::vector<Event> read_event_log(std::istream& in) {
  std::vector<Event> events;
  std::string line;
  std::size_t lineno = 0;
  while (std::getline(in, line)) {
    ++lineno;
    if (line.empty()) continue;
    try {
      events.push_back(event_from_json(nlohmann::json::parse(line)));
    } catch (const nlohmann::json::exception& ex) {
      fail(ErrorCode::parse, "event log line " + std::to_string(lineno) + ": " + ex.what());
    }
  }
  return events;
}

std::vector<Event> read_event_log(const std::string& path) {
  std::ifstream in(path);
  if (!in) fail(ErrorCode::io, "cannot open event log '" + path + "'");
  return read_event_log(in);
}

void write_event_log(const std::string& path, const std::vector<Event>& events) {
  std::ofstream out(path);
  if (!out) fail(ErrorCode::io, "cannot open '" + path + "' for writing");
  for (const auto& e : events) write_event(out, e);
  if (!out) fail(ErrorCode::io, "failed writing '" + path + "'");
}

bool is_timing_field(const std::string& key) { return key == "ts" || key == "compute_ms" || key == "created_at_ms"; }

namespace {

nlohmann::json strip_timing(const nlohmann::json& j) {
  if (j.is_object()) {
    nlohmann::json out = nlohmann::json::object();
    for (auto it = j.begin(); it != j.end(); ++it)
      if (!is_timing_field(it.key())) out[it.key()] = strip_timing(it.value());
    return out;
  }
  if (j.is_array()) {
    nlohmann::json out = nlohmann::json::array();
    for (const auto& v : j) out.push_back(strip_timing(v));
    return out;
  }
  return j;
}

}  // namespace

bool equivalent_modulo_time(const nlohmann::json& a, const nlohmann::json& b) {
  return strip_timing(a) == strip_timing(b);
}

bool equivalent_modulo_time(const std::vector<Event>& a, const std::vector<Event>& b) {
  if (a.size() != b.size()) return false;
  for (std::size_t i = 0; i < a.size(); ++i)
    if (!equivalent_modulo_time(to_json(a[i]), to_json(b[i]))) return false;
  return true;
}

}  // namespace simtuple
