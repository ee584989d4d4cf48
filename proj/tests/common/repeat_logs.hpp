#pragma once

#include "simtuple/events.hpp"

#include <algorithm>
#include <map>
#include <optional>
#include <random>
#include <string>
#include <vector>

namespace simtuple::test {

using Answer = std::optional<int>;

inline Event make_event(std::vector<Event>& log, std::string type, nlohmann::json data) {
  Event e;
  e.seq = log.size();
  e.type = std::move(type);
  e.data = std::move(data);
  log.push_back(e);
  return e;
}

inline std::vector<std::string> body_ids(std::size_t n) {
  std::vector<std::string> b;
  for (std::size_t i = 0; i < n; ++i) b.push_back("b" + std::to_string(i));
  return b;
}

// One repeat phase: query i has body b0..b{n-1}, answer j picks "b<j>".
inline void add_repeat_phase(std::vector<Event>& log, const std::string& phase, const std::vector<Answer>& answers,
                      std::size_t body = 4) {
  make_event(log, "phase_started", {{"phase", phase}});
  for (std::size_t i = 0; i < answers.size(); ++i) {
    const std::string base = "repeat-" + std::to_string(i);
    const std::string id = phase == "repeat1" ? base : base + "/2";
    make_event(log, "query",
               {{"query_id", id}, {"phase", phase}, {"strategy", "random_nn"}, {"head", "h" + std::to_string(i)},
                {"body", body_ids(body)}, {"repeat_of", base}});
    nlohmann::json chosen = nullptr, choice = nullptr;
    if (answers[i]) {
      choice = *answers[i];
      chosen = "b" + std::to_string(*answers[i]);
    }
    make_event(log, "response",
               {{"query_id", id}, {"phase", phase}, {"choice", choice}, {"chosen", chosen}, {"response_ms", 1000.0}});
  }
  make_event(log, "phase_completed", {{"phase", phase}, {"queries", answers.size()}});
}

inline std::vector<Event> repeat_log(const std::vector<Answer>& r1, const std::vector<Answer>& r2) {
  std::vector<Event> log;
  make_event(log, "session_created", {{"annotator_id", "x"}, {"seed", 0}});
  add_repeat_phase(log, "repeat1", r1);
  if (!r2.empty()) add_repeat_phase(log, "repeat2", r2);
  return log;
}

// Reorders every body and remaps choice indices; chosen ids stay the same.
inline std::vector<Event> shuffle_bodies(std::vector<Event> log, std::mt19937_64& rng) {
  std::map<std::string, std::vector<std::string>> bodies;
  for (auto& e : log) {
    if (e.type == "query") {
      auto body = e.data["body"].get<std::vector<std::string>>();
      std::shuffle(body.begin(), body.end(), rng);
      e.data["body"] = body;
      bodies[e.data["query_id"]] = body;
    } else if (e.type == "response" && !e.data["chosen"].is_null()) {
      const auto& body = bodies[e.data["query_id"]];
      e.data["choice"] = std::find(body.begin(), body.end(), e.data["chosen"].get<std::string>()) - body.begin();
    }
  }
  return log;
}

inline std::vector<Answer> random_answers(std::mt19937_64& rng, std::size_t n, std::size_t body = 4) {
  std::uniform_int_distribution<int> pick(-1, static_cast<int>(body) - 1);
  std::vector<Answer> out;
  for (std::size_t i = 0; i < n; ++i) {
    const int v = pick(rng);
    out.push_back(v < 0 ? Answer{} : Answer{v});
  }
  return out;
}

}  // namespace simtuple::test
