#include "simtuple/metrics.hpp"

#include "simtuple/error.hpp"

#include <map>
#include <unordered_map>

namespace simtuple {

double triplet_accuracy(const Eigen::MatrixXd& embeddings, const TripletSet& test) {
  if (test.empty()) fail(ErrorCode::not_ready, "triplet_accuracy: empty test set");
  std::size_t correct = 0;
  for (const auto& t : test) {
    const auto a = embeddings.col(static_cast<Eigen::Index>(t.a));
    const double dp = (a - embeddings.col(static_cast<Eigen::Index>(t.p))).squaredNorm();
    const double dn = (a - embeddings.col(static_cast<Eigen::Index>(t.n))).squaredNorm();
    if (dp < dn) ++correct;
  }
  return static_cast<double>(correct) / static_cast<double>(test.size());
}

double triplet_accuracy(const EmbeddingModel& model, const std::vector<Eigen::MatrixXd>& inputs,
                        const TripletSet& test) {
  if (test.empty()) fail(ErrorCode::not_ready, "triplet_accuracy: empty test set");
  std::unordered_map<std::size_t, Eigen::VectorXd> cache;
  ForwardCache scratch;
  auto emb = [&](std::size_t i) -> const Eigen::VectorXd& {
    auto it = cache.find(i);
    if (it == cache.end()) it = cache.emplace(i, forward(model, inputs.at(i), &scratch)).first;
    return it->second;
  };
  std::size_t correct = 0;
  for (const auto& t : test) {
    const Eigen::VectorXd& a = emb(t.a);
    const double dp = (a - emb(t.p)).squaredNorm();
    const double dn = (a - emb(t.n)).squaredNorm();
    if (dp < dn) ++correct;
  }
  return static_cast<double>(correct) / static_cast<double>(test.size());
}

Effectiveness effectiveness(double accuracy, double response_time_s, double compute_time_s, std::size_t n_skips) {
  require(response_time_s > 0.0, "effectiveness: response time must be positive");
  require(compute_time_s >= 0.0, "effectiveness: compute time must be non-negative");
  Effectiveness e;
  e.E = accuracy / response_time_s;
  e.TE = accuracy / (response_time_s + compute_time_s);
  e.LE = accuracy / static_cast<double>(std::max<std::size_t>(1, n_skips));
  return e;
}

std::vector<LoggedAnswer> logged_answers(const std::vector<Event>& log) {
  std::unordered_map<std::string, LoggedAnswer> queries;
  std::vector<LoggedAnswer> out;
  for (const auto& e : log) {
    if (e.type == "query") {
      LoggedAnswer a;
      a.query_id = e.data.at("query_id").get<std::string>();
      a.phase = e.data.at("phase").get<std::string>();
      a.strategy = e.data.value("strategy", "");
      a.repeat_of = e.data.value("repeat_of", "");
      a.test = e.data.value("test", false);
      a.head = e.data.at("head").get<std::string>();
      a.body = e.data.at("body").get<std::vector<std::string>>();
      queries[a.query_id] = std::move(a);
    } else if (e.type == "response") {
      const auto id = e.data.at("query_id").get<std::string>();
      const auto it = queries.find(id);
      if (it == queries.end()) fail(ErrorCode::parse, "session log: response to unknown query '" + id + "'");
      LoggedAnswer a = it->second;
      if (!e.data.at("chosen").is_null()) a.chosen = e.data.at("chosen").get<std::string>();
      a.response_ms = e.data.at("response_ms").get<double>();
      out.push_back(std::move(a));
    }
  }
  return out;
}

bool phase_completed(const std::vector<Event>& log, const std::string& phase) {
  for (const auto& e : log)
    if (e.type == "phase_completed" && e.data.value("phase", "") == phase) return true;
  return false;
}

namespace {

std::map<std::string, std::optional<std::string>> outcomes(const std::vector<LoggedAnswer>& answers,
                                                           const std::string& phase) {
  std::map<std::string, std::optional<std::string>> out;
  for (const auto& a : answers)
    if (a.phase == phase && !a.repeat_of.empty()) out[a.repeat_of] = a.chosen;
  return out;
}

}  // namespace

double consistency(const std::vector<Event>& log) {
  if (!phase_completed(log, "repeat1") || !phase_completed(log, "repeat2"))
    fail(ErrorCode::not_ready, "consistency: repeat phases are not complete");
  const auto answers = logged_answers(log);
  const auto first = outcomes(answers, "repeat1"), second = outcomes(answers, "repeat2");
  std::size_t total = 0, agree = 0;
  for (const auto& [id, outcome] : first) {
    const auto it = second.find(id);
    if (it == second.end()) continue;
    ++total;
    if (outcome == it->second) ++agree;
  }
  if (total == 0) fail(ErrorCode::not_ready, "consistency: no repeated query was answered twice");
  return static_cast<double>(agree) / static_cast<double>(total);
}

double reliability(const std::vector<Event>& a, const std::vector<Event>& b) {
  const auto oa = outcomes(logged_answers(a), "repeat1"), ob = outcomes(logged_answers(b), "repeat1");
  std::size_t total = 0, agree = 0;
  for (const auto& [id, outcome] : oa) {
    const auto it = ob.find(id);
    if (it == ob.end()) continue;
    ++total;
    if (outcome == it->second) ++agree;
  }
  require(total > 0, "reliability: the sessions share no repeated query");
  return static_cast<double>(agree) / static_cast<double>(total);
}

}  // namespace simtuple
