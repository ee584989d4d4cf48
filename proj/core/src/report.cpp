#include "simtuple/report.hpp"

#include "simtuple/cluster.hpp"
#include "simtuple/error.hpp"
#include "simtuple/metrics.hpp"

#include <map>
#include <ostream>

namespace simtuple {

namespace {

const std::vector<std::string> kPhases = {"warmup",         "repeat1",       "rq2_rnd",       "rq2_mixed",
                                          "rq2_nn",         "rq3_active_nn", "rq3_infotuple", "repeat2"};
const std::vector<std::string> kStrategies = {"random", "random_nn", "nn", "active_nn", "infotuple"};

struct PhaseStats {
  std::size_t queries = 0;
  std::size_t skips = 0;
  double response_ms = 0.0;
  double compute_ms = 0.0;
};

nlohmann::json annotator_entry(const std::vector<Event>& log) {
  nlohmann::json entry;
  entry["annotator_id"] = log.empty() ? "" : log.front().data.value("annotator_id", "");
  entry["complete"] = !log.empty() && log.back().type == "study_completed";

  try {
    entry["consistency"] = consistency(log);
  } catch (const Error& e) {
    if (e.code() != ErrorCode::not_ready) throw;
    entry["consistency"] = nullptr;
  }

  std::map<std::string, PhaseStats> phases;
  for (const auto& a : logged_answers(log)) {
    auto& p = phases[a.phase];
    ++p.queries;
    if (!a.chosen) ++p.skips;
    p.response_ms += a.response_ms;
  }
  std::map<std::string, std::vector<double>> curves;
  std::map<std::string, double> point;
  nlohmann::json survey = nlohmann::json::object();
  for (const auto& e : log) {
    if (e.type == "query") {
      phases[e.data.at("phase").get<std::string>()].compute_ms += e.data.value("compute_ms", 0.0);
    } else if (e.type == "evaluation") {
      const auto strategy = e.data.at("strategy").get<std::string>();
      const double acc = e.data.at("accuracy").get<double>();
      if (strategy == "base" || strategy == "warm_start" || strategy == "all_tuples") {
        point[strategy] = acc;
        continue;
      }
      curves[strategy].push_back(acc);
      if (e.data.at("step").get<std::size_t>() > 0)
        phases[strategy_phase(strategy)].compute_ms += e.data.value("compute_ms", 0.0);
    } else if (e.type == "survey") {
      for (const auto& [k, v] : e.data.at("answers").items()) survey[k] = v;
    }
  }

  nlohmann::json pj = nlohmann::json::object();
  for (const auto& name : kPhases) {
    const auto it = phases.find(name);
    if (it == phases.end() || it->second.queries == 0) continue;
    const auto& p = it->second;
    const double q = static_cast<double>(p.queries);
    pj[name] = {{"queries", p.queries},
                {"skips", p.skips},
                {"skip_rate", static_cast<double>(p.skips) / q},
                {"mean_response_s", p.response_ms / q / 1000.0},
                {"compute_s", p.compute_ms / q / 1000.0}};
  }
  entry["phases"] = pj;

  nlohmann::json acc = nlohmann::json::object();
  for (const auto& [k, v] : point) acc[k] = v;
  entry["accuracy"] = acc;

  nlohmann::json cj = nlohmann::json::object(), fj = nlohmann::json::object(), ej = nlohmann::json::object();
  for (const auto& s : kStrategies) {
    const auto it = curves.find(s);
    if (it == curves.end() || it->second.empty()) continue;
    cj[s] = it->second;
    const double final_acc = it->second.back();
    fj[s] = final_acc;
    const auto ph = pj.find(strategy_phase(s));
    if (ph == pj.end()) continue;
    const double rt = ph->at("mean_response_s").get<double>(), ct = ph->at("compute_s").get<double>();
    const auto skips = ph->at("skips").get<std::size_t>();
    const Effectiveness eff = effectiveness(final_acc, rt, ct, skips);
    ej[s] = {{"accuracy", final_acc}, {"response_s", rt}, {"compute_s", ct}, {"skips", skips},
             {"E", eff.E},            {"TE", eff.TE},       {"LE", eff.LE}};
  }
  entry["curves"] = cj;
  entry["final_accuracy"] = fj;
  entry["effectiveness"] = ej;
  entry["survey"] = survey;
  return entry;
}

}  // namespace

std::string strategy_phase(const std::string& strategy) {
  if (strategy == "random") return "rq2_rnd";
  if (strategy == "random_nn") return "rq2_mixed";
  if (strategy == "nn") return "rq2_nn";
  if (strategy == "active_nn") return "rq3_active_nn";
  if (strategy == "infotuple") return "rq3_infotuple";
  fail(ErrorCode::invalid_input, "no phase for strategy '" + strategy + "'");
}

nlohmann::json build_report(const std::vector<std::vector<Event>>& logs, const ReportOptions& opts) {
  nlohmann::json report;
  report["schema"] = kReportSchema;
  auto annotators = nlohmann::json::array();
  for (const auto& log : logs) annotators.push_back(annotator_entry(log));
  report["annotators"] = annotators;

  // Reliability over annotators that finished repeat1.
  std::vector<std::size_t> members;
  for (std::size_t i = 0; i < logs.size(); ++i)
    if (phase_completed(logs[i], "repeat1")) members.push_back(i);
  const auto n = static_cast<Eigen::Index>(members.size());
  Eigen::MatrixXd R = Eigen::MatrixXd::Identity(n, n);
  for (Eigen::Index i = 0; i < n; ++i)
    for (Eigen::Index j = i + 1; j < n; ++j)
      R(i, j) = R(j, i) = reliability(logs[members[static_cast<std::size_t>(i)]],
                                      logs[members[static_cast<std::size_t>(j)]]);
  std::vector<std::string> ids;
  auto matrix = nlohmann::json::array();
  for (Eigen::Index i = 0; i < n; ++i) {
    ids.push_back(annotators[members[static_cast<std::size_t>(i)]]["annotator_id"].get<std::string>());
    std::vector<double> row(static_cast<std::size_t>(n));
    for (Eigen::Index j = 0; j < n; ++j) row[static_cast<std::size_t>(j)] = R(i, j);
    matrix.push_back(row);
  }
  report["reliability"] = {{"annotators", ids}, {"matrix", matrix}};
  const AnnotatorClusters clusters = cluster_annotators(R, opts.cluster_threshold);
  report["clusters"] = {{"threshold", opts.cluster_threshold},
                        {"labels", clusters.labels},
                        {"dendrogram", dendrogram_json(clusters.tree, ids)}};

  nlohmann::json strategies = nlohmann::json::object();
  for (const auto& s : kStrategies) {
    double acc = 0, E = 0, TE = 0, LE = 0, skip = 0;
    std::size_t count = 0;
    for (const auto& a : annotators) {
      if (!a["effectiveness"].contains(s)) continue;
      const auto& e = a["effectiveness"][s];
      acc += e["accuracy"].get<double>();
      E += e["E"].get<double>();
      TE += e["TE"].get<double>();
      LE += e["LE"].get<double>();
      skip += a["phases"][strategy_phase(s)]["skip_rate"].get<double>();
      ++count;
    }
    if (count == 0) continue;
    const double c = static_cast<double>(count);
    strategies[s] = {{"annotators", count}, {"final_accuracy", acc / c}, {"E", E / c}, {"TE", TE / c},
                     {"LE", LE / c},        {"skip_rate", skip / c}};
  }
  report["strategies"] = strategies;
  return report;
}

void write_accuracy_csv(std::ostream& out, const nlohmann::json& report) {
  out << "annotator,strategy,step,accuracy\n";
  for (const auto& a : report.at("annotators")) {
    const auto id = a.at("annotator_id").get<std::string>();
    for (const auto& [s, curve] : a.at("curves").items())
      for (std::size_t k = 0; k < curve.size(); ++k) out << id << ',' << s << ',' << k << ',' << curve[k].dump() << '\n';
    for (const auto& [s, v] : a.at("accuracy").items()) out << id << ',' << s << ",0," << v.dump() << '\n';
  }
}

void write_response_time_csv(std::ostream& out, const nlohmann::json& report) {
  out << "annotator,phase,queries,skips,skip_rate,mean_response_s,compute_s\n";
  for (const auto& a : report.at("annotators")) {
    const auto id = a.at("annotator_id").get<std::string>();
    for (const auto& name : kPhases) {
      if (!a.at("phases").contains(name)) continue;
      const auto& p = a["phases"][name];
      out << id << ',' << name << ',' << p["queries"].dump() << ',' << p["skips"].dump() << ','
          << p["skip_rate"].dump() << ',' << p["mean_response_s"].dump() << ',' << p["compute_s"].dump() << '\n';
    }
  }
}

void write_effectiveness_csv(std::ostream& out, const nlohmann::json& report) {
  out << "annotator,strategy,accuracy,response_s,compute_s,skips,E,TE,LE\n";
  for (const auto& a : report.at("annotators")) {
    const auto id = a.at("annotator_id").get<std::string>();
    for (const auto& [s, e] : a.at("effectiveness").items())
      out << id << ',' << s << ',' << e["accuracy"].dump() << ',' << e["response_s"].dump() << ','
          << e["compute_s"].dump() << ',' << e["skips"].dump() << ',' << e["E"].dump() << ',' << e["TE"].dump()
          << ',' << e["LE"].dump() << '\n';
  }
}

TripletSet repeat1_triplets(const std::vector<Event>& log, const Dataset& dataset) {
  require(phase_completed(log, "repeat1"), "repeat1_triplets: repeat1 is not complete");
  TripletSet out;
  for (const auto& a : logged_answers(log)) {
    if (a.phase != "repeat1" || !a.chosen) continue;
    const std::size_t head = dataset.index_of(a.head), chosen = dataset.index_of(*a.chosen);
    for (const auto& b : a.body)
      if (b != *a.chosen) out.push_back({head, chosen, dataset.index_of(b)});
  }
  return out;
}

TripletSet combine_warmstart(const std::vector<const std::vector<Event>*>& members, const Dataset& dataset) {
  require(!members.empty(), "combine_warmstart: empty cluster");
  TripletSet out;
  for (const auto* log : members) {
    require(log != nullptr, "combine_warmstart: missing session log");
    const auto t = repeat1_triplets(*log, dataset);
    out.insert(out.end(), t.begin(), t.end());
  }
  return out;
}

}  // namespace simtuple
