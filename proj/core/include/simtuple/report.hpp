#pragma once

#include "simtuple/events.hpp"
#include "simtuple/network_input.hpp"
#include "simtuple/triplet.hpp"

#include <nlohmann/json.hpp>

#include <iosfwd>
#include <string>
#include <vector>

namespace simtuple {

inline constexpr int kReportSchema = 1;

struct ReportOptions {
  /// Cut height of the annotator dendrogram, on the 1 - R scale.
  double cluster_threshold = 0.37;
};

/// Metrics report computed from session logs alone, so re-running it on
/// stored logs reproduces it exactly. Layout:
///   annotators[]: consistency, per-phase skips and times, accuracy curves,
///                 final accuracy and E/TE/LE per strategy
///   reliability:  annotator ids and the pairwise R matrix
///   clusters:     flat labels and the nested dendrogram
///   strategies:   per-strategy means over annotators
nlohmann::json build_report(const std::vector<std::vector<Event>>& logs, const ReportOptions& opts = {});

/// Phase whose queries a strategy composes ("random" -> "rq2_rnd", ...).
std::string strategy_phase(const std::string& strategy);

/// annotator,strategy,step,accuracy
void write_accuracy_csv(std::ostream& out, const nlohmann::json& report);
/// annotator,phase,queries,skips,skip_rate,mean_response_s,compute_s
void write_response_time_csv(std::ostream& out, const nlohmann::json& report);
/// annotator,strategy,accuracy,response_s,compute_s,skips,E,TE,LE
void write_effectiveness_csv(std::ostream& out, const nlohmann::json& report);

/// Triplets from the annotator's repeat1 answers, scene ids resolved in
/// `dataset`.
TripletSet repeat1_triplets(const std::vector<Event>& log, const Dataset& dataset);

/// Union of the members' repeat1 triplets; conflicting answers are all kept.
/// Throws invalid_input for an empty cluster or an incomplete repeat1.
TripletSet combine_warmstart(const std::vector<const std::vector<Event>*>& members, const Dataset& dataset);

}  // namespace simtuple
