#pragma once

#include "simtuple/events.hpp"
#include "simtuple/network.hpp"
#include "simtuple/triplet.hpp"

#include <Eigen/Core>

#include <optional>
#include <string>
#include <vector>

namespace simtuple {

/// Fraction of triplets with |f(a) - f(p)| < |f(a) - f(n)|; ties count as
/// errors. `embeddings` has one column per dataset index. Throws not_ready on
/// an empty test set.
double triplet_accuracy(const Eigen::MatrixXd& embeddings, const TripletSet& test);

/// Same, embedding only the scenes the test triplets touch.
double triplet_accuracy(const EmbeddingModel& model, const std::vector<Eigen::MatrixXd>& inputs,
                        const TripletSet& test);

struct Effectiveness {
  double E = 0.0;   ///< accuracy per second of response time
  double TE = 0.0;  ///< accuracy per second of response plus compute time
  double LE = 0.0;  ///< accuracy per skip, at least one skip in the denominator
};

/// Throws invalid_input unless response_time_s > 0 and compute_time_s >= 0.
Effectiveness effectiveness(double accuracy, double response_time_s, double compute_time_s, std::size_t n_skips);

/// One answered query as recorded in a session log.
struct LoggedAnswer {
  std::string query_id;
  std::string phase;
  std::string strategy;
  std::string repeat_of;
  bool test = false;
  std::string head;
  std::vector<std::string> body;
  std::optional<std::string> chosen;
  double response_ms = 0.0;
};

std::vector<LoggedAnswer> logged_answers(const std::vector<Event>& log);

/// Whether the log contains a phase_completed event for `phase`.
bool phase_completed(const std::vector<Event>& log, const std::string& phase);

/// Agreement between repeat1 and repeat2 answers to the same queries,
/// comparing chosen scene ids; two skips agree. Throws not_ready until
/// repeat2 is complete.
double consistency(const std::vector<Event>& log);

/// Agreement between two annotators over their shared repeat1 queries, skips
/// compared as an outcome of their own. Throws invalid_input when they share
/// no query.
double reliability(const std::vector<Event>& a, const std::vector<Event>& b);

}  // namespace simtuple
