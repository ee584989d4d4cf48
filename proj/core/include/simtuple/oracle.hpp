#pragma once

#include "simtuple/query.hpp"
#include "simtuple/scene.hpp"
#include "simtuple/scene_distance.hpp"

#include <nlohmann/json.hpp>

#include <array>
#include <limits>
#include <optional>
#include <random>
#include <string>
#include <vector>

namespace simtuple {

enum class LatentKind : std::uint8_t { euclidean, archetype, weighted };
inline constexpr std::size_t kLatentKindCount = 3;

std::string_view to_string(LatentKind k) noexcept;
LatentKind latent_kind_from_string(std::string_view name);

/// Parameters of one simulated annotator.
struct OracleProfile {
  std::string id;
  LatentKind latent = LatentKind::euclidean;
  /// Softmax temperature in meters; 0 picks the latent argmin.
  double beta = 0.0;
  /// Skip whenever the closest body scene is farther than this (meters).
  double skip_threshold = std::numeric_limits<double>::infinity();
  double base_skip_rate = 0.0;
  /// Possession, defending and ball weights of the weighted latent.
  std::array<double, 3> role_weights = {1.0, 1.0, 1.0};
  /// Penalty between scenes of different archetypes; 0 uses the dataset's
  /// mean distance.
  double archetype_gap = 0.0;
  int cluster = 0;
  /// Consistency the temperature was calibrated for, and its exact value.
  double target_consistency = 0.0;
  double expected_consistency = 0.0;
  std::uint64_t seed = 0;
};

nlohmann::json to_json(const OracleProfile& p);
OracleProfile oracle_profile_from_json(const nlohmann::json& doc);

/// The annotator's hidden notion of scene distance.
class LatentMetric {
 public:
  LatentMetric(const DistanceTable& table, std::vector<std::optional<Archetype>> archetypes,
               const OracleProfile& profile);

  double operator()(std::size_t i, std::size_t j) const;
  std::size_t size() const { return table_->size(); }

 private:
  const DistanceTable* table_;
  std::vector<std::optional<Archetype>> archetypes_;
  LatentKind kind_;
  std::array<double, 3> weights_;
  double gap_;
};

/// Top-1 choice probabilities over the body at temperature beta.
std::vector<double> choice_probabilities(const LatentMetric& metric, const TupleQuery& q, double beta);

/// Probability that the annotator skips `q`.
double skip_probability(const OracleProfile& p, const LatentMetric& metric, const TupleQuery& q);

/// Exact expected agreement of two independent answers to each query,
/// averaged over `queries`; two skips agree.
double expected_consistency(const OracleProfile& p, const LatentMetric& metric, const std::vector<TupleQuery>& queries,
                            double beta);

struct Calibration {
  double beta = 0.0;
  double achieved = 0.0;
};

/// Bisection in log(beta) until the expected consistency is within 0.02 of
/// the target. Returns beta = 0 when the target is at the deterministic
/// ceiling; throws calibration naming the achievable range otherwise.
Calibration calibrate_consistency(const OracleProfile& p, const LatentMetric& metric, double target,
                                  const std::vector<TupleQuery>& queries);

/// Threshold that makes the overall skip rate on `queries` (threshold skips
/// plus base-rate skips) equal to `target_rate`.
double calibrate_skip_threshold(const LatentMetric& metric, const std::vector<TupleQuery>& queries,
                                double target_rate, double base_skip_rate);

/// Mean simulated response time.
inline constexpr double kMeanResponseMs = 10000.0;
inline constexpr double kResponseSigma = 0.4;

class Oracle {
 public:
  Oracle(OracleProfile profile, LatentMetric metric);

  const OracleProfile& profile() const { return profile_; }
  const LatentMetric& metric() const { return metric_; }

  /// Draws a response. Consumes the same number of random numbers per call,
  /// so reproducibility only depends on the query sequence.
  TupleResponse respond(const TupleQuery& q);

 private:
  OracleProfile profile_;
  LatentMetric metric_;
  std::mt19937_64 rng_;
};

}  // namespace simtuple
