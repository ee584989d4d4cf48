#pragma once

#include "simtuple/oracle.hpp"

#include <array>
#include <vector>

namespace simtuple {

struct CohortSpec {
  std::size_t n = 18;
  double consistency_mean = 0.498;
  double consistency_sd = 0.11;
  /// Probabilities of the euclidean, archetype and weighted latents.
  std::array<double, kLatentKindCount> latent_mix = {0.2, 0.4, 0.4};
  double base_skip_rate = 0.05;
  /// Skip rate each oracle shows on randomly composed queries.
  double random_skip_rate = 0.54;
  std::uint64_t seed = 0;
};

/// Everything the cohort is calibrated against.
struct CohortContext {
  const DistanceTable* table = nullptr;
  std::vector<std::optional<Archetype>> archetypes;
  /// Shared repeated queries; temperatures are calibrated on these.
  std::vector<TupleQuery> consistency_queries;
  /// Randomly composed queries; skip thresholds are calibrated on these.
  std::vector<TupleQuery> random_queries;
};

/// Seeded cohort. Oracles of one latent kind form a cluster and share its
/// parameters; consistency targets are drawn from N(mean, sd), clipped to
/// [0.25, 0.75] and then to what the oracle can reach.
std::vector<OracleProfile> make_cohort(const CohortSpec& spec, const CohortContext& ctx);

std::vector<Oracle> make_oracles(const std::vector<OracleProfile>& profiles, const CohortContext& ctx);

nlohmann::json cohort_to_json(const std::vector<OracleProfile>& profiles);
std::vector<OracleProfile> cohort_from_json(const nlohmann::json& doc);

}  // namespace simtuple
