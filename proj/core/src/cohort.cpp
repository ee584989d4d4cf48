#include "simtuple/cohort.hpp"

#include "simtuple/error.hpp"

#include <spdlog/spdlog.h>

#include <algorithm>
#include <cmath>
#include <random>

namespace simtuple {

std::vector<OracleProfile> make_cohort(const CohortSpec& spec, const CohortContext& ctx) {
  require(spec.n >= 1, "make_cohort: n must be at least 1");
  require(ctx.table != nullptr, "make_cohort: missing distance table");
  require(!ctx.consistency_queries.empty() && !ctx.random_queries.empty(), "make_cohort: empty calibration queries");

  std::mt19937_64 rng(spec.seed);
  std::discrete_distribution<int> kind(spec.latent_mix.begin(), spec.latent_mix.end());
  std::normal_distribution<double> consistency(spec.consistency_mean, spec.consistency_sd);
  // Weighted annotators first balance the three roles (the ball is a single
  // row against eleven per team), then emphasize each by a log-uniform factor.
  std::array<double, 3> role_mean{};
  const std::size_t n = ctx.table->size();
  for (std::size_t i = 0; i < n; ++i)
    for (std::size_t j = i + 1; j < n; ++j) {
      const auto c = ctx.table->components(i, j);
      for (std::size_t r = 0; r < 3; ++r) role_mean[r] += c[r];
    }
  const double total = role_mean[0] + role_mean[1] + role_mean[2];
  std::uniform_real_distribution<double> log_factor(-std::log(4.0), std::log(4.0));
  std::array<double, 3> weighted_roles{};
  for (std::size_t r = 0; r < 3; ++r)
    weighted_roles[r] = role_mean[r] > 0.0 ? std::exp(log_factor(rng)) * total / (3.0 * role_mean[r]) : 1.0;

  std::vector<OracleProfile> out;
  out.reserve(spec.n);
  for (std::size_t i = 0; i < spec.n; ++i) {
    OracleProfile p;
    p.id = "oracle-" + std::to_string(i);
    p.cluster = kind(rng);
    p.latent = static_cast<LatentKind>(p.cluster);
    if (p.latent == LatentKind::weighted) p.role_weights = weighted_roles;
    p.base_skip_rate = spec.base_skip_rate;
    p.seed = rng();
    p.target_consistency = std::clamp(consistency(rng), 0.25, 0.75);

    const LatentMetric metric(*ctx.table, ctx.archetypes, p);
    p.skip_threshold = calibrate_skip_threshold(metric, ctx.random_queries, spec.random_skip_rate, spec.base_skip_rate);

    // Clamp the target into the reachable band before calibrating.
    const double ceiling = expected_consistency(p, metric, ctx.consistency_queries, 0.0);
    double target = std::min(p.target_consistency, ceiling);
    Calibration cal;
    try {
      cal = calibrate_consistency(p, metric, target, ctx.consistency_queries);
    } catch (const Error& e) {
      if (e.code() != ErrorCode::calibration) throw;
      spdlog::warn("make_cohort: {}: {}; using the noisiest reachable temperature", p.id, e.what());
      double scale = ctx.table->mean_distance();
      cal.beta = scale * 1e6;
      cal.achieved = expected_consistency(p, metric, ctx.consistency_queries, cal.beta);
    }
    p.beta = cal.beta;
    p.expected_consistency = cal.achieved;
    out.push_back(std::move(p));
  }
  return out;
}

std::vector<Oracle> make_oracles(const std::vector<OracleProfile>& profiles, const CohortContext& ctx) {
  require(ctx.table != nullptr, "make_oracles: missing distance table");
  std::vector<Oracle> out;
  out.reserve(profiles.size());
  for (const auto& p : profiles) out.emplace_back(p, LatentMetric(*ctx.table, ctx.archetypes, p));
  return out;
}

nlohmann::json cohort_to_json(const std::vector<OracleProfile>& profiles) {
  auto arr = nlohmann::json::array();
  for (const auto& p : profiles) arr.push_back(to_json(p));
  return {{"profiles", arr}};
}

std::vector<OracleProfile> cohort_from_json(const nlohmann::json& doc) {
  const auto& arr = doc.is_array() ? doc : doc.at("profiles");
  std::vector<OracleProfile> out;
  for (const auto& p : arr) out.push_back(oracle_profile_from_json(p));
  return out;
}

}  // namespace simtuple
