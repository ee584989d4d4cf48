#include "simtuple/oracle.hpp"

#include "simtuple/error.hpp"

#include <algorithm>
#include <cmath>

namespace simtuple {

std::string_view to_string(LatentKind k) noexcept {
  switch (k) {
    case LatentKind::euclidean: return "euclidean";
    case LatentKind::archetype: return "archetype";
    case LatentKind::weighted: return "weighted";
  }
  return "euclidean";
}

LatentKind latent_kind_from_string(std::string_view name) {
  for (auto k : {LatentKind::euclidean, LatentKind::archetype, LatentKind::weighted})
    if (to_string(k) == name) return k;
  fail(ErrorCode::invalid_input, "unknown latent kind '" + std::string(name) + "'");
}

nlohmann::json to_json(const OracleProfile& p) {
  nlohmann::json doc = {
      {"id", p.id},
      {"latent", std::string(to_string(p.latent))},
      {"beta", p.beta},
      {"base_skip_rate", p.base_skip_rate},
      {"role_weights", p.role_weights},
      {"archetype_gap", p.archetype_gap},
      {"cluster", p.cluster},
      {"target_consistency", p.target_consistency},
      {"expected_consistency", p.expected_consistency},
      {"seed", p.seed},
  };
  // JSON has no infinity; an absent threshold means never skip on distance.
  if (std::isfinite(p.skip_threshold)) doc["skip_threshold"] = p.skip_threshold;
  return doc;
}

OracleProfile oracle_profile_from_json(const nlohmann::json& doc) {
  try {
    OracleProfile p;
    p.id = doc.at("id").get<std::string>();
    p.latent = latent_kind_from_string(doc.at("latent").get<std::string>());
    p.beta = doc.value("beta", 0.0);
    if (doc.contains("skip_threshold")) p.skip_threshold = doc["skip_threshold"].get<double>();
    p.base_skip_rate = doc.value("base_skip_rate", 0.0);
    if (doc.contains("role_weights")) p.role_weights = doc["role_weights"].get<std::array<double, 3>>();
    p.archetype_gap = doc.value("archetype_gap", 0.0);
    p.cluster = doc.value("cluster", 0);
    p.target_consistency = doc.value("target_consistency", 0.0);
    p.expected_consistency = doc.value("expected_consistency", 0.0);
    p.seed = doc.value("seed", std::uint64_t{0});
    require(p.beta >= 0.0, "oracle profile '" + p.id + "': beta must be non-negative");
    require(p.base_skip_rate >= 0.0 && p.base_skip_rate <= 1.0,
            "oracle profile '" + p.id + "': base_skip_rate must lie in [0, 1]");
    return p;
  } catch (const nlohmann::json::exception& e) {
    fail(ErrorCode::parse, std::string("oracle profile: ") + e.what());
  }
}

LatentMetric::LatentMetric(const DistanceTable& table, std::vector<std::optional<Archetype>> archetypes,
                           const OracleProfile& profile)
    : table_(&table),
      archetypes_(std::move(archetypes)),
      kind_(profile.latent),
      weights_(profile.role_weights),
      gap_(profile.archetype_gap > 0.0 ? profile.archetype_gap : table.mean_distance()) {
  require(archetypes_.size() == table.size(), "LatentMetric: archetype list does not match the distance table");
}

double LatentMetric::operator()(std::size_t i, std::size_t j) const {
  switch (kind_) {
    case LatentKind::euclidean: return table_->distance(i, j);
    case LatentKind::archetype: {
      const bool differ = archetypes_[i] && archetypes_[j] && *archetypes_[i] != *archetypes_[j];
      return 0.5 * table_->distance(i, j) + (differ ? gap_ : 0.0);
    }
    case LatentKind::weighted: {
      const auto c = table_->components(i, j);
      return weights_[0] * c[0] + weights_[1] * c[1] + weights_[2] * c[2];
    }
  }
  return 0.0;
}

std::vector<double> choice_probabilities(const LatentMetric& metric, const TupleQuery& q, double beta) {
  std::vector<double> d(q.body.size()), p(q.body.size(), 0.0);
  for (std::size_t i = 0; i < d.size(); ++i) d[i] = metric(q.head, q.body[i]);
  const auto best = static_cast<std::size_t>(std::min_element(d.begin(), d.end()) - d.begin());
  if (beta <= 0.0) {
    p[best] = 1.0;
    return p;
  }
  double z = 0.0;
  for (std::size_t i = 0; i < d.size(); ++i) z += (p[i] = std::exp(-(d[i] - d[best]) / beta));
  for (auto& v : p) v /= z;
  return p;
}

double skip_probability(const OracleProfile& p, const LatentMetric& metric, const TupleQuery& q) {
  double closest = std::numeric_limits<double>::infinity();
  for (auto b : q.body) closest = std::min(closest, metric(q.head, b));
  return closest > p.skip_threshold ? 1.0 : p.base_skip_rate;
}

double expected_consistency(const OracleProfile& p, const LatentMetric& metric, const std::vector<TupleQuery>& queries,
                            double beta) {
  require(!queries.empty(), "expected_consistency: empty query set");
  double sum = 0.0;
  for (const auto& q : queries) {
    const double s = skip_probability(p, metric, q);
    double collide = 0.0;
    for (double v : choice_probabilities(metric, q, beta)) collide += v * v;
    sum += s * s + (1.0 - s) * (1.0 - s) * collide;
  }
  return sum / static_cast<double>(queries.size());
}

Calibration calibrate_consistency(const OracleProfile& p, const LatentMetric& metric, double target,
                                  const std::vector<TupleQuery>& queries) {
  require(target > 0.0 && target <= 1.0, "calibrate_consistency: target must lie in (0, 1]");
  constexpr double tol = 0.02;
  const double ceiling = expected_consistency(p, metric, queries, 0.0);
  if (target > ceiling + tol)
    fail(ErrorCode::calibration, "consistency " + std::to_string(target) + " is unreachable; the achievable maximum is " +
                                     std::to_string(ceiling));
  if (target >= ceiling - tol) return {0.0, ceiling};

  // Scale the temperature search to the latent distances.
  double scale = 0.0;
  for (const auto& q : queries)
    for (auto b : q.body) scale += metric(q.head, b);
  scale = std::max(1e-9, scale / static_cast<double>(queries.size() * queries.front().body.size()));
  double lo = std::log(scale * 1e-6), hi = std::log(scale * 1e6);
  const double floor = expected_consistency(p, metric, queries, std::exp(hi));
  if (target < floor - tol)
    fail(ErrorCode::calibration, "consistency " + std::to_string(target) + " is unreachable; the achievable minimum is " +
                                     std::to_string(floor));
  Calibration c{std::exp(hi), floor};
  for (int it = 0; it < 100; ++it) {
    const double mid = 0.5 * (lo + hi);
    const double value = expected_consistency(p, metric, queries, std::exp(mid));
    c = {std::exp(mid), value};
    if (std::abs(value - target) < 1e-4) break;
    if (value > target)
      lo = mid;
    else
      hi = mid;
  }
  return c;
}

double calibrate_skip_threshold(const LatentMetric& metric, const std::vector<TupleQuery>& queries,
                                double target_rate, double base_skip_rate) {
  require(!queries.empty(), "calibrate_skip_threshold: empty query set");
  require(base_skip_rate < 1.0, "calibrate_skip_threshold: base skip rate must be below 1");
  const double q = std::clamp((target_rate - base_skip_rate) / (1.0 - base_skip_rate), 0.0, 1.0);
  std::vector<double> closest;
  closest.reserve(queries.size());
  for (const auto& query : queries) {
    double c = std::numeric_limits<double>::infinity();
    for (auto b : query.body) c = std::min(c, metric(query.head, b));
    closest.push_back(c);
  }
  std::sort(closest.begin(), closest.end());
  // A fraction q of queries must have their closest scene beyond the threshold.
  const auto keep = static_cast<std::size_t>(std::llround((1.0 - q) * static_cast<double>(closest.size())));
  if (keep == 0) return 0.0;
  if (keep >= closest.size()) return std::numeric_limits<double>::infinity();
  return 0.5 * (closest[keep - 1] + closest[keep]);
}

Oracle::Oracle(OracleProfile profile, LatentMetric metric)
    : profile_(std::move(profile)), metric_(std::move(metric)), rng_(profile_.seed) {}

TupleResponse Oracle::respond(const TupleQuery& q) {
  std::uniform_real_distribution<double> unit(0.0, 1.0);
  std::normal_distribution<double> normal(0.0, 1.0);
  const double u_skip = unit(rng_), u_choice = unit(rng_), z_time = normal(rng_);

  TupleResponse r;
  r.query_id = q.id;
  r.annotator_id = profile_.id;
  const double mu = std::log(kMeanResponseMs) - 0.5 * kResponseSigma * kResponseSigma;
  r.response_ms = std::exp(mu + kResponseSigma * z_time);

  const double s = skip_probability(profile_, metric_, q);
  if (s >= 1.0 || u_skip < s) return r;
  const auto p = choice_probabilities(metric_, q, profile_.beta);
  double acc = 0.0;
  std::size_t pick = p.size() - 1;
  for (std::size_t i = 0; i < p.size(); ++i) {
    acc += p[i];
    if (u_choice < acc) {
      pick = i;
      break;
    }
  }
  r.choice = pick;
  return r;
}

}  // namespace simtuple
