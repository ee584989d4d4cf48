#include "simtuple/posterior.hpp"

#include "simtuple/error.hpp"

#include <cmath>
#include <random>

namespace simtuple {

Eigen::MatrixXd normalize_scale(const Eigen::MatrixXd& M) {
  const Eigen::Index n = M.cols();
  if (n < 2) return M;
  const Eigen::VectorXd sq = M.colwise().squaredNorm().transpose();
  const Eigen::MatrixXd gram = M.transpose() * M;
  double sum = 0.0;
  for (Eigen::Index j = 1; j < n; ++j)
    for (Eigen::Index i = 0; i < j; ++i) sum += std::sqrt(std::max(0.0, sq[i] + sq[j] - 2.0 * gram(i, j)));
  const double mean = sum / (0.5 * static_cast<double>(n) * static_cast<double>(n - 1));
  return mean > 0.0 ? Eigen::MatrixXd(M / mean) : M;
}

OrdinalPosterior::OrdinalPosterior(Eigen::MatrixXd M, double alpha, std::vector<Eigen::MatrixXd> replicas)
    : M_(normalize_scale(M)), alpha_(alpha) {
  require(alpha > 0.0, "posterior: alpha must be positive");
  K_ = M_.transpose() * M_;
  const Eigen::VectorXd sq = K_.diagonal();
  const Eigen::Index n = M_.cols();
  D_.resize(n, n);
  for (Eigen::Index j = 0; j < n; ++j) {
    D_(j, j) = 0.0;
    for (Eigen::Index i = 0; i < j; ++i) D_(i, j) = D_(j, i) = std::sqrt(std::max(0.0, sq[i] + sq[j] - 2.0 * K_(i, j)));
  }
  for (auto& r : replicas) {
    require(r.cols() == n, "posterior: replica size mismatch");
    replicas_.push_back(normalize_scale(r));
  }
  has_stats_ = replicas_.size() >= 2;
}

OrdinalPosterior OrdinalPosterior::from_embedding(const Eigen::MatrixXd& embeddings, double alpha) {
  OrdinalPosterior p(embeddings, alpha, {});
  // Identical replicas: every pair has zero variance.
  p.replicas_ = {p.M_, p.M_};
  p.has_stats_ = true;
  return p;
}

DistanceMoments OrdinalPosterior::stats(std::size_t i, std::size_t j) const {
  if (!has_stats_) fail(ErrorCode::posterior_not_ready, "posterior has no distance statistics");
  const auto a = static_cast<Eigen::Index>(i), b = static_cast<Eigen::Index>(j);
  const double B = static_cast<double>(replicas_.size());
  auto dist = [&](const Eigen::MatrixXd& r) { return (r.col(a) - r.col(b)).norm(); };
  DistanceMoments m;
  for (const auto& r : replicas_) m.mean += dist(r);
  m.mean /= B;
  // Two passes, so identical replicas give exactly zero.
  for (const auto& r : replicas_) m.var += (dist(r) - m.mean) * (dist(r) - m.mean);
  m.var /= B - 1.0;
  return m;
}

nlohmann::json OrdinalPosterior::summary() const {
  nlohmann::json doc;
  doc["n_objects"] = size();
  doc["d_ord"] = M_.rows();
  doc["alpha"] = alpha_;
  doc["replicas"] = replicas_.size();
  doc["has_stats"] = has_stats_;
  auto coords = nlohmann::json::array();
  for (Eigen::Index c = 0; c < M_.cols(); ++c)
    coords.push_back(std::vector<double>(M_.col(c).data(), M_.col(c).data() + M_.rows()));
  doc["M"] = coords;
  return doc;
}

OrdinalPosterior bootstrap_posterior(const TripletSet& triplets, std::size_t n_objects, const BootstrapConfig& cfg) {
  require(cfg.B >= 2, "bootstrap_posterior: B must be at least 2");
  const TsteFit point = fit_tste(triplets, n_objects, cfg.tste);
  std::vector<Eigen::MatrixXd> replicas;
  replicas.reserve(cfg.B);
  std::mt19937_64 rng(cfg.tste.seed ^ 0xb5ad4eceda1ce2a9ULL);
  for (std::size_t b = 0; b < cfg.B; ++b) {
    TripletSet sample;
    if (cfg.resample && !triplets.empty()) {
      std::uniform_int_distribution<std::size_t> pick(0, triplets.size() - 1);
      sample.reserve(triplets.size());
      for (std::size_t k = 0; k < triplets.size(); ++k) sample.push_back(triplets[pick(rng)]);
    } else {
      sample = triplets;
    }
    TsteConfig rc = cfg.tste;
    if (!cfg.identical_seeds) rc.seed = cfg.tste.seed + 1 + b;
    replicas.push_back(fit_tste(sample, n_objects, rc).M);
  }
  return OrdinalPosterior(point.M, cfg.tste.resolved_alpha(), std::move(replicas));
}

}  // namespace simtuple
