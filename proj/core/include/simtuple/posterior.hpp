#pragma once

#include "simtuple/tste.hpp"

#include <Eigen/Core>
#include <nlohmann/json.hpp>

#include <vector>

namespace simtuple {

struct DistanceMoments {
  double mean = 0.0;
  double var = 0.0;
};

struct BootstrapConfig {
  std::size_t B = 10;
  /// Resample triplets with replacement for every replica.
  bool resample = true;
  /// Give every replica the same optimizer seed.
  bool identical_seeds = false;
  TsteConfig tste;
};

/// Ordinal embedding with distance uncertainty. All coordinates are scaled
/// to unit mean pairwise distance. Immutable after construction.
class OrdinalPosterior {
 public:
  OrdinalPosterior() = default;

  /// Point embedding (columns are objects) with bootstrap replicas of the
  /// same shape. Fewer than two replicas means no distance statistics.
  OrdinalPosterior(Eigen::MatrixXd M, double alpha, std::vector<Eigen::MatrixXd> replicas);

  /// Zero-variance posterior over network embeddings (m x N).
  static OrdinalPosterior from_embedding(const Eigen::MatrixXd& embeddings, double alpha);

  std::size_t size() const { return static_cast<std::size_t>(M_.cols()); }
  double alpha() const { return alpha_; }
  const Eigen::MatrixXd& M() const { return M_; }
  const Eigen::MatrixXd& K() const { return K_; }
  const Eigen::MatrixXd& D() const { return D_; }
  bool has_stats() const { return has_stats_; }
  std::size_t replicas() const { return replicas_.size(); }

  /// Mean and unbiased variance of the pair distance across replicas. Throws
  /// posterior_not_ready without statistics.
  DistanceMoments stats(std::size_t i, std::size_t j) const;

  nlohmann::json summary() const;

 private:
  Eigen::MatrixXd M_, K_, D_;
  double alpha_ = 1.0;
  std::vector<Eigen::MatrixXd> replicas_;
  bool has_stats_ = false;
};

/// Scales the columns' coordinates to unit mean pairwise distance. Returns
/// the matrix unchanged when all points coincide.
Eigen::MatrixXd normalize_scale(const Eigen::MatrixXd& M);

/// Fits the point embedding on all triplets and B replicas on bootstrap
/// resamples. Throws invalid_input for B < 2.
OrdinalPosterior bootstrap_posterior(const TripletSet& triplets, std::size_t n_objects, const BootstrapConfig& cfg);

}  // namespace simtuple
