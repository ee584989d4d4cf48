#pragma once

#include "simtuple/network.hpp"

#include <Eigen/Core>

#include <cstdint>
#include <vector>

namespace simtuple {

/// Materialized embeddings of a dataset for one model version. Immutable.
class EmbeddingStore {
 public:
  EmbeddingStore() = default;
  EmbeddingStore(Eigen::MatrixXd embeddings, std::uint64_t model_version);

  static EmbeddingStore build(const EmbeddingModel& model, const std::vector<Eigen::MatrixXd>& inputs);

  std::size_t size() const { return static_cast<std::size_t>(e_.cols()); }
  std::uint64_t model_version() const { return version_; }
  const Eigen::MatrixXd& embeddings() const { return e_; }
  double distance(std::size_t i, std::size_t j) const;

  /// Throws stale_model unless the store was built from `model_version`.
  void require_version(std::uint64_t model_version) const;

  /// Up to k dataset indices nearest to `head`, ascending by embedding
  /// distance, head excluded, ties broken by lower index. Requests beyond the
  /// dataset are truncated with a warning.
  std::vector<std::size_t> knn(std::size_t head, std::size_t k) const;

 private:
  Eigen::MatrixXd e_;
  std::uint64_t version_ = 0;
};

}  // namespace simtuple
