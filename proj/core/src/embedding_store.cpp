#include "simtuple/embedding_store.hpp"

#include "simtuple/error.hpp"

#include <spdlog/spdlog.h>

#include <algorithm>
#include <numeric>

namespace simtuple {

EmbeddingStore::EmbeddingStore(Eigen::MatrixXd embeddings, std::uint64_t model_version)
    : e_(std::move(embeddings)), version_(model_version) {}

EmbeddingStore EmbeddingStore::build(const EmbeddingModel& model, const std::vector<Eigen::MatrixXd>& inputs) {
  return EmbeddingStore(embed_all(model, inputs), model.version);
}

double EmbeddingStore::distance(std::size_t i, std::size_t j) const {
  return (e_.col(static_cast<Eigen::Index>(i)) - e_.col(static_cast<Eigen::Index>(j))).norm();
}

void EmbeddingStore::require_version(std::uint64_t model_version) const {
  if (model_version != version_)
    fail(ErrorCode::stale_model, "embeddings were built for model version " + std::to_string(version_) +
                                     ", current version is " + std::to_string(model_version));
}

std::vector<std::size_t> EmbeddingStore::knn(std::size_t head, std::size_t k) const {
  const std::size_t n = size();
  require(head < n, "knn: head index out of range");
  if (k >= n) {
    spdlog::warn("knn: k={} exceeds the {} other scenes, truncating", k, n - 1);
    k = n - 1;
  }
  if (k == 0) return {};
  const Eigen::VectorXd d2 = (e_.colwise() - e_.col(static_cast<Eigen::Index>(head))).colwise().squaredNorm();
  std::vector<std::size_t> idx;
  idx.reserve(n - 1);
  for (std::size_t i = 0; i < n; ++i)
    if (i != head) idx.push_back(i);
  auto closer = [&](std::size_t a, std::size_t b) {
    const double da = d2[static_cast<Eigen::Index>(a)], db = d2[static_cast<Eigen::Index>(b)];
    return da < db || (da == db && a < b);
  };
  std::partial_sort(idx.begin(), idx.begin() + static_cast<std::ptrdiff_t>(k), idx.end(), closer);
  idx.resize(k);
  return idx;
}

}  // namespace simtuple
