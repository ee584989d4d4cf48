#pragma once

#include "simtuple/embedding_store.hpp"
#include "simtuple/posterior.hpp"
#include "simtuple/query.hpp"

#include <optional>
#include <random>

namespace simtuple {

/// Default tuple size: one head plus eight body scenes.
inline constexpr std::size_t kDefaultTupleSize = 9;

/// Uniform head (unless given) and a uniform body of k-1 other scenes.
TupleQuery compose_random(std::size_t n_objects, std::optional<std::size_t> head, std::size_t k,
                          std::mt19937_64& rng);

/// Body = the head's k-1 embedding nearest neighbors. Throws stale_model when
/// the store was built for another model version.
TupleQuery compose_nn(const EmbeddingStore& store, std::uint64_t model_version, std::optional<std::size_t> head,
                      std::size_t k, std::mt19937_64& rng);

/// ceil((k-1)/2) nearest neighbors plus floor((k-1)/2) uniform non-neighbors,
/// shuffled.
TupleQuery compose_mixed(const EmbeddingStore& store, std::uint64_t model_version, std::optional<std::size_t> head,
                         std::size_t k, std::mt19937_64& rng);

/// Entropy (nats) of the top-1 choice distribution p_i ~ tste_kernel(d_i).
double top1_entropy(const std::vector<double>& distances, double alpha);

/// Head whose k-1 nearest-neighbor body has the most uncertain top-1
/// response under the posterior's mean distances; ties go to the lower index.
/// Heads flagged in `used` are skipped while others remain.
TupleQuery active_nn_select(const EmbeddingStore& store, std::uint64_t model_version,
                            const OrdinalPosterior& posterior, std::size_t k,
                            const std::vector<bool>* used = nullptr);

}  // namespace simtuple
