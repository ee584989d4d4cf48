#include "simtuple/compose.hpp"

#include "simtuple/error.hpp"
#include "simtuple/tste.hpp"

#include <algorithm>
#include <cmath>
#include <numeric>

namespace simtuple {

namespace {

std::size_t pick_head(std::optional<std::size_t> head, std::size_t n, std::mt19937_64& rng) {
  if (head) {
    require(*head < n, "compose: head out of range");
    return *head;
  }
  return std::uniform_int_distribution<std::size_t>(0, n - 1)(rng);
}

// `count` distinct indices below n, none of them in `exclude`, in random order.
std::vector<std::size_t> sample_excluding(std::size_t n, const std::vector<std::size_t>& exclude, std::size_t count,
                                          std::mt19937_64& rng) {
  std::vector<bool> banned(n, false);
  for (auto e : exclude) banned[e] = true;
  std::vector<std::size_t> pool;
  pool.reserve(n);
  for (std::size_t i = 0; i < n; ++i)
    if (!banned[i]) pool.push_back(i);
  require(pool.size() >= count, "compose: dataset too small for the requested tuple size");
  // Partial Fisher-Yates.
  for (std::size_t i = 0; i < count; ++i) {
    std::uniform_int_distribution<std::size_t> pick(i, pool.size() - 1);
    std::swap(pool[i], pool[pick(rng)]);
  }
  pool.resize(count);
  return pool;
}

}  // namespace

TupleQuery compose_random(std::size_t n_objects, std::optional<std::size_t> head, std::size_t k,
                          std::mt19937_64& rng) {
  require(k >= 2, "compose_random: tuple size must be at least 2");
  require(n_objects >= k, "compose_random: dataset has fewer scenes than the tuple size");
  TupleQuery q;
  q.strategy = Strategy::random;
  q.head = pick_head(head, n_objects, rng);
  q.body = sample_excluding(n_objects, {q.head}, k - 1, rng);
  return q;
}

TupleQuery compose_nn(const EmbeddingStore& store, std::uint64_t model_version, std::optional<std::size_t> head,
                      std::size_t k, std::mt19937_64& rng) {
  store.require_version(model_version);
  require(k >= 2 && store.size() >= k, "compose_nn: dataset too small for the requested tuple size");
  TupleQuery q;
  q.strategy = Strategy::nn;
  q.model_version = model_version;
  q.head = pick_head(head, store.size(), rng);
  q.body = store.knn(q.head, k - 1);
  return q;
}

TupleQuery compose_mixed(const EmbeddingStore& store, std::uint64_t model_version, std::optional<std::size_t> head,
                         std::size_t k, std::mt19937_64& rng) {
  store.require_version(model_version);
  require(k >= 2 && store.size() >= k, "compose_mixed: dataset too small for the requested tuple size");
  const std::size_t n_nn = k / 2;  // ceil((k-1)/2)
  const std::size_t n_rnd = (k - 1) / 2;
  TupleQuery q;
  q.strategy = Strategy::random_nn;
  q.model_version = model_version;
  q.head = pick_head(head, store.size(), rng);
  q.body = store.knn(q.head, n_nn);
  auto exclude = q.body;
  exclude.push_back(q.head);
  const auto extra = sample_excluding(store.size(), exclude, n_rnd, rng);
  q.body.insert(q.body.end(), extra.begin(), extra.end());
  std::shuffle(q.body.begin(), q.body.end(), rng);
  return q;
}

double top1_entropy(const std::vector<double>& distances, double alpha) {
  if (distances.empty()) return 0.0;
  // Log-kernel values shifted by their maximum for a stable softmax.
  const double u = (alpha + 1.0) / 2.0;
  std::vector<double> lk(distances.size());
  for (std::size_t i = 0; i < distances.size(); ++i) lk[i] = -u * std::log1p(distances[i] * distances[i] / alpha);
  const double top = *std::max_element(lk.begin(), lk.end());
  double z = 0.0;
  for (double v : lk) z += std::exp(v - top);
  double h = 0.0;
  for (double v : lk) {
    const double p = std::exp(v - top) / z;
    if (p > 0.0) h -= p * std::log(p);
  }
  return h;
}

TupleQuery active_nn_select(const EmbeddingStore& store, std::uint64_t model_version,
                            const OrdinalPosterior& posterior, std::size_t k, const std::vector<bool>* used) {
  store.require_version(model_version);
  require(posterior.size() == store.size(), "active_nn_select: posterior and dataset differ in size");
  require(k >= 2 && store.size() >= k, "active_nn_select: dataset too small for the requested tuple size");
  const std::size_t n = store.size();
  bool any_free = false;
  if (used) {
    require(used->size() == n, "active_nn_select: used-head mask has the wrong size");
    any_free = std::find(used->begin(), used->end(), false) != used->end();
  }

  TupleQuery best;
  best.strategy = Strategy::active_nn;
  best.model_version = model_version;
  double best_h = -1.0;
  std::vector<double> d(k - 1);
  for (std::size_t h = 0; h < n; ++h) {
    if (any_free && (*used)[h]) continue;
    auto body = store.knn(h, k - 1);
    for (std::size_t i = 0; i < body.size(); ++i)
      d[i] = posterior.D()(static_cast<Eigen::Index>(h), static_cast<Eigen::Index>(body[i]));
    const double entropy = top1_entropy(d, posterior.alpha());
    if (entropy > best_h) {
      best_h = entropy;
      best.head = h;
      best.body = std::move(body);
    }
  }
  return best;
}

}  // namespace simtuple
