#include "simtuple/cluster.hpp"

#include "simtuple/error.hpp"

#include <algorithm>
#include <limits>
#include <numeric>

namespace simtuple {

Dendrogram complete_linkage(const Eigen::MatrixXd& distance) {
  require(distance.rows() == distance.cols(), "complete_linkage: distance matrix must be square");
  const auto n = static_cast<std::size_t>(distance.rows());
  Dendrogram tree;
  tree.n = n;
  if (n < 2) return tree;

  // Active cluster ids and the linkage distance between every pair of them.
  std::vector<std::size_t> active(n), size(2 * n - 1, 1);
  std::iota(active.begin(), active.end(), 0);
  Eigen::MatrixXd d = Eigen::MatrixXd::Zero(static_cast<Eigen::Index>(2 * n - 1), static_cast<Eigen::Index>(2 * n - 1));
  d.topLeftCorner(distance.rows(), distance.cols()) = distance;

  while (active.size() > 1) {
    std::size_t bi = 0, bj = 1;
    double best = std::numeric_limits<double>::infinity();
    for (std::size_t i = 0; i < active.size(); ++i)
      for (std::size_t j = i + 1; j < active.size(); ++j) {
        const double v = d(static_cast<Eigen::Index>(active[i]), static_cast<Eigen::Index>(active[j]));
        if (v < best) {
          best = v;
          bi = i;
          bj = j;
        }
      }
    const std::size_t a = active[bi], b = active[bj], c = n + tree.merges.size();
    size[c] = size[a] + size[b];
    tree.merges.push_back({a, b, best, size[c]});
    active.erase(active.begin() + static_cast<std::ptrdiff_t>(bj));
    active.erase(active.begin() + static_cast<std::ptrdiff_t>(bi));
    for (std::size_t k : active) {
      const auto ka = static_cast<Eigen::Index>(k);
      const double v = std::max(d(ka, static_cast<Eigen::Index>(a)), d(ka, static_cast<Eigen::Index>(b)));
      d(ka, static_cast<Eigen::Index>(c)) = d(static_cast<Eigen::Index>(c), ka) = v;
    }
    active.push_back(c);
  }
  return tree;
}

std::vector<std::size_t> cut_tree(const Dendrogram& tree, double threshold) {
  const std::size_t n = tree.n;
  std::vector<std::size_t> parent(n + tree.merges.size());
  std::iota(parent.begin(), parent.end(), 0);
  auto find = [&](std::size_t x) {
    while (parent[x] != x) x = parent[x] = parent[parent[x]];
    return x;
  };
  for (std::size_t i = 0; i < tree.merges.size(); ++i) {
    const auto& m = tree.merges[i];
    if (m.height > threshold) continue;
    parent[find(m.a)] = n + i;
    parent[find(m.b)] = n + i;
  }
  std::vector<std::size_t> labels(n);
  std::vector<std::size_t> root_label(parent.size(), std::numeric_limits<std::size_t>::max());
  std::size_t next = 0;
  for (std::size_t i = 0; i < n; ++i) {
    auto& l = root_label[find(i)];
    if (l == std::numeric_limits<std::size_t>::max()) l = next++;
    labels[i] = l;
  }
  return labels;
}

nlohmann::json dendrogram_json(const Dendrogram& tree, const std::vector<std::string>& labels) {
  require(labels.empty() || labels.size() == tree.n, "dendrogram_json: one label per leaf expected");
  if (tree.n == 0) return nullptr;
  auto node = [&](auto&& self, std::size_t id) -> nlohmann::json {
    if (id < tree.n) {
      nlohmann::json leaf = {{"leaf", id}};
      if (!labels.empty()) leaf["label"] = labels[id];
      return leaf;
    }
    const auto& m = tree.merges[id - tree.n];
    return {{"height", m.height}, {"size", m.size}, {"children", {self(self, m.a), self(self, m.b)}}};
  };
  return node(node, tree.merges.empty() ? 0 : tree.n + tree.merges.size() - 1);
}

AnnotatorClusters cluster_annotators(const Eigen::MatrixXd& R, double threshold) {
  require(R.rows() == R.cols(), "cluster_annotators: R must be square");
  for (Eigen::Index i = 0; i < R.rows(); ++i)
    for (Eigen::Index j = 0; j < i; ++j)
      require(R(i, j) == R(j, i), "cluster_annotators: R must be symmetric");
  Eigen::MatrixXd dist = 1.0 - R.array();
  dist.diagonal().setZero();
  AnnotatorClusters out;
  out.tree = complete_linkage(dist);
  out.labels = cut_tree(out.tree, threshold);
  return out;
}

}  // namespace simtuple
