#pragma once

#include <Eigen/Core>
#include <nlohmann/json.hpp>

#include <string>
#include <vector>

namespace simtuple {

/// Clusters `a` and `b` joined at `height`. Ids below n are leaves; merge i
/// creates cluster n + i.
struct Merge {
  std::size_t a = 0;
  std::size_t b = 0;
  double height = 0.0;
  std::size_t size = 0;
};

struct Dendrogram {
  std::size_t n = 0;
  std::vector<Merge> merges;
};

/// Agglomerative clustering with complete (maximum) linkage. Among equal
/// distances the pair with the smallest cluster ids merges first.
Dendrogram complete_linkage(const Eigen::MatrixXd& distance);

/// Flat cluster label per leaf after applying every merge with height <=
/// threshold. Labels are numbered in order of first leaf.
std::vector<std::size_t> cut_tree(const Dendrogram& tree, double threshold);

/// Nested {height, size, children} objects with {leaf, label} at the bottom.
nlohmann::json dendrogram_json(const Dendrogram& tree, const std::vector<std::string>& labels);

struct AnnotatorClusters {
  Dendrogram tree;
  std::vector<std::size_t> labels;
};

/// Complete-linkage clustering on 1 - R. Throws invalid_input on a
/// non-square or non-symmetric matrix.
AnnotatorClusters cluster_annotators(const Eigen::MatrixXd& R, double threshold = 0.37);

}  // namespace simtuple
