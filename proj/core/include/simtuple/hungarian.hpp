#pragma once

#include <Eigen/Core>

#include <cstddef>
#include <vector>

namespace simtuple {

/// A bijection between the rows of two equally sized sets. `perm[i]` is the
/// column (row of the second set) assigned to row i.
struct Assignment {
  std::vector<std::size_t> perm;
  double cost = 0.0;
};

/// Minimum-cost perfect assignment on a square cost matrix (Kuhn-Munkres with
/// row potentials, O(n^3)). Throws invalid_input on non-square or non-finite
/// input.
Assignment hungarian_assign(const Eigen::Ref<const Eigen::MatrixXd>& cost);

}  // namespace simtuple
