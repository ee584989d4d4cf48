#include "simtuple/hungarian.hpp"

#include "simtuple/error.hpp"

#include <limits>

namespace simtuple {

Assignment hungarian_assign(const Eigen::Ref<const Eigen::MatrixXd>& cost) {
  require(cost.rows() == cost.cols(), "hungarian_assign: cost matrix must be square");
  require(cost.rows() >= 1, "hungarian_assign: cost matrix must be non-empty");
  require(cost.allFinite(), "hungarian_assign: cost matrix must be finite");

  const auto n = static_cast<std::size_t>(cost.rows());
  constexpr double inf = std::numeric_limits<double>::infinity();

  // Shortest augmenting path formulation with potentials; index 0 is a
  // sentinel column so the arrays are 1-based.
  std::vector<double> u(n + 1, 0.0), v(n + 1, 0.0), minv(n + 1);
  std::vector<std::size_t> p(n + 1, 0), way(n + 1, 0);
  std::vector<char> used(n + 1);

  for (std::size_t i = 1; i <= n; ++i) {
    p[0] = i;
    std::size_t j0 = 0;
    std::fill(minv.begin(), minv.end(), inf);
    std::fill(used.begin(), used.end(), 0);
    do {
      used[j0] = 1;
      const std::size_t i0 = p[j0];
      double delta = inf;
      std::size_t j1 = 0;
      for (std::size_t j = 1; j <= n; ++j) {
        if (used[j]) continue;
        const double cur = cost(static_cast<Eigen::Index>(i0 - 1), static_cast<Eigen::Index>(j - 1)) -
                           u[i0] - v[j];
        if (cur < minv[j]) {
          minv[j] = cur;
          way[j] = j0;
        }
        if (minv[j] < delta) {
          delta = minv[j];
          j1 = j;
        }
      }
      for (std::size_t j = 0; j <= n; ++j) {
        if (used[j]) {
          u[p[j]] += delta;
          v[j] -= delta;
        } else {
          minv[j] -= delta;
        }
      }
      j0 = j1;
    } while (p[j0] != 0);
    do {
      const std::size_t j1 = way[j0];
      p[j0] = p[j1];
      j0 = j1;
    } while (j0 != 0);
  }

  Assignment out;
  out.perm.assign(n, 0);
  for (std::size_t j = 1; j <= n; ++j) out.perm[p[j] - 1] = j - 1;
  for (std::size_t i = 0; i < n; ++i)
    out.cost += cost(static_cast<Eigen::Index>(i), static_cast<Eigen::Index>(out.perm[i]));
  return out;
}

}  // namespace simtuple
