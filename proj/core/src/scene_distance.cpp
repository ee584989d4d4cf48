#include "simtuple/scene_distance.hpp"

#include "simtuple/error.hpp"

#include <cmath>

namespace simtuple {

double row_distance(const Scene& a, std::size_t ra, const Scene& b, std::size_t rb) {
  const auto T = a.steps();
  const double* ax = a.x.row(static_cast<Eigen::Index>(ra)).data();
  const double* ay = a.y.row(static_cast<Eigen::Index>(ra)).data();
  const double* bx = b.x.row(static_cast<Eigen::Index>(rb)).data();
  const double* by = b.y.row(static_cast<Eigen::Index>(rb)).data();
  double sum = 0.0;
  for (Eigen::Index t = 0; t < T; ++t) {
    const double dx = ax[t] - bx[t];
    const double dy = ay[t] - by[t];
    sum += std::sqrt(dx * dx + dy * dy);
  }
  return sum / static_cast<double>(T);
}

namespace {

Assignment match_group(const Scene& a, const std::vector<std::size_t>& rows_a, const Scene& b,
                       const std::vector<std::size_t>& rows_b) {
  const auto n = static_cast<Eigen::Index>(rows_a.size());
  if (n == 0) return {};
  Eigen::MatrixXd cost(n, n);
  for (Eigen::Index i = 0; i < n; ++i)
    for (Eigen::Index j = 0; j < n; ++j)
      cost(i, j) = row_distance(a, rows_a[static_cast<std::size_t>(i)], b,
                                rows_b[static_cast<std::size_t>(j)]);
  return hungarian_assign(cost);
}

}  // namespace

DistanceBreakdown scene_distance_breakdown(const Scene& a, const Scene& b,
                                           const DistanceOptions& opts) {
  require(a.steps() == b.steps(), "scene_distance: scenes differ in length");
  require(a.hz == b.hz, "scene_distance: scenes differ in sampling rate");
  require(a.x.rows() == static_cast<Eigen::Index>(a.agents()) &&
              b.x.rows() == static_cast<Eigen::Index>(b.agents()),
          "scene_distance: malformed scene");

  DistanceBreakdown out;
  const auto pa = a.rows_with(Role::possession), pb = b.rows_with(Role::possession);
  const auto da = a.rows_with(Role::defending), db = b.rows_with(Role::defending);
  const auto ba = a.rows_with(Role::ball), bb = b.rows_with(Role::ball);
  require(pa.size() == pb.size() && da.size() == db.size() && ba.size() == bb.size(),
          "scene_distance: scenes differ in roster");

  out.possession_assignment = match_group(a, pa, b, pb);
  out.defending_assignment = match_group(a, da, b, db);
  out.possession = out.possession_assignment.cost;
  out.defending = out.defending_assignment.cost;
  if (opts.include_ball)
    for (std::size_t i = 0; i < ba.size(); ++i) out.ball += row_distance(a, ba[i], b, bb[i]);
  return out;
}

double scene_distance(const Scene& a, const Scene& b, const DistanceOptions& opts) {
  return scene_distance_breakdown(a, b, opts).total();
}

DistanceTable::DistanceTable(std::span<const Scene> scenes, const DistanceOptions& opts)
    : n_(scenes.size()) {
  pairs_.resize(n_ * (n_ - (n_ > 0 ? 1 : 0)) / 2);
  double sum = 0.0;
  for (std::size_t i = 0; i < n_; ++i) {
    for (std::size_t j = i + 1; j < n_; ++j) {
      const auto d = scene_distance_breakdown(scenes[i], scenes[j], opts);
      pairs_[index(i, j)] = {d.possession, d.defending, d.ball};
      sum += d.total();
    }
  }
  if (!pairs_.empty()) mean_ = sum / static_cast<double>(pairs_.size());
}

std::size_t DistanceTable::index(std::size_t i, std::size_t j) const {
  if (i > j) std::swap(i, j);
  // Row-major upper triangle without the diagonal.
  return i * n_ - i * (i + 1) / 2 + (j - i - 1);
}

std::array<double, 3> DistanceTable::components(std::size_t i, std::size_t j) const {
  require(i < n_ && j < n_, "DistanceTable: index out of range");
  if (i == j) return {0.0, 0.0, 0.0};
  return pairs_[index(i, j)];
}

double DistanceTable::distance(std::size_t i, std::size_t j) const {
  const auto c = components(i, j);
  return c[0] + c[1] + c[2];
}

}  // namespace simtuple
