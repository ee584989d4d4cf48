#pragma once

#include "simtuple/hungarian.hpp"
#include "simtuple/scene.hpp"

#include <array>
#include <cstddef>
#include <span>
#include <vector>

namespace simtuple {

struct DistanceOptions {
  /// Whether the ball trajectory participates as its own matched row.
  bool include_ball = true;
};

/// Time-averaged Euclidean distance between row `ra` of `a` and row `rb` of `b`.
double row_distance(const Scene& a, std::size_t ra, const Scene& b, std::size_t rb);

/// Per-role contributions to the assignment-matched scene distance (meters).
struct DistanceBreakdown {
  double possession = 0.0;
  double defending = 0.0;
  double ball = 0.0;
  Assignment possession_assignment;
  Assignment defending_assignment;

  double total() const { return possession + defending + ball; }
};

/// Sum of time-averaged row distances after per-role optimal assignment
/// (possession to possession, defending to defending, ball to ball).
/// Throws invalid_input when the scenes differ in length, rate or roster.
DistanceBreakdown scene_distance_breakdown(const Scene& a, const Scene& b,
                                           const DistanceOptions& opts = {});

double scene_distance(const Scene& a, const Scene& b, const DistanceOptions& opts = {});

/// Dense table of per-role distances for every unordered pair of a dataset.
/// Built once; lookups are O(1).
class DistanceTable {
 public:
  DistanceTable() = default;
  DistanceTable(std::span<const Scene> scenes, const DistanceOptions& opts = {});

  std::size_t size() const { return n_; }
  /// Per-role components (possession, defending, ball) for the pair (i, j).
  std::array<double, 3> components(std::size_t i, std::size_t j) const;
  double distance(std::size_t i, std::size_t j) const;
  double mean_distance() const { return mean_; }

 private:
  std::size_t index(std::size_t i, std::size_t j) const;

  std::size_t n_ = 0;
  std::vector<std::array<double, 3>> pairs_;
  double mean_ = 0.0;
};

}  // namespace simtuple
