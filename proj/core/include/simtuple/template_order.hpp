#pragma once

#include "simtuple/scene.hpp"

#include <Eigen/Core>

#include <cstddef>
#include <vector>

namespace simtuple {

/// Circular template fitted to one team.
struct TemplateFit {
  Eigen::Vector2d center = Eigen::Vector2d::Zero();
  /// Per-dimension radius of the template ellipse (sqrt(2) * std of the team's
  /// mean positions, so the slot variance matches the agents' variance).
  Eigen::Vector2d scale = Eigen::Vector2d::Zero();
  /// order[slot] = input row placed in that slot.
  std::vector<std::size_t> order;
  bool degenerate = false;
};

/// Canonical row order of a scene: possession slots, defending slots, ball.
struct TemplateOrdering {
  std::vector<std::size_t> order;
  TemplateFit possession;
  TemplateFit defending;
};

/// Slot positions of an n-slot template on the unit circle, slot 0 at angle 0,
/// counter-clockwise.
std::vector<Eigen::Vector2d> template_slots(std::size_t n);

/// Fits a circular template to the given rows (by mean position) and matches
/// rows to slots with the Hungarian algorithm. Zero spread falls back to the
/// input order.
TemplateFit fit_template(const Scene& scene, const std::vector<std::size_t>& rows);

TemplateOrdering template_order(const Scene& scene);

}  // namespace simtuple
