#pragma once

#include "simtuple/scene.hpp"

#include <Eigen/Core>

#include <cstddef>
#include <string>
#include <unordered_map>
#include <vector>

namespace simtuple {

struct InputSpec {
  /// Non-overlapping temporal average pooling window applied before the
  /// network; 1 keeps every frame.
  std::size_t pool = 1;
  Pitch pitch;
};

/// Template-ordered, pitch-normalized channel stack of a scene: rows 2s and
/// 2s+1 hold x and y of slot s scaled to [-1, 1]; columns are (pooled) steps.
Eigen::MatrixXd network_input(const Scene& scene, const InputSpec& spec = {});

/// Number of columns network_input produces for a scene of T steps.
std::size_t pooled_steps(std::size_t steps, std::size_t pool);

/// Scenes plus their cached network inputs, addressed by position or id.
struct Dataset {
  std::vector<Scene> scenes;
  std::vector<Eigen::MatrixXd> inputs;
  std::unordered_map<std::string, std::size_t> by_id;

  std::size_t size() const { return scenes.size(); }
  /// Throws not_found for unknown ids.
  std::size_t index_of(const std::string& id) const;
};

/// Throws invalid_input on duplicate ids or scenes of differing shape.
Dataset make_dataset(std::vector<Scene> scenes, const InputSpec& spec);

}  // namespace simtuple
