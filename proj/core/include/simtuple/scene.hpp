#pragma once

#include <Eigen/Core>

#include <cstddef>
#include <optional>
#include <string>
#include <string_view>
#include <vector>

namespace simtuple {

enum class Role : std::uint8_t { possession, defending, ball };

std::string_view to_string(Role role) noexcept;
Role role_from_string(std::string_view name);

/// Play archetypes used by the synthetic generator. Real tracking data has no
/// archetype; the tag is hidden ground truth for simulated annotators.
enum class Archetype : std::uint8_t { buildup, wing_attack, counter, set_piece };
inline constexpr std::size_t kArchetypeCount = 4;

std::string_view to_string(Archetype a) noexcept;
Archetype archetype_from_string(std::string_view name);

/// Pitch extent in meters, origin at the center spot.
struct Pitch {
  double length = 105.0;
  double width = 68.0;

  double half_length() const { return 0.5 * length; }
  double half_width() const { return 0.5 * width; }
};

struct SceneMeta {
  std::string source;
  double offset_s = 0.0;
  std::optional<Archetype> archetype;
};

using RowMatrix = Eigen::Matrix<double, Eigen::Dynamic, Eigen::Dynamic, Eigen::RowMajor>;

/// One fixed-length multi-agent trajectory snippet. Row s of `x` and `y` is
/// agent s over T timesteps; `roles[s]` tags the agent.
struct Scene {
  std::string id;
  std::vector<Role> roles;
  RowMatrix x;
  RowMatrix y;
  double hz = 25.0;
  SceneMeta meta;

  std::size_t agents() const { return roles.size(); }
  Eigen::Index steps() const { return x.cols(); }
  double duration_s() const { return static_cast<double>(steps()) / hz; }

  /// Row indices of all agents with the given role, in input order.
  std::vector<std::size_t> rows_with(Role role) const;
};

/// Checks the scene invariants: equal trajectory lengths, finite positions
/// inside the (slightly padded) pitch, exactly one ball.
void validate(const Scene& scene, const Pitch& pitch = {});

/// Returns a copy of `scene` with rows reordered so that output row i is input
/// row perm[i].
Scene permute_rows(const Scene& scene, const std::vector<std::size_t>& perm);

}  // namespace simtuple
