#include "simtuple/scene.hpp"

#include "simtuple/error.hpp"

#include <cmath>

namespace simtuple {

std::string_view to_string(Role role) noexcept {
  switch (role) {
    case Role::possession: return "possession";
    case Role::defending: return "defending";
    case Role::ball: return "ball";
  }
  return "?";
}

Role role_from_string(std::string_view name) {
  if (name == "possession") return Role::possession;
  if (name == "defending") return Role::defending;
  if (name == "ball") return Role::ball;
  fail(ErrorCode::parse, "unknown role '" + std::string(name) + "'");
}

std::string_view to_string(Archetype a) noexcept {
  switch (a) {
    case Archetype::buildup: return "buildup";
    case Archetype::wing_attack: return "wing_attack";
    case Archetype::counter: return "counter";
    case Archetype::set_piece: return "set_piece";
  }
  return "?";
}

Archetype archetype_from_string(std::string_view name) {
  if (name == "buildup") return Archetype::buildup;
  if (name == "wing_attack") return Archetype::wing_attack;
  if (name == "counter") return Archetype::counter;
  if (name == "set_piece") return Archetype::set_piece;
  fail(ErrorCode::parse, "unknown archetype '" + std::string(name) + "'");
}

std::vector<std::size_t> Scene::rows_with(Role role) const {
  std::vector<std::size_t> rows;
  for (std::size_t s = 0; s < roles.size(); ++s)
    if (roles[s] == role) rows.push_back(s);
  return rows;
}

void validate(const Scene& scene, const Pitch& pitch) {
  const auto n = static_cast<Eigen::Index>(scene.roles.size());
  require(n > 0, "scene '" + scene.id + "' has no agents");
  require(scene.x.rows() == n && scene.y.rows() == n,
          "scene '" + scene.id + "': role count does not match trajectory rows");
  require(scene.x.cols() == scene.y.cols() && scene.x.cols() > 0,
          "scene '" + scene.id + "': trajectories must share a non-zero length");
  require(scene.hz > 0.0, "scene '" + scene.id + "': sampling rate must be positive");
  require(scene.x.allFinite() && scene.y.allFinite(),
          "scene '" + scene.id + "': non-finite position");
  // Tracking systems report positions slightly outside the lines.
  const double pad = 5.0;
  require(scene.x.cwiseAbs().maxCoeff() <= pitch.half_length() + pad &&
              scene.y.cwiseAbs().maxCoeff() <= pitch.half_width() + pad,
          "scene '" + scene.id + "': position outside pitch bounds");
  std::size_t balls = 0;
  for (Role r : scene.roles) balls += (r == Role::ball);
  require(balls == 1, "scene '" + scene.id + "' must contain exactly one ball");
}

Scene permute_rows(const Scene& scene, const std::vector<std::size_t>& perm) {
  require(perm.size() == scene.agents(), "permutation size does not match agent count");
  Scene out;
  out.id = scene.id;
  out.hz = scene.hz;
  out.meta = scene.meta;
  out.roles.resize(perm.size());
  out.x.resize(scene.x.rows(), scene.x.cols());
  out.y.resize(scene.y.rows(), scene.y.cols());
  for (std::size_t i = 0; i < perm.size(); ++i) {
    const auto src = static_cast<Eigen::Index>(perm[i]);
    out.roles[i] = scene.roles[perm[i]];
    out.x.row(static_cast<Eigen::Index>(i)) = scene.x.row(src);
    out.y.row(static_cast<Eigen::Index>(i)) = scene.y.row(src);
  }
  return out;
}

}  // namespace simtuple
