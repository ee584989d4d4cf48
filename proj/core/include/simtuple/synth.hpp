#pragma once

#include "simtuple/scene.hpp"

#include <array>
#include <cstdint>
#include <vector>

namespace simtuple {

/// Parameters of the synthetic scene generator.
struct SynthProfile {
  std::size_t team_size = 11;
  double hz = 25.0;
  double duration_s = 5.0;
  double max_player_speed = 9.0;
  double max_ball_speed = 30.0;
  /// Frequencies of buildup, wing attack, counter and set piece. Long-tailed
  /// on purpose: common midfield play, rare set pieces.
  std::array<double, kArchetypeCount> archetype_mix = {0.55, 0.25, 0.13, 0.07};
  Pitch pitch;

  std::size_t steps() const;
};

/// Deterministic for a fixed seed. Every scene satisfies the Scene invariants,
/// attacks toward +x and carries its archetype in `meta.archetype`.
std::vector<Scene> synth_generate(std::uint64_t seed, std::size_t n_scenes,
                                  const SynthProfile& profile = {});

}  // namespace simtuple
