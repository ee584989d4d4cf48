#include "simtuple/synth.hpp"

#include "simtuple/error.hpp"

#include <algorithm>
#include <cmath>
#include <numbers>
#include <random>

namespace simtuple {

std::size_t SynthProfile::steps() const {
  return static_cast<std::size_t>(std::llround(duration_s * hz));
}

namespace {

using Vec2 = Eigen::Vector2d;

struct Waypoint {
  double t;
  Vec2 p;
};

Vec2 along(const std::vector<Waypoint>& path, double t) {
  if (t <= path.front().t) return path.front().p;
  for (std::size_t i = 1; i < path.size(); ++i) {
    if (t <= path[i].t) {
      const double span = path[i].t - path[i - 1].t;
      const double u = span > 0.0 ? (t - path[i - 1].t) / span : 1.0;
      return path[i - 1].p + u * (path[i].p - path[i - 1].p);
    }
  }
  return path.back().p;
}

// 4-4-2 in a frame attacking +x, keeper first.
Vec2 anchor(std::size_t i) {
  static const Vec2 grid[] = {
      {-30, 0}, {-18, -20}, {-18, -7}, {-18, 7}, {-18, 20}, {-4, -22},
      {-4, -8}, {-4, 8},    {-4, 22},  {10, -7}, {10, 7},
  };
  constexpr std::size_t n = std::size(grid);
  return grid[i % n] + Vec2(0.0, 3.0 * static_cast<double>(i / n));
}

struct Mover {
  Vec2 start;
  Vec2 drift;
  Vec2 amp;
  Vec2 freq;
  Vec2 phase;

  Vec2 at(double t) const {
    return start + drift * t +
           Vec2(amp.x() * std::sin(freq.x() * t + phase.x()), amp.y() * std::sin(freq.y() * t + phase.y()));
  }
};

class SceneBuilder {
 public:
  SceneBuilder(const SynthProfile& profile, std::mt19937_64& rng) : p_(profile), rng_(rng) {}

  double uni(double lo, double hi) { return std::uniform_real_distribution<double>(lo, hi)(rng_); }
  double sign() { return uni(0.0, 1.0) < 0.5 ? -1.0 : 1.0; }

  Mover mover(Vec2 start, Vec2 drift, double wobble) {
    Mover m;
    m.start = start + Vec2(uni(-2.5, 2.5), uni(-2.5, 2.5));
    m.drift = drift + Vec2(uni(-0.4, 0.4), uni(-0.4, 0.4));
    m.amp = Vec2(uni(0.2, 1.0), uni(0.2, 1.0)) * wobble;
    m.freq = Vec2(uni(0.6, 2.0), uni(0.6, 2.0));
    m.phase = Vec2(uni(0.0, 6.3), uni(0.0, 6.3));
    return m;
  }

  Scene build(Archetype kind) {
    const std::size_t n = p_.team_size;
    std::vector<Mover> att(n), def(n);
    std::vector<Waypoint> ball;
    const double dur = p_.duration_s;
    const double s = sign();  // flank

    auto attackers = [&](double cx, Vec2 drift, double squeeze, double shift_y, double wobble) {
      for (std::size_t i = 0; i < n; ++i) {
        const Vec2 a = anchor(i);
        att[i] = mover({cx + a.x() * 0.8, a.y() * squeeze + shift_y}, drift, wobble);
      }
    };
    auto defenders = [&](double cx, Vec2 drift, double squeeze, double shift_y, double wobble) {
      for (std::size_t i = 0; i < n; ++i) {
        const Vec2 a = anchor(i);
        def[i] = mover({cx - a.x() * 0.7, -a.y() * squeeze + shift_y}, drift, wobble);
      }
    };

    switch (kind) {
      case Archetype::buildup: {
        const double cx = uni(-28.0, -10.0);
        const Vec2 drift(uni(0.3, 1.3), 0.0);
        attackers(cx, drift, 1.0, 0.0, 1.0);
        defenders(cx + uni(16.0, 24.0), Vec2(uni(-0.2, 0.5), 0.0), 0.8, 0.0, 1.0);
        // Short passes between deep players.
        const int passes = 3 + static_cast<int>(uni(0.0, 2.0));
        double t = 0.0;
        std::size_t holder = 1 + static_cast<std::size_t>(uni(0.0, 8.0)) % n;
        ball.push_back({t, att[holder].at(t)});
        for (int k = 0; k < passes; ++k) {
          t += dur / passes * uni(0.7, 1.0);
          holder = 1 + static_cast<std::size_t>(uni(0.0, 8.0)) % n;
          ball.push_back({std::min(t, dur), att[holder].at(std::min(t, dur))});
        }
        break;
      }
      case Archetype::wing_attack: {
        const double cx = uni(0.0, 16.0);
        attackers(cx, Vec2(uni(1.0, 2.5), s * uni(0.3, 1.0)), 0.9, s * 4.0, 1.0);
        defenders(cx + uni(14.0, 20.0), Vec2(uni(0.2, 1.2), s * 0.6), 0.7, s * 2.0, 0.8);
        ball.push_back({0.0, {cx + uni(0.0, 8.0), s * uni(5.0, 15.0)}});
        ball.push_back({dur * 0.5, {uni(25.0, 36.0), s * uni(24.0, 31.0)}});
        ball.push_back({dur * 0.8, {uni(40.0, 48.0), s * uni(20.0, 29.0)}});
        ball.push_back({dur, {uni(42.0, 48.0), uni(-6.0, 6.0)}});
        break;
      }
      case Archetype::counter: {
        const double cx = uni(-30.0, -12.0);
        attackers(cx, Vec2(uni(4.0, 6.0), 0.0), 0.8, 0.0, 0.6);
        defenders(cx + uni(22.0, 30.0), Vec2(uni(3.0, 5.0), 0.0), 0.9, 0.0, 0.6);
        const Vec2 start(cx + uni(5.0, 12.0), uni(-15.0, 15.0));
        const Vec2 mid = start + Vec2(uni(12.0, 20.0), uni(-10.0, 10.0));
        const Vec2 end = mid + Vec2(uni(12.0, 20.0), uni(-8.0, 8.0));
        ball.push_back({0.0, start});
        ball.push_back({dur * uni(0.35, 0.6), mid});
        ball.push_back({dur, end});
        break;
      }
      case Archetype::set_piece: {
        const bool corner = uni(0.0, 1.0) < 0.6;
        const Vec2 spot = corner ? Vec2(51.5, s * 33.0) : Vec2(uni(22.0, 34.0), s * uni(5.0, 22.0));
        for (std::size_t i = 0; i < n; ++i) {
          const Vec2 box(uni(36.0, 50.0), uni(-15.0, 15.0));
          att[i] = mover(i == 0 ? Vec2(-30.0, 0.0) : box, Vec2(uni(-0.3, 0.8), 0.0), 0.6);
          def[i] = mover(i == 0 ? Vec2(51.0, 0.0) : box + Vec2(uni(0.5, 2.5), uni(-1.5, 1.5)),
                         Vec2(uni(-0.5, 0.3), 0.0), 0.5);
        }
        const double kick = uni(1.0, 2.5);
        ball.push_back({0.0, spot});
        ball.push_back({kick, spot});
        ball.push_back({std::min(dur, kick + uni(1.2, 2.0)), {uni(40.0, 48.0), uni(-8.0, 8.0)}});
        ball.push_back({dur, {uni(35.0, 48.0), uni(-12.0, 12.0)}});
        break;
      }
    }

    const std::size_t T = p_.steps();
    const auto S = static_cast<Eigen::Index>(2 * n + 1);
    Scene scene;
    scene.hz = p_.hz;
    scene.meta.archetype = kind;
    scene.x.resize(S, static_cast<Eigen::Index>(T));
    scene.y.resize(S, static_cast<Eigen::Index>(T));
    for (std::size_t i = 0; i < n; ++i) scene.roles.push_back(Role::possession);
    for (std::size_t i = 0; i < n; ++i) scene.roles.push_back(Role::defending);
    scene.roles.push_back(Role::ball);

    for (std::size_t t = 0; t < T; ++t) {
      const double sec = static_cast<double>(t) / p_.hz;
      const auto c = static_cast<Eigen::Index>(t);
      for (std::size_t i = 0; i < n; ++i) {
        const Vec2 a = att[i].at(sec), d = def[i].at(sec);
        scene.x(static_cast<Eigen::Index>(i), c) = a.x();
        scene.y(static_cast<Eigen::Index>(i), c) = a.y();
        scene.x(static_cast<Eigen::Index>(n + i), c) = d.x();
        scene.y(static_cast<Eigen::Index>(n + i), c) = d.y();
      }
      const Vec2 b = along(ball, sec);
      scene.x(S - 1, c) = b.x();
      scene.y(S - 1, c) = b.y();
    }
    enforce_limits(scene);
    return scene;
  }

 private:
  void enforce_limits(Scene& scene) const {
    const double hl = p_.pitch.half_length() - 0.5, hw = p_.pitch.half_width() - 0.5;
    for (Eigen::Index r = 0; r < scene.x.rows(); ++r) {
      const bool is_ball = scene.roles[static_cast<std::size_t>(r)] == Role::ball;
      const double max_step = (is_ball ? p_.max_ball_speed : p_.max_player_speed) / p_.hz;
      scene.x(r, 0) = std::clamp(scene.x(r, 0), -hl, hl);
      scene.y(r, 0) = std::clamp(scene.y(r, 0), -hw, hw);
      for (Eigen::Index t = 1; t < scene.x.cols(); ++t) {
        Vec2 step(scene.x(r, t) - scene.x(r, t - 1), scene.y(r, t) - scene.y(r, t - 1));
        const double len = step.norm();
        if (len > max_step) step *= max_step / len;
        scene.x(r, t) = std::clamp(scene.x(r, t - 1) + step.x(), -hl, hl);
        scene.y(r, t) = std::clamp(scene.y(r, t - 1) + step.y(), -hw, hw);
      }
    }
  }

  const SynthProfile& p_;
  std::mt19937_64& rng_;
};

}  // namespace

std::vector<Scene> synth_generate(std::uint64_t seed, std::size_t n_scenes, const SynthProfile& profile) {
  require(n_scenes >= 1, "synth_generate: n_scenes must be at least 1");
  require(profile.team_size >= 1 && profile.hz > 0.0 && profile.steps() >= 1,
          "synth_generate: invalid profile");
  double mix_total = 0.0;
  for (double w : profile.archetype_mix) {
    require(w >= 0.0, "synth_generate: negative archetype weight");
    mix_total += w;
  }
  require(mix_total > 0.0, "synth_generate: archetype mix must not be all zero");

  std::mt19937_64 rng(seed);
  std::discrete_distribution<std::size_t> pick(profile.archetype_mix.begin(), profile.archetype_mix.end());
  SceneBuilder builder(profile, rng);
  std::vector<Scene> scenes;
  scenes.reserve(n_scenes);
  for (std::size_t i = 0; i < n_scenes; ++i) {
    const auto kind = static_cast<Archetype>(pick(rng));
    Scene scene = builder.build(kind);
    scene.id = "synth-" + std::to_string(seed) + "-" + std::to_string(i);
    scene.meta.source = "synth:" + std::to_string(seed);
    scenes.push_back(std::move(scene));
  }
  return scenes;
}

}  // namespace simtuple
