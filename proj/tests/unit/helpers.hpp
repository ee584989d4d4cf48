#pragma once

#include "simtuple/network.hpp"
#include "simtuple/scene.hpp"
#include "simtuple/session.hpp"
#include "simtuple/synth.hpp"
#include "simtuple/tracking.hpp"

#include <algorithm>
#include <filesystem>
#include <memory>
#include <random>
#include <string>
#include <vector>

namespace simtuple::test {

/// Scene with the given roles and uniformly random positions inside the pitch.
inline Scene random_scene(std::mt19937_64& rng, const std::vector<Role>& roles, Eigen::Index steps,
                          const std::string& id = "s") {
  std::uniform_real_distribution<double> ux(-50.0, 50.0), uy(-32.0, 32.0);
  Scene s;
  s.id = id;
  s.roles = roles;
  const auto S = static_cast<Eigen::Index>(roles.size());
  s.x.resize(S, steps);
  s.y.resize(S, steps);
  for (Eigen::Index r = 0; r < S; ++r)
    for (Eigen::Index t = 0; t < steps; ++t) {
      s.x(r, t) = ux(rng);
      s.y(r, t) = uy(rng);
    }
  return s;
}

inline std::vector<Role> roster(std::size_t team_size) {
  std::vector<Role> roles(team_size, Role::possession);
  roles.insert(roles.end(), team_size, Role::defending);
  roles.push_back(Role::ball);
  return roles;
}

/// Small synthetic profile: 3 players a side, 2 s at 10 Hz.
inline SynthProfile tiny_profile() {
  SynthProfile p;
  p.team_size = 3;
  p.hz = 10.0;
  p.duration_s = 2.0;
  return p;
}

/// Architecture matching tiny_profile scenes.
inline Architecture tiny_arch() { return Architecture{14, 8, 3, 2, 8, 2}; }

/// Study context over `n` tiny synthetic scenes with a random base model and
/// quotas small enough to run a whole session in well under a second.
inline std::shared_ptr<const StudyContext> tiny_context(std::size_t n = 40, std::uint64_t seed = 3,
                                                        StudyConfig cfg = {}) {
  const Architecture arch = tiny_arch();
  Dataset ds = make_dataset(synth_generate(seed, n, tiny_profile()), arch.input_spec());
  cfg.k = std::min<std::size_t>(cfg.k, 5);
  cfg.quotas = {2, 3, 6, 3, 2, 3};
  cfg.finetune.epochs = 2;
  cfg.infotuple.n_candidates = 10;
  cfg.infotuple.n_permutations = 3;
  cfg.posterior.B = 2;
  cfg.posterior.tste.max_iter = 30;
  cfg.seed = seed;
  return make_study_context(std::move(ds), make_model(arch, seed), cfg);
}

/// Seeded stand-in for an annotator: skips with probability `skip_rate`,
/// otherwise picks a uniform body element. Depends only on its own draws, so
/// two copies fed the same queries answer identically.
struct ScriptedAnnotator {
  std::mt19937_64 rng;
  double skip_rate = 0.0;

  ScriptedAnnotator(std::uint64_t seed, double skip) : rng(seed), skip_rate(skip) {}

  TupleResponse answer(const TupleQuery& q) {
    std::uniform_real_distribution<double> unit(0.0, 1.0);
    const double u = unit(rng), v = unit(rng);
    TupleResponse r;
    r.query_id = q.id;
    r.response_ms = 2000.0 + 1000.0 * v;
    if (u >= skip_rate) r.choice = std::min(q.body.size() - 1, static_cast<std::size_t>(v * static_cast<double>(q.body.size())));
    return r;
  }
};

/// Runs a whole session with a scripted annotator and returns its log.
inline std::vector<Event> run_scripted(const std::shared_ptr<const StudyContext>& ctx, const std::string& id,
                                       std::uint64_t seed, ScriptedAnnotator annotator) {
  Session s(ctx, id, seed);
  for (;;) {
    const NextQuery next = s.next_query();
    if (std::holds_alternative<StudyComplete>(next)) break;
    if (const auto* q = std::get_if<TupleQuery>(&next)) s.record_response(annotator.answer(*q));
  }
  return s.events();
}

/// Fresh directory under the system temp dir, removed on destruction.
class TempDir {
 public:
  explicit TempDir(const std::string& tag) {
    std::random_device rd;
    path_ = std::filesystem::temp_directory_path() / ("simtuple-" + tag + "-" + std::to_string(rd()));
    std::filesystem::create_directories(path_);
  }
  ~TempDir() {
    std::error_code ec;
    std::filesystem::remove_all(path_, ec);
  }
  TempDir(const TempDir&) = delete;
  TempDir& operator=(const TempDir&) = delete;
  const std::filesystem::path& path() const { return path_; }

 private:
  std::filesystem::path path_;
};

}  // namespace simtuple::test
