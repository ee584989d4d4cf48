#include "simtuple/simulate.hpp"

#include "simtuple/compose.hpp"
#include "simtuple/error.hpp"

#include <spdlog/spdlog.h>

#include <algorithm>
#include <chrono>

namespace simtuple {

StudyConfig simulation_study_defaults(std::size_t n_scenes) {
  StudyConfig s;
  s.infotuple.n_candidates = std::max<std::size_t>(s.k, n_scenes / 10);
  s.posterior.tste.tol = 1e-5;
  s.posterior.tste.max_iter = 200;
  return s;
}

SimulationWorld make_world(std::vector<Scene> scenes, EmbeddingModel base, const SimulationConfig& cfg) {
  SimulationWorld world;
  world.table = std::make_shared<const DistanceTable>(scenes);
  Dataset ds = make_dataset(scenes, base.arch.input_spec());
  world.scenes = std::move(scenes);
  StudyConfig study = cfg.study;
  study.seed = cfg.seed;
  world.context = make_study_context(std::move(ds), std::move(base), study);

  auto& cc = world.cohort_context;
  cc.table = world.table.get();
  for (const auto& s : world.scenes) cc.archetypes.push_back(s.meta.archetype);
  cc.consistency_queries = world.context->repeat_pool;
  std::mt19937_64 rng(cfg.seed ^ 0x736b697000000000ULL);
  for (std::size_t i = 0; i < cfg.random_calibration_queries; ++i)
    cc.random_queries.push_back(compose_random(world.scenes.size(), std::nullopt, study.k, rng));
  return world;
}

SimulationWorld build_world(const SimulationConfig& cfg) {
  auto scenes = synth_generate(cfg.seed, cfg.n_scenes, cfg.synth);
  const DistanceTable table(scenes);
  EmbeddingModel base = make_model(cfg.arch, cfg.seed);
  const Dataset ds = make_dataset(scenes, cfg.arch.input_spec());
  PretrainConfig pc = cfg.pretrain;
  pc.seed = cfg.seed;
  if (cfg.pretrain_scale > 0.0 && table.mean_distance() > 0.0) pc.distance_unit = table.mean_distance() / cfg.pretrain_scale;
  pretrain(base, ds.inputs, [&](std::size_t i, std::size_t j) { return table.distance(i, j); }, pc);
  return make_world(std::move(scenes), std::move(base), cfg);
}

std::vector<Event> run_oracle_session(const SimulationWorld& world, Oracle& oracle, std::uint64_t seed) {
  // Logical clock: timestamps advance by the simulated response times.
  auto now = std::make_shared<std::int64_t>(0);
  Session session(world.context, oracle.profile().id, seed, {}, [now] { return *now; });
  std::size_t step = 0;
  try {
    for (;; ++step) {
      const NextQuery next = session.next_query();
      if (std::holds_alternative<StudyComplete>(next)) break;
      if (std::holds_alternative<PhaseComplete>(next)) continue;
      TupleResponse r = oracle.respond(std::get<TupleQuery>(next));
      *now += static_cast<std::int64_t>(r.response_ms);
      session.record_response(r);
    }
  } catch (const Error& e) {
    throw Error(e.code(), "oracle " + oracle.profile().id + ", phase " + std::string(to_string(session.phase())) +
                              ", step " + std::to_string(step) + ": " + e.what());
  }
  return session.events();
}

SimulationResult run_simulated_study(const SimulationWorld& world, const std::vector<OracleProfile>& cohort,
                                     std::uint64_t seed, const ReportOptions& report) {
  SimulationResult out;
  out.cohort = cohort;
  auto oracles = make_oracles(cohort, world.cohort_context);
  for (std::size_t i = 0; i < oracles.size(); ++i) {
    const auto t0 = std::chrono::steady_clock::now();
    out.logs.push_back(run_oracle_session(world, oracles[i], seed * 1000003ULL + i));
    spdlog::info("simulate: oracle {} done in {:.1f} s", cohort[i].id,
                 std::chrono::duration<double>(std::chrono::steady_clock::now() - t0).count());
  }
  out.report = build_report(out.logs, report);
  return out;
}

SimulationResult simulate(const SimulationConfig& cfg) {
  const SimulationWorld world = build_world(cfg);
  CohortSpec spec = cfg.cohort;
  spec.seed = cfg.seed;
  return run_simulated_study(world, make_cohort(spec, world.cohort_context), cfg.seed);
}

}  // namespace simtuple
