#pragma once

#include "simtuple/cohort.hpp"
#include "simtuple/network.hpp"
#include "simtuple/report.hpp"
#include "simtuple/scene_distance.hpp"
#include "simtuple/session.hpp"
#include "simtuple/synth.hpp"
#include "simtuple/train.hpp"

#include <memory>
#include <vector>

namespace simtuple {

/// Study settings scaled to the simulation dataset: the InfoTuple candidate
/// pool keeps the same tenth of the dataset, and posterior fits stop at a
/// looser tolerance.
StudyConfig simulation_study_defaults(std::size_t n_scenes = 300);

/// Desk-scale defaults: a few hundred synthetic scenes and a small network so
/// an 18-oracle study runs in minutes on one core.
struct SimulationConfig {
  std::size_t n_scenes = 300;
  SynthProfile synth;
  Architecture arch{46, 8, 3, 2, 16, 25};
  PretrainConfig pretrain;
  /// Pretraining targets are scaled so the mean scene distance maps to this
  /// many embedding units.
  double pretrain_scale = 4.0;
  StudyConfig study = simulation_study_defaults();
  CohortSpec cohort;
  std::size_t random_calibration_queries = 500;
  std::uint64_t seed = 0;
};

/// Scenes, ground-truth distances, pretrained base model and study context
/// shared by every simulated annotator.
struct SimulationWorld {
  std::vector<Scene> scenes;
  std::shared_ptr<const DistanceTable> table;
  std::shared_ptr<const StudyContext> context;
  CohortContext cohort_context;
};

/// Generates scenes from cfg.seed, pretrains the base model on the exact
/// scene distance and builds the study context.
SimulationWorld build_world(const SimulationConfig& cfg);

/// Same with a given dataset and base model (no synthesis, no pretraining).
SimulationWorld make_world(std::vector<Scene> scenes, EmbeddingModel base, const SimulationConfig& cfg);

struct SimulationResult {
  std::vector<OracleProfile> cohort;
  std::vector<std::vector<Event>> logs;
  nlohmann::json report;
};

/// Drives one session per oracle through the whole protocol. Errors carry the
/// oracle, phase and step.
std::vector<Event> run_oracle_session(const SimulationWorld& world, Oracle& oracle, std::uint64_t seed);

SimulationResult run_simulated_study(const SimulationWorld& world, const std::vector<OracleProfile>& cohort,
                                     std::uint64_t seed, const ReportOptions& report = {});

/// build_world, make_cohort and run_simulated_study in one call.
SimulationResult simulate(const SimulationConfig& cfg);

}  // namespace simtuple
