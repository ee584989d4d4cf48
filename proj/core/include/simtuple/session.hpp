#pragma once

#include "simtuple/embedding_store.hpp"
#include "simtuple/events.hpp"
#include "simtuple/infotuple.hpp"
#include "simtuple/network.hpp"
#include "simtuple/posterior.hpp"
#include "simtuple/query.hpp"
#include "simtuple/train.hpp"

#include <functional>
#include <memory>
#include <optional>
#include <random>
#include <string>
#include <variant>
#include <vector>

namespace simtuple {

enum class Phase : std::uint8_t { warmup, repeat1, rq2_rnd, rq2_mixed, rq2_nn, rq3_active_nn, rq3_infotuple, repeat2 };
inline constexpr std::size_t kPhaseCount = 8;

std::string_view to_string(Phase p) noexcept;
Phase phase_from_string(std::string_view name);

/// Required non-skip answers per phase. repeat1 grows by one query per skip
/// up to `repeat_pool` queries; repeat2 replays everything repeat1 showed.
struct PhaseQuotas {
  std::size_t warmup = 5;
  std::size_t repeat = 20;
  std::size_t repeat_pool = 40;
  std::size_t rq2_train = 20;
  std::size_t rq2_test = 10;
  std::size_t rq3 = 20;
};

struct StudyConfig {
  std::size_t k = 9;
  PhaseQuotas quotas;
  FinetuneConfig finetune;
  InfoTupleConfig infotuple;
  BootstrapConfig posterior;
  /// Start tSTE from the current network embedding (projected to d_ord)
  /// instead of random coordinates.
  bool posterior_from_embedding = true;
  double posterior_jitter = 0.05;
  /// RQ2 strategies whose fixed training tuples are replayed as offline
  /// acquisition curves once the test set exists.
  std::vector<Strategy> offline_curves = {Strategy::random, Strategy::random_nn, Strategy::nn};
  /// Fine-tune once on every annotated training tuple at the end of the
  /// study and report its accuracy.
  bool ceiling_run = true;
  std::uint64_t seed = 0;
};

nlohmann::json to_json(const StudyConfig& cfg);

/// Data shared by every session of one study. Immutable.
struct StudyContext {
  Dataset dataset;
  EmbeddingModel base;
  EmbeddingStore base_store;
  /// Fixed repeated queries, identical for all annotators.
  std::vector<TupleQuery> repeat_pool;
  StudyConfig config;
};

/// Embeds the dataset with the base model and composes the shared repeat
/// pool (mixed composition, seeded by config.seed).
std::shared_ptr<const StudyContext> make_study_context(Dataset dataset, EmbeddingModel base, StudyConfig config);

struct PhaseComplete {
  Phase finished;
  std::optional<Phase> next;
};
struct StudyComplete {};
using NextQuery = std::variant<TupleQuery, PhaseComplete, StudyComplete>;

/// One annotator's run through the protocol. Every state change is appended
/// to the event log (and passed to the sink) before the call returns.
class Session {
 public:
  using Sink = std::function<void(const Event&)>;
  using Clock = std::function<std::int64_t()>;

  Session(std::shared_ptr<const StudyContext> ctx, std::string annotator_id, std::uint64_t seed, Sink sink = {},
          Clock clock = {});

  /// Rebuilds a session from its log by re-executing it. Throws conflict when
  /// the log diverges from the deterministic re-execution.
  static std::unique_ptr<Session> replay(std::shared_ptr<const StudyContext> ctx, const std::vector<Event>& log,
                                         Sink sink = {}, Clock clock = {});

  /// The pending query, the next one, or a phase/study transition.
  NextQuery next_query();
  /// Throws out_of_order for an unknown query and conflict for one that was
  /// already answered.
  void record_response(const TupleResponse& response);
  void record_survey(const nlohmann::json& answers);
  /// Extra repeat1-style triplets added to the warm start (must be called
  /// before repeat1 completes).
  void add_warm_start_triplets(const TripletSet& triplets);

  const std::string& annotator_id() const { return annotator_id_; }
  const std::vector<Event>& events() const { return events_; }
  Phase phase() const { return phase_; }
  bool complete() const { return complete_; }
  const std::optional<TupleQuery>& pending() const { return pending_; }
  const StudyContext& context() const { return *ctx_; }
  /// Current model of the running RQ3 phase, or the warm start.
  const EmbeddingModel& model() const;

 private:
  struct Answered {
    TupleQuery query;
    TupleResponse response;
    Phase phase;
    bool test = false;
  };

  void emit(std::string type, nlohmann::json data);
  bool phase_done() const;
  void start_phase();
  void finish_phase();
  TupleQuery make_query();
  void after_response(const Answered& a);
  void build_warm_start();
  void run_offline_curve(Phase phase);
  void evaluate(const std::string& strategy, std::size_t step, const EmbeddingModel& model, double compute_ms);
  void refresh_posterior();
  void run_ceiling();
  nlohmann::json query_json(const TupleQuery& q, bool test, const std::string& repeat_of) const;

  std::shared_ptr<const StudyContext> ctx_;
  std::string annotator_id_;
  std::uint64_t seed_;
  Sink sink_;
  Clock clock_;
  std::mt19937_64 rng_;
  std::vector<Event> events_;
  bool replaying_ = false;

  Phase phase_ = Phase::warmup;
  bool phase_started_ = false;
  bool complete_ = false;
  std::optional<TupleQuery> pending_;
  bool pending_test_ = false;
  std::string pending_repeat_of_;
  std::vector<std::string> answered_ids_;
  std::size_t phase_queries_ = 0;
  std::size_t phase_nonskip_ = 0;
  std::size_t phase_test_nonskip_ = 0;

  std::vector<Answered> answered_;
  std::size_t repeat_cursor_ = 0;
  std::vector<std::size_t> repeat1_shown_;  // indices into the repeat pool
  TripletSet warm_triplets_;
  TripletSet extra_warm_;
  TripletSet test_triplets_;
  std::optional<EmbeddingModel> warm_;
  std::optional<EmbeddingStore> warm_store_;
  std::optional<EmbeddingModel> model_;
  std::optional<EmbeddingStore> store_;
  std::optional<OrdinalPosterior> posterior_;
  TripletSet phase_triplets_;
  std::vector<bool> used_heads_;
  std::size_t cursor_ = 0;
  std::size_t acquisitions_ = 0;
};

}  // namespace simtuple
