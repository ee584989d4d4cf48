#include "simtuple/session.hpp"

#include "simtuple/compose.hpp"
#include "simtuple/error.hpp"
#include "simtuple/metrics.hpp"

#include <Eigen/Eigenvalues>
#include <spdlog/spdlog.h>

#include <algorithm>
#include <chrono>

namespace simtuple {

namespace {

constexpr std::array<Phase, kPhaseCount> kOrder = {Phase::warmup,        Phase::repeat1,      Phase::rq2_rnd,
                                                  Phase::rq2_mixed,     Phase::rq2_nn,       Phase::rq3_active_nn,
                                                  Phase::rq3_infotuple, Phase::repeat2};

bool is_rq2(Phase p) { return p == Phase::rq2_rnd || p == Phase::rq2_mixed || p == Phase::rq2_nn; }
bool is_rq3(Phase p) { return p == Phase::rq3_active_nn || p == Phase::rq3_infotuple; }

Strategy phase_strategy(Phase p) {
  switch (p) {
    case Phase::rq2_mixed: return Strategy::random_nn;
    case Phase::rq2_nn: return Strategy::nn;
    case Phase::rq3_active_nn: return Strategy::active_nn;
    case Phase::rq3_infotuple: return Strategy::infotuple;
    default: return Strategy::random;
  }
}

double elapsed_ms(std::chrono::steady_clock::time_point t0) {
  return std::chrono::duration<double, std::milli>(std::chrono::steady_clock::now() - t0).count();
}

std::int64_t wall_ms() {
  return std::chrono::duration_cast<std::chrono::milliseconds>(std::chrono::system_clock::now().time_since_epoch())
      .count();
}

TripletSet concat(const TripletSet& a, const TripletSet& b) {
  TripletSet out = a;
  out.insert(out.end(), b.begin(), b.end());
  return out;
}

// Leading d principal directions of the columns, zero-padded when the
// embedding has fewer than d dimensions.
Eigen::MatrixXd project(const Eigen::MatrixXd& e, std::size_t d) {
  const auto rows = static_cast<Eigen::Index>(d);
  Eigen::MatrixXd out = Eigen::MatrixXd::Zero(rows, e.cols());
  if (e.rows() <= rows) {
    out.topRows(e.rows()) = e;
    return out;
  }
  const Eigen::MatrixXd centered = e.colwise() - e.rowwise().mean();
  Eigen::SelfAdjointEigenSolver<Eigen::MatrixXd> eig(centered * centered.transpose());
  // Eigenvalues ascend; take the last d vectors.
  const Eigen::MatrixXd basis = eig.eigenvectors().rightCols(rows);
  return basis.transpose() * centered;
}

}  // namespace

std::string_view to_string(Phase p) noexcept {
  switch (p) {
    case Phase::warmup: return "warmup";
    case Phase::repeat1: return "repeat1";
    case Phase::rq2_rnd: return "rq2_rnd";
    case Phase::rq2_mixed: return "rq2_mixed";
    case Phase::rq2_nn: return "rq2_nn";
    case Phase::rq3_active_nn: return "rq3_active_nn";
    case Phase::rq3_infotuple: return "rq3_infotuple";
    case Phase::repeat2: return "repeat2";
  }
  return "warmup";
}

Phase phase_from_string(std::string_view name) {
  for (auto p : kOrder)
    if (to_string(p) == name) return p;
  fail(ErrorCode::invalid_input, "unknown phase '" + std::string(name) + "'");
}

nlohmann::json to_json(const StudyConfig& cfg) {
  auto curves = nlohmann::json::array();
  for (auto s : cfg.offline_curves) curves.push_back(std::string(to_string(s)));
  return {
      {"k", cfg.k},
      {"quotas",
       {{"warmup", cfg.quotas.warmup},
        {"repeat", cfg.quotas.repeat},
        {"repeat_pool", cfg.quotas.repeat_pool},
        {"rq2_train", cfg.quotas.rq2_train},
        {"rq2_test", cfg.quotas.rq2_test},
        {"rq3", cfg.quotas.rq3}}},
      {"finetune", {{"epochs", cfg.finetune.epochs}, {"batch", cfg.finetune.batch}, {"lr", cfg.finetune.adam.lr}}},
      {"infotuple",
       {{"n_candidates", cfg.infotuple.n_candidates},
        {"n_permutations", cfg.infotuple.n_permutations},
        {"mc_passes", cfg.infotuple.mc_passes}}},
      {"posterior",
       {{"B", cfg.posterior.B},
        {"d_ord", cfg.posterior.tste.d_ord},
        {"from_embedding", cfg.posterior_from_embedding},
        {"jitter", cfg.posterior_jitter}}},
      {"offline_curves", curves},
      {"ceiling_run", cfg.ceiling_run},
      {"seed", cfg.seed},
  };
}

std::shared_ptr<const StudyContext> make_study_context(Dataset dataset, EmbeddingModel base, StudyConfig config) {
  require(config.k >= 2 && dataset.size() >= config.k, "study: dataset smaller than the tuple size");
  require(config.quotas.warmup >= 1 && config.quotas.repeat >= 1 && config.quotas.rq2_train >= 1 &&
              config.quotas.rq2_test >= 1 && config.quotas.rq3 >= 1,
          "study: quotas must be at least 1");
  require(config.quotas.repeat_pool >= config.quotas.repeat, "study: repeat pool smaller than the repeat quota");
  auto ctx = std::make_shared<StudyContext>();
  ctx->base_store = EmbeddingStore::build(base, dataset.inputs);
  std::mt19937_64 rng(config.seed ^ 0x7265706561740000ULL);
  for (std::size_t i = 0; i < config.quotas.repeat_pool; ++i) {
    TupleQuery q = compose_mixed(ctx->base_store, base.version, std::nullopt, config.k, rng);
    q.id = "repeat-" + std::to_string(i);
    ctx->repeat_pool.push_back(std::move(q));
  }
  ctx->dataset = std::move(dataset);
  ctx->base = std::move(base);
  ctx->config = std::move(config);
  return ctx;
}

Session::Session(std::shared_ptr<const StudyContext> ctx, std::string annotator_id, std::uint64_t seed, Sink sink,
                 Clock clock)
    : ctx_(std::move(ctx)),
      annotator_id_(std::move(annotator_id)),
      seed_(seed),
      sink_(std::move(sink)),
      clock_(clock ? std::move(clock) : Clock(wall_ms)),
      rng_(seed) {
  require(ctx_ != nullptr, "session: missing study context");
  cursor_ = std::uniform_int_distribution<std::size_t>(0, ctx_->dataset.size() - 1)(rng_);
  emit("session_created", {{"annotator_id", annotator_id_}, {"seed", seed_}, {"config", to_json(ctx_->config)}});
}

void Session::emit(std::string type, nlohmann::json data) {
  Event e;
  e.seq = events_.size();
  e.ts_ms = clock_();
  e.type = std::move(type);
  e.data = std::move(data);
  events_.push_back(std::move(e));
  if (sink_ && !replaying_) sink_(events_.back());
}

const EmbeddingModel& Session::model() const {
  if (model_) return *model_;
  if (warm_) return *warm_;
  return ctx_->base;
}

NextQuery Session::next_query() {
  if (complete_) return StudyComplete{};
  if (pending_) return *pending_;
  if (!phase_started_) start_phase();
  if (phase_done()) {
    const Phase finished = phase_;
    finish_phase();
    if (finished == Phase::repeat2) {
      complete_ = true;
      emit("study_completed", nlohmann::json::object());
      return StudyComplete{};
    }
    phase_ = kOrder[static_cast<std::size_t>(finished) + 1];
    phase_started_ = false;
    return PhaseComplete{finished, phase_};
  }
  const auto t0 = std::chrono::steady_clock::now();
  TupleQuery q = make_query();
  q.created_at_ms = clock_();
  pending_ = q;
  auto data = query_json(q, pending_test_, pending_repeat_of_);
  data["compute_ms"] = elapsed_ms(t0);
  emit("query", std::move(data));
  return q;
}

nlohmann::json Session::query_json(const TupleQuery& q, bool test, const std::string& repeat_of) const {
  const auto& ds = ctx_->dataset;
  std::vector<std::string> body;
  for (auto b : q.body) body.push_back(ds.scenes[b].id);
  nlohmann::json j = {{"query_id", q.id},
                      {"phase", std::string(to_string(phase_))},
                      {"strategy", std::string(to_string(q.strategy))},
                      {"head", ds.scenes[q.head].id},
                      {"body", body},
                      {"model_version", q.model_version},
                      {"created_at_ms", q.created_at_ms}};
  if (is_rq2(phase_)) j["test"] = test;
  if (!repeat_of.empty()) j["repeat_of"] = repeat_of;
  return j;
}

bool Session::phase_done() const {
  const auto& qt = ctx_->config.quotas;
  switch (phase_) {
    case Phase::warmup: return phase_nonskip_ >= qt.warmup;
    case Phase::repeat1: return phase_nonskip_ >= qt.repeat || repeat_cursor_ >= ctx_->repeat_pool.size();
    case Phase::rq2_rnd:
    case Phase::rq2_mixed:
    case Phase::rq2_nn: return phase_nonskip_ >= qt.rq2_train && phase_test_nonskip_ >= qt.rq2_test;
    case Phase::rq3_active_nn:
    case Phase::rq3_infotuple: return phase_nonskip_ >= qt.rq3;
    case Phase::repeat2: return phase_queries_ >= repeat1_shown_.size();
  }
  return true;
}

void Session::start_phase() {
  phase_started_ = true;
  phase_queries_ = phase_nonskip_ = phase_test_nonskip_ = 0;
  emit("phase_started", {{"phase", std::string(to_string(phase_))}});
  if (is_rq3(phase_)) {
    model_ = *warm_;
    store_ = *warm_store_;
    phase_triplets_.clear();
    acquisitions_ = 0;
    used_heads_.assign(ctx_->dataset.size(), false);
    refresh_posterior();
    if (!test_triplets_.empty()) evaluate(std::string(to_string(phase_strategy(phase_))), 0, *model_, 0.0);
  }
}

void Session::finish_phase() {
  std::size_t skips = 0;
  for (const auto& a : answered_)
    if (a.phase == phase_ && a.response.skipped()) ++skips;
  emit("phase_completed",
       {{"phase", std::string(to_string(phase_))}, {"queries", phase_queries_}, {"skips", skips}});
  switch (phase_) {
    case Phase::repeat1: build_warm_start(); break;
    case Phase::rq2_rnd:
      for (const auto& a : answered_)
        if (a.phase == Phase::rq2_rnd && a.test) {
          const auto t = decompose_response(a.query, a.response);
          test_triplets_.insert(test_triplets_.end(), t.begin(), t.end());
        }
      evaluate("base", 0, ctx_->base, 0.0);
      evaluate("warm_start", 0, *warm_, 0.0);
      run_offline_curve(phase_);
      break;
    case Phase::rq2_mixed:
    case Phase::rq2_nn: run_offline_curve(phase_); break;
    case Phase::rq3_active_nn:
    case Phase::rq3_infotuple:
      model_.reset();
      store_.reset();
      posterior_.reset();
      break;
    case Phase::repeat2:
      if (ctx_->config.ceiling_run) run_ceiling();
      break;
    default: break;
  }
}

TupleQuery Session::make_query() {
  const auto& cfg = ctx_->config;
  const std::size_t N = ctx_->dataset.size();
  const std::string tag = std::string(to_string(phase_)) + "-" + std::to_string(phase_queries_);
  pending_test_ = false;
  pending_repeat_of_.clear();
  TupleQuery q;
  switch (phase_) {
    case Phase::warmup: q = compose_random(N, std::nullopt, cfg.k, rng_); break;
    case Phase::repeat1: {
      const std::size_t idx = repeat_cursor_++;
      repeat1_shown_.push_back(idx);
      q = ctx_->repeat_pool[idx];
      pending_repeat_of_ = q.id;
      break;
    }
    case Phase::rq2_rnd:
    case Phase::rq2_mixed:
    case Phase::rq2_nn:
      pending_test_ = phase_nonskip_ >= cfg.quotas.rq2_train;
      if (phase_ == Phase::rq2_rnd)
        q = compose_random(N, std::nullopt, cfg.k, rng_);
      else if (phase_ == Phase::rq2_mixed)
        q = compose_mixed(*warm_store_, warm_->version, std::nullopt, cfg.k, rng_);
      else
        q = compose_nn(*warm_store_, warm_->version, std::nullopt, cfg.k, rng_);
      break;
    case Phase::rq3_active_nn:
      q = active_nn_select(*store_, model_->version, *posterior_, cfg.k, &used_heads_);
      used_heads_[q.head] = true;
      break;
    case Phase::rq3_infotuple: {
      const std::size_t head = cursor_++ % N;
      q = infotuple_select(*store_, model_->version, *posterior_, head, cfg.k, cfg.infotuple, rng_());
      break;
    }
    case Phase::repeat2: {
      const std::size_t idx = repeat1_shown_[phase_queries_];
      q = ctx_->repeat_pool[idx];
      pending_repeat_of_ = q.id;
      std::shuffle(q.body.begin(), q.body.end(), rng_);
      q.id += "/2";
      break;
    }
  }
  if (phase_ != Phase::repeat1 && phase_ != Phase::repeat2) q.id = tag;
  ++phase_queries_;
  return q;
}

void Session::record_response(const TupleResponse& response) {
  if (!pending_ || response.query_id != pending_->id) {
    if (std::find(answered_ids_.begin(), answered_ids_.end(), response.query_id) != answered_ids_.end())
      fail(ErrorCode::conflict, "query '" + response.query_id + "' was already answered");
    fail(ErrorCode::out_of_order, "query '" + response.query_id + "' is not the pending query");
  }
  const TupleQuery& q = *pending_;
  require(!response.choice || *response.choice < q.body.size(), "response: choice index out of range");
  require(response.response_ms > 0.0, "response: response_ms must be positive");

  nlohmann::json chosen = nullptr, choice = nullptr;
  if (response.choice) {
    choice = *response.choice;
    chosen = ctx_->dataset.scenes[q.body[*response.choice]].id;
  }
  emit("response", {{"query_id", q.id},
                    {"phase", std::string(to_string(phase_))},
                    {"choice", choice},
                    {"chosen", chosen},
                    {"response_ms", response.response_ms}});

  Answered a{q, response, phase_, pending_test_};
  a.response.annotator_id = annotator_id_;
  answered_ids_.push_back(q.id);
  if (!response.skipped()) {
    if (is_rq2(phase_) && pending_test_)
      ++phase_test_nonskip_;
    else
      ++phase_nonskip_;
  }
  pending_.reset();
  answered_.push_back(std::move(a));
  after_response(answered_.back());
}

void Session::after_response(const Answered& a) {
  if (!is_rq3(a.phase) || a.response.skipped()) return;
  const auto t0 = std::chrono::steady_clock::now();
  const auto fresh = decompose_response(a.query, a.response);
  phase_triplets_.insert(phase_triplets_.end(), fresh.begin(), fresh.end());
  const TripletSet train = concat(warm_triplets_, phase_triplets_);
  finetune(*model_, ctx_->dataset.inputs, train, ctx_->config.finetune);
  store_ = EmbeddingStore::build(*model_, ctx_->dataset.inputs);
  refresh_posterior();
  const double ct = elapsed_ms(t0);
  ++acquisitions_;
  emit("retrain", {{"phase", std::string(to_string(a.phase))},
                   {"model_version", model_->version},
                   {"triplets", train.size()},
                   {"compute_ms", ct}});
  evaluate(std::string(to_string(phase_strategy(a.phase))), acquisitions_, *model_, ct);
}

void Session::record_survey(const nlohmann::json& answers) {
  require(answers.is_object(), "survey: answers must be a JSON object");
  emit("survey", {{"answers", answers}});
}

void Session::add_warm_start_triplets(const TripletSet& triplets) {
  if (warm_) fail(ErrorCode::conflict, "warm start already built");
  const auto& ds = ctx_->dataset;
  auto arr = nlohmann::json::array();
  for (const auto& t : triplets) {
    require(t.a < ds.size() && t.p < ds.size() && t.n < ds.size(), "warm start: triplet index out of range");
    arr.push_back({ds.scenes[t.a].id, ds.scenes[t.p].id, ds.scenes[t.n].id});
  }
  extra_warm_.insert(extra_warm_.end(), triplets.begin(), triplets.end());
  emit("warm_start_extra", {{"triplets", arr}});
}

void Session::build_warm_start() {
  const auto t0 = std::chrono::steady_clock::now();
  warm_triplets_.clear();
  for (const auto& a : answered_)
    if (a.phase == Phase::repeat1) {
      const auto t = decompose_response(a.query, a.response);
      warm_triplets_.insert(warm_triplets_.end(), t.begin(), t.end());
    }
  warm_triplets_.insert(warm_triplets_.end(), extra_warm_.begin(), extra_warm_.end());
  warm_ = ctx_->base;
  warm_->rng.seed(seed_ ^ 0x7761726d00000000ULL);
  finetune(*warm_, ctx_->dataset.inputs, warm_triplets_, ctx_->config.finetune);
  warm_store_ = EmbeddingStore::build(*warm_, ctx_->dataset.inputs);
  emit("retrain", {{"phase", "repeat1"},
                   {"model_version", warm_->version},
                   {"triplets", warm_triplets_.size()},
                   {"compute_ms", elapsed_ms(t0)}});
}

void Session::run_offline_curve(Phase phase) {
  const Strategy s = phase_strategy(phase);
  const auto& curves = ctx_->config.offline_curves;
  if (std::find(curves.begin(), curves.end(), s) == curves.end() || test_triplets_.empty()) return;
  EmbeddingModel model = *warm_;
  TripletSet acquired;
  std::size_t step = 0;
  evaluate(std::string(to_string(s)), 0, model, 0.0);
  for (const auto& a : answered_) {
    if (a.phase != phase || a.test || a.response.skipped()) continue;
    const auto t0 = std::chrono::steady_clock::now();
    const auto fresh = decompose_response(a.query, a.response);
    acquired.insert(acquired.end(), fresh.begin(), fresh.end());
    finetune(model, ctx_->dataset.inputs, concat(warm_triplets_, acquired), ctx_->config.finetune);
    evaluate(std::string(to_string(s)), ++step, model, elapsed_ms(t0));
  }
}

void Session::evaluate(const std::string& strategy, std::size_t step, const EmbeddingModel& model, double compute_ms) {
  const double acc = triplet_accuracy(model, ctx_->dataset.inputs, test_triplets_);
  emit("evaluation", {{"phase", std::string(to_string(phase_))},
                      {"strategy", strategy},
                      {"step", step},
                      {"accuracy", acc},
                      {"compute_ms", compute_ms}});
}

void Session::refresh_posterior() {
  const auto& cfg = ctx_->config;
  const double alpha = cfg.posterior.tste.resolved_alpha();
  if (phase_ == Phase::rq3_active_nn) {
    posterior_ = OrdinalPosterior::from_embedding(store_->embeddings(), alpha);
    return;
  }
  BootstrapConfig bc = cfg.posterior;
  bc.tste.seed = rng_();
  if (cfg.posterior_from_embedding) {
    bc.tste.init = normalize_scale(project(store_->embeddings(), bc.tste.d_ord));
    bc.tste.init_jitter = cfg.posterior_jitter;
  }
  posterior_ = bootstrap_posterior(concat(warm_triplets_, phase_triplets_), ctx_->dataset.size(), bc);
}

void Session::run_ceiling() {
  if (test_triplets_.empty()) return;
  const auto t0 = std::chrono::steady_clock::now();
  TripletSet all = extra_warm_;
  std::size_t tuples = 0;
  for (const auto& a : answered_) {
    if (a.phase == Phase::warmup || a.phase == Phase::repeat2 || a.test || a.response.skipped()) continue;
    const auto t = decompose_response(a.query, a.response);
    all.insert(all.end(), t.begin(), t.end());
    ++tuples;
  }
  EmbeddingModel model = ctx_->base;
  model.rng.seed(seed_ ^ 0x6365696c00000000ULL);
  finetune(model, ctx_->dataset.inputs, all, ctx_->config.finetune);
  evaluate("all_tuples", tuples, model, elapsed_ms(t0));
}

std::unique_ptr<Session> Session::replay(std::shared_ptr<const StudyContext> ctx, const std::vector<Event>& log,
                                         Sink sink, Clock clock) {
  require(!log.empty() && log.front().type == "session_created", "replay: log must start with session_created");
  const auto& head = log.front().data;
  auto s = std::make_unique<Session>(std::move(ctx), head.at("annotator_id").get<std::string>(),
                                     head.at("seed").get<std::uint64_t>(), Sink{}, std::move(clock));
  s->replaying_ = true;
  const auto& ds = s->ctx_->dataset;
  for (std::size_t i = 1; i < log.size(); ++i) {
    if (s->events_.size() > i) continue;
    const Event& e = log[i];
    if (e.type == "response") {
      TupleResponse r;
      r.query_id = e.data.at("query_id").get<std::string>();
      if (!e.data.at("choice").is_null()) r.choice = e.data.at("choice").get<std::size_t>();
      r.response_ms = e.data.at("response_ms").get<double>();
      s->record_response(r);
    } else if (e.type == "survey") {
      s->record_survey(e.data.at("answers"));
    } else if (e.type == "warm_start_extra") {
      TripletSet extra;
      for (const auto& t : e.data.at("triplets"))
        extra.push_back({ds.index_of(t[0].get<std::string>()), ds.index_of(t[1].get<std::string>()),
                         ds.index_of(t[2].get<std::string>())});
      s->add_warm_start_triplets(extra);
    } else {
      const std::size_t before = s->events_.size();
      s->next_query();
      if (s->events_.size() == before) fail(ErrorCode::conflict, "replay: log diverges at event " + std::to_string(i));
    }
    const std::size_t upto = std::min(s->events_.size(), log.size());
    for (std::size_t k = i; k < upto; ++k)
      if (!equivalent_modulo_time(to_json(s->events_[k]), to_json(log[k])))
        fail(ErrorCode::conflict, "replay: log diverges at event " + std::to_string(k) + " (" + log[k].type + ")");
  }
  if (s->events_.size() != log.size())
    fail(ErrorCode::conflict, "replay: re-execution produced " + std::to_string(s->events_.size()) +
                                  " events, the log has " + std::to_string(log.size()));
  // Keep the original wall-clock fields.
  s->events_ = log;
  s->replaying_ = false;
  s->sink_ = std::move(sink);
  return s;
}

}  // namespace simtuple
