#include "simtuple/service/config.hpp"

#include "simtuple/checkpoint.hpp"
#include "simtuple/error.hpp"
#include "simtuple/scene_io.hpp"

#include <filesystem>

namespace simtuple::service {

namespace {

template <typename T>
void read(const nlohmann::json& doc, const char* key, T& out) {
  if (!doc.contains(key)) return;
  try {
    out = doc.at(key).get<T>();
  } catch (const nlohmann::json::exception&) {
    fail(ErrorCode::invalid_input, std::string("config: field '") + key + "' has the wrong type");
  }
}

}  // namespace

StudyConfig study_config_from_json(const nlohmann::json& doc, StudyConfig cfg) {
  require(doc.is_object(), "config: study must be an object");
  read(doc, "k", cfg.k);
  read(doc, "seed", cfg.seed);
  read(doc, "ceiling_run", cfg.ceiling_run);
  if (doc.contains("quotas")) {
    const auto& q = doc["quotas"];
    read(q, "warmup", cfg.quotas.warmup);
    read(q, "repeat", cfg.quotas.repeat);
    read(q, "repeat_pool", cfg.quotas.repeat_pool);
    read(q, "rq2_train", cfg.quotas.rq2_train);
    read(q, "rq2_test", cfg.quotas.rq2_test);
    read(q, "rq3", cfg.quotas.rq3);
  }
  if (doc.contains("finetune")) {
    const auto& f = doc["finetune"];
    read(f, "epochs", cfg.finetune.epochs);
    read(f, "batch", cfg.finetune.batch);
    read(f, "lr", cfg.finetune.adam.lr);
  }
  if (doc.contains("infotuple")) {
    const auto& i = doc["infotuple"];
    read(i, "n_candidates", cfg.infotuple.n_candidates);
    read(i, "n_permutations", cfg.infotuple.n_permutations);
    read(i, "mc_passes", cfg.infotuple.mc_passes);
  }
  if (doc.contains("posterior")) {
    const auto& p = doc["posterior"];
    read(p, "B", cfg.posterior.B);
    read(p, "d_ord", cfg.posterior.tste.d_ord);
    read(p, "from_embedding", cfg.posterior_from_embedding);
    read(p, "jitter", cfg.posterior_jitter);
  }
  if (doc.contains("offline_curves")) {
    cfg.offline_curves.clear();
    for (const auto& s : doc["offline_curves"]) cfg.offline_curves.push_back(strategy_from_string(s.get<std::string>()));
  }
  return cfg;
}

ServiceConfig service_config_from_json(const nlohmann::json& doc, ServiceConfig cfg) {
  require(doc.is_object(), "config: document must be an object");
  read(doc, "dataset", cfg.dataset);
  read(doc, "checkpoint", cfg.checkpoint);
  read(doc, "storage_dir", cfg.storage_dir);
  read(doc, "host", cfg.host);
  read(doc, "port", cfg.port);
  read(doc, "seed", cfg.seed);
  if (doc.contains("study")) cfg.study = study_config_from_json(doc["study"], cfg.study);
  return cfg;
}

nlohmann::json to_json(const ServiceConfig& cfg) {
  return {{"dataset", cfg.dataset}, {"checkpoint", cfg.checkpoint}, {"storage_dir", cfg.storage_dir},
          {"host", cfg.host},       {"port", cfg.port},             {"seed", cfg.seed},
          {"study", to_json(cfg.study)}};
}

void validate(const ServiceConfig& cfg) {
  namespace fs = std::filesystem;
  require(!cfg.dataset.empty() && fs::is_regular_file(cfg.dataset), "config: dataset '" + cfg.dataset + "' is not readable");
  require(!cfg.checkpoint.empty() && fs::is_regular_file(cfg.checkpoint),
          "config: checkpoint '" + cfg.checkpoint + "' is not readable");
  require(!cfg.storage_dir.empty(), "config: storage_dir must be set");
  require(cfg.port >= 0 && cfg.port <= 65535, "config: port out of range");
  const auto& q = cfg.study.quotas;
  require(q.warmup >= 1 && q.repeat >= 1 && q.rq2_train >= 1 && q.rq2_test >= 1 && q.rq3 >= 1,
          "config: quotas must be at least 1");
}

std::shared_ptr<const StudyContext> load_study_context(const ServiceConfig& cfg) {
  validate(cfg);
  EmbeddingModel model = load_checkpoint(cfg.checkpoint);
  auto scenes = read_scene_archive(cfg.dataset);
  Dataset ds = make_dataset(std::move(scenes), model.arch.input_spec());
  StudyConfig study = cfg.study;
  study.seed = cfg.seed;
  return make_study_context(std::move(ds), std::move(model), study);
}

}  // namespace simtuple::service
