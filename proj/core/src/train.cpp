#include "simtuple/train.hpp"

#include "simtuple/error.hpp"

#include <spdlog/spdlog.h>

#include <algorithm>
#include <cmath>
#include <unordered_map>

namespace simtuple {

namespace {

/// Forward passes for the distinct scenes of one batch, with per-scene
/// output gradients accumulated before a single backward pass each.
class BatchScenes {
 public:
  std::size_t add(std::size_t scene, const EmbeddingModel& model, const std::vector<Eigen::MatrixXd>& inputs) {
    const auto [it, fresh] = slot_.emplace(scene, order_.size());
    if (fresh) {
      order_.push_back(scene);
      if (caches_.size() < order_.size()) caches_.resize(order_.size());
      out_.resize(order_.size());
      grad_.resize(order_.size());
      out_.back() = forward(model, inputs[scene], &caches_[order_.size() - 1]);
      grad_.back() = Eigen::VectorXd::Zero(out_.back().size());
    }
    return it->second;
  }
  const Eigen::VectorXd& out(std::size_t s) const { return out_[s]; }
  Eigen::VectorXd& grad(std::size_t s) { return grad_[s]; }

  void backward_all(const EmbeddingModel& model, Eigen::VectorXd& g) const {
    for (std::size_t s = 0; s < order_.size(); ++s) backward(model, caches_[s], grad_[s], g);
  }
  void clear() {
    slot_.clear();
    order_.clear();
  }

 private:
  std::unordered_map<std::size_t, std::size_t> slot_;
  std::vector<std::size_t> order_;
  std::vector<ForwardCache> caches_;
  std::vector<Eigen::VectorXd> out_;
  std::vector<Eigen::VectorXd> grad_;
};

void check_finite(double loss, const char* what, std::size_t step) {
  if (!std::isfinite(loss))
    fail(ErrorCode::divergence, std::string(what) + ": loss became non-finite at step " + std::to_string(step));
}

}  // namespace

void pretrain(EmbeddingModel& model, const std::vector<Eigen::MatrixXd>& inputs, const PairDistance& distance,
              const PretrainConfig& cfg, TrainLog* log) {
  if (cfg.pair_budget == 0) return;
  require(inputs.size() >= 2, "pretrain: need at least two scenes");
  require(cfg.batch >= 1 && cfg.distance_unit > 0.0, "pretrain: invalid configuration");

  std::mt19937_64 pair_rng(cfg.seed);
  std::uniform_int_distribution<std::size_t> pick(0, inputs.size() - 1);
  struct Pair {
    std::size_t i, j;
    double target;
  };
  std::vector<Pair> pairs;
  pairs.reserve(cfg.pair_budget);
  while (pairs.size() < cfg.pair_budget) {
    const std::size_t i = pick(pair_rng), j = pick(pair_rng);
    if (i == j) continue;
    pairs.push_back({i, j, distance(i, j) / cfg.distance_unit});
  }

  model.adam.reset(model.params.size());
  BatchScenes scenes;
  Eigen::VectorXd g(model.params.size()), ga, gb;
  std::size_t step = 0;
  for (std::size_t epoch = 0; epoch < cfg.epochs; ++epoch) {
    std::shuffle(pairs.begin(), pairs.end(), model.rng);
    double epoch_loss = 0.0;
    for (std::size_t lo = 0; lo < pairs.size(); lo += cfg.batch) {
      const std::size_t hi = std::min(pairs.size(), lo + cfg.batch);
      const double inv = 1.0 / static_cast<double>(hi - lo);
      scenes.clear();
      double loss = 0.0;
      for (std::size_t k = lo; k < hi; ++k) {
        const std::size_t sa = scenes.add(pairs[k].i, model, inputs);
        const std::size_t sb = scenes.add(pairs[k].j, model, inputs);
        loss += siamese_term(scenes.out(sa), scenes.out(sb), pairs[k].target, cfg.weights.center, &ga, &gb);
        scenes.grad(sa) += inv * ga;
        scenes.grad(sb) += inv * gb;
      }
      const double theta = model.params.norm();
      loss = loss * inv + cfg.weights.weight * theta;
      check_finite(loss, "pretrain", step);
      g.setZero();
      scenes.backward_all(model, g);
      if (theta > 0.0) g += (cfg.weights.weight / theta) * model.params;
      adam_step(model.params, g, model.adam, cfg.adam);
      if (log) log->step_loss.push_back(loss);
      spdlog::trace("pretrain step {} loss {:.6f}", step, loss);
      epoch_loss += loss * static_cast<double>(hi - lo);
      ++step;
    }
    epoch_loss /= static_cast<double>(pairs.size());
    if (log) log->epoch_loss.push_back(epoch_loss);
    spdlog::debug("pretrain epoch {} mean loss {:.6f}", epoch, epoch_loss);
  }
  ++model.version;
}

void finetune(EmbeddingModel& model, const std::vector<Eigen::MatrixXd>& inputs, const TripletSet& triplets,
              const FinetuneConfig& cfg, TrainLog* log) {
  if (triplets.empty()) {
    spdlog::warn("finetune: empty triplet set, model left unchanged");
    return;
  }
  require(cfg.batch >= 1, "finetune: batch size must be positive");
  for (const auto& t : triplets)
    require(t.a < inputs.size() && t.p < inputs.size() && t.n < inputs.size() && t.a != t.p && t.a != t.n &&
                t.p != t.n,
            "finetune: invalid triplet");

  TripletSet order = triplets;
  model.adam.reset(model.params.size());
  BatchScenes scenes;
  Eigen::VectorXd g(model.params.size()), ga, gp, gn;
  std::size_t step = 0;
  for (std::size_t epoch = 0; epoch < cfg.epochs; ++epoch) {
    std::shuffle(order.begin(), order.end(), model.rng);
    double epoch_loss = 0.0;
    for (std::size_t lo = 0; lo < order.size(); lo += cfg.batch) {
      const std::size_t hi = std::min(order.size(), lo + cfg.batch);
      const double inv = 1.0 / static_cast<double>(hi - lo);
      scenes.clear();
      double loss = 0.0;
      for (std::size_t k = lo; k < hi; ++k) {
        const std::size_t sa = scenes.add(order[k].a, model, inputs);
        const std::size_t sp = scenes.add(order[k].p, model, inputs);
        const std::size_t sn = scenes.add(order[k].n, model, inputs);
        loss += triplet_term(scenes.out(sa), scenes.out(sp), scenes.out(sn), &ga, &gp, &gn);
        scenes.grad(sa) += inv * ga;
        scenes.grad(sp) += inv * gp;
        scenes.grad(sn) += inv * gn;
      }
      loss *= inv;
      check_finite(loss, "finetune", step);
      g.setZero();
      scenes.backward_all(model, g);
      adam_step(model.params, g, model.adam, cfg.adam);
      if (log) log->step_loss.push_back(loss);
      epoch_loss += loss * static_cast<double>(hi - lo);
      ++step;
    }
    if (log) log->epoch_loss.push_back(epoch_loss / static_cast<double>(order.size()));
  }
  ++model.version;
}

double mean_triplet_loss(const EmbeddingModel& model, const std::vector<Eigen::MatrixXd>& inputs,
                         const TripletSet& triplets) {
  if (triplets.empty()) return 0.0;
  const Eigen::MatrixXd e = embed_all(model, inputs);
  double sum = 0.0;
  for (const auto& t : triplets)
    sum += triplet_term(e.col(static_cast<Eigen::Index>(t.a)), e.col(static_cast<Eigen::Index>(t.p)),
                        e.col(static_cast<Eigen::Index>(t.n)));
  return sum / static_cast<double>(triplets.size());
}

}  // namespace simtuple
