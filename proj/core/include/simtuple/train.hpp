#pragma once

#include "simtuple/adam.hpp"
#include "simtuple/losses.hpp"
#include "simtuple/network.hpp"
#include "simtuple/triplet.hpp"

#include <cstdint>
#include <functional>
#include <vector>

namespace simtuple {

struct TrainLog {
  std::vector<double> step_loss;
  std::vector<double> epoch_loss;
};

struct PretrainConfig {
  std::size_t pair_budget = 2000;
  std::size_t epochs = 20;
  std::size_t batch = 32;
  AdamConfig adam;
  SiameseWeights weights;
  /// Meters per embedding unit. Regression targets are d / distance_unit, so
  /// 1 regresses raw meters.
  double distance_unit = 1.0;
  std::uint64_t seed = 0;
};

struct FinetuneConfig {
  std::size_t epochs = 10;
  std::size_t batch = 32;
  AdamConfig adam;
};

using PairDistance = std::function<double(std::size_t, std::size_t)>;

/// Siamese distance regression on `pair_budget` pairs drawn uniformly from
/// all ordered pairs of distinct inputs. Throws divergence on a non-finite
/// loss. A zero budget leaves the model untouched.
void pretrain(EmbeddingModel& model, const std::vector<Eigen::MatrixXd>& inputs, const PairDistance& distance,
              const PretrainConfig& cfg, TrainLog* log = nullptr);

/// Runs exactly cfg.epochs epochs of Adam on the mean triplet loss. Moments
/// start from zero on every call. An empty set is a logged no-op.
void finetune(EmbeddingModel& model, const std::vector<Eigen::MatrixXd>& inputs, const TripletSet& triplets,
              const FinetuneConfig& cfg, TrainLog* log = nullptr);

double mean_triplet_loss(const EmbeddingModel& model, const std::vector<Eigen::MatrixXd>& inputs,
                         const TripletSet& triplets);

}  // namespace simtuple
