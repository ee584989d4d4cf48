#pragma once

#include <Eigen/Core>

#include <cstdint>

namespace simtuple {

struct AdamConfig {
  double lr = 1e-3;
  double beta1 = 0.9;
  double beta2 = 0.999;
  double eps = 1e-8;
};

/// First and second moment estimates plus the step count.
struct AdamState {
  Eigen::VectorXd m;
  Eigen::VectorXd v;
  std::uint64_t t = 0;

  void reset(Eigen::Index n);
};

/// One bias-corrected Adam update of `params` in place.
void adam_step(Eigen::VectorXd& params, const Eigen::VectorXd& grad, AdamState& state,
               const AdamConfig& cfg);

}  // namespace simtuple
