#include "simtuple/adam.hpp"

#include "simtuple/error.hpp"

#include <cmath>

namespace simtuple {

void AdamState::reset(Eigen::Index n) {
  m = Eigen::VectorXd::Zero(n);
  v = Eigen::VectorXd::Zero(n);
  t = 0;
}

void adam_step(Eigen::VectorXd& params, const Eigen::VectorXd& grad, AdamState& state,
               const AdamConfig& cfg) {
  require(grad.size() == params.size(), "adam_step: gradient size mismatch");
  if (state.m.size() != params.size()) state.reset(params.size());
  ++state.t;
  state.m = cfg.beta1 * state.m + (1.0 - cfg.beta1) * grad;
  state.v = cfg.beta2 * state.v + (1.0 - cfg.beta2) * grad.cwiseAbs2();
  const double c1 = 1.0 - std::pow(cfg.beta1, static_cast<double>(state.t));
  const double c2 = 1.0 - std::pow(cfg.beta2, static_cast<double>(state.t));
  params.array() -= cfg.lr * (state.m.array() / c1) / ((state.v.array() / c2).sqrt() + cfg.eps);
}

}  // namespace simtuple
