#pragma once

#include "simtuple/losses.hpp"
#include "simtuple/network.hpp"
#include "simtuple/tste.hpp"

#include <Eigen/Core>

#include <algorithm>
#include <functional>
#include <random>
#include <vector>

namespace simtuple::test {

/// Relative error ||g - fd|| / max(||g||, ||fd||) of an analytic gradient
/// against central differences of `f` around `x`.
inline double gradient_rel_error(const std::function<double(const Eigen::VectorXd&)>& f, const Eigen::VectorXd& x,
                                 const Eigen::VectorXd& analytic, double h = 1e-5) {
  Eigen::VectorXd fd(x.size()), probe = x;
  for (Eigen::Index i = 0; i < x.size(); ++i) {
    probe[i] = x[i] + h;
    const double up = f(probe);
    probe[i] = x[i] - h;
    const double down = f(probe);
    probe[i] = x[i];
    fd[i] = (up - down) / (2.0 * h);
  }
  const double scale = std::max({analytic.norm(), fd.norm(), 1e-300});
  return (analytic - fd).norm() / scale;
}

/// 2 residual blocks, width 8, m = 8 over a 6-channel input.
inline Architecture mini_arch() { return Architecture{6, 8, 3, 2, 8, 1}; }

inline Eigen::MatrixXd random_input(std::mt19937_64& rng, Eigen::Index channels, Eigen::Index steps) {
  std::uniform_real_distribution<double> u(-1.0, 1.0);
  Eigen::MatrixXd m(channels, steps);
  for (Eigen::Index i = 0; i < m.size(); ++i) m.data()[i] = u(rng);
  return m;
}

inline double siamese_gradient_error(std::uint64_t seed) {
  std::mt19937_64 rng(seed);
  EmbeddingModel model = make_model(mini_arch(), seed);
  const auto a = random_input(rng, 6, 10), b = random_input(rng, 6, 10);
  const SiameseWeights w{1e-2, 1e-2};
  const double d_true = 3.0;
  Eigen::VectorXd g = Eigen::VectorXd::Zero(model.params.size());
  siamese_loss(model, a, b, d_true, w, &g);
  auto f = [&](const Eigen::VectorXd& p) {
    EmbeddingModel m = model;
    m.params = p;
    return siamese_loss(m, a, b, d_true, w);
  };
  return gradient_rel_error(f, model.params, g);
}

inline double triplet_gradient_error(std::uint64_t seed) {
  std::mt19937_64 rng(seed);
  EmbeddingModel model = make_model(mini_arch(), seed);
  const auto a = random_input(rng, 6, 10);
  auto p = random_input(rng, 6, 10), n = random_input(rng, 6, 10);
  // Keep the hinge active.
  if (triplet_loss(model, a, p, n) <= 0.0) std::swap(p, n);
  auto f = [&](const Eigen::VectorXd& params) {
    EmbeddingModel m = model;
    m.params = params;
    return triplet_loss(m, a, p, n);
  };
  Eigen::VectorXd g = Eigen::VectorXd::Zero(model.params.size());
  triplet_loss(model, a, p, n, &g);
  return gradient_rel_error(f, model.params, g);
}

inline double tste_gradient_error(std::uint64_t seed) {
  std::mt19937_64 rng(seed);
  const Eigen::Index d = 3, N = 12;
  Eigen::MatrixXd M(d, N);
  std::normal_distribution<double> normal(0.0, 1.0);
  for (Eigen::Index i = 0; i < M.size(); ++i) M.data()[i] = normal(rng);
  TripletSet triplets;
  std::uniform_int_distribution<std::size_t> pick(0, static_cast<std::size_t>(N) - 1);
  while (triplets.size() < 40) {
    const Triplet t{pick(rng), pick(rng), pick(rng)};
    if (t.a != t.p && t.a != t.n && t.p != t.n) triplets.push_back(t);
  }
  const double alpha = 2.0;
  Eigen::MatrixXd g;
  tste_log_likelihood(M, triplets, alpha, &g);
  auto f = [&](const Eigen::VectorXd& x) {
    return tste_log_likelihood(Eigen::Map<const Eigen::MatrixXd>(x.data(), d, N), triplets, alpha);
  };
  return gradient_rel_error(f, Eigen::Map<const Eigen::VectorXd>(M.data(), M.size()),
                            Eigen::Map<const Eigen::VectorXd>(g.data(), g.size()));
}

}  // namespace simtuple::test
