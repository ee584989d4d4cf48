#pragma once

#include "simtuple/triplet.hpp"

#include <Eigen/Core>

#include <cstdint>
#include <optional>
#include <vector>

namespace simtuple {

/// Student-t similarity kernel (1 + d^2/alpha)^(-(alpha+1)/2).
double tste_kernel(double d, double alpha);

/// Probability that the anchor is judged closer to p than to n.
double tste_prob(double d_ap, double d_an, double alpha);

/// max(1, d_ord - 1).
double default_alpha(std::size_t d_ord);

struct TsteConfig {
  std::size_t d_ord = 10;
  /// Degrees of freedom; 0 selects default_alpha(d_ord).
  double alpha = 0.0;
  std::size_t max_iter = 500;
  /// Stop when one iteration improves the log-likelihood by less than
  /// tol * (1 + |LL|).
  double tol = 1e-7;
  std::size_t restarts = 1;
  std::uint64_t seed = 0;
  /// Starting coordinates (d_ord x N). Without it, coordinates start from
  /// N(0, 1/d_ord).
  std::optional<Eigen::MatrixXd> init;
  /// Gaussian noise added to `init`, scaled per restart seed.
  double init_jitter = 0.0;

  double resolved_alpha() const { return alpha > 0.0 ? alpha : default_alpha(d_ord); }
};

struct TsteFit {
  Eigen::MatrixXd M;  ///< d_ord x N
  double log_likelihood = 0.0;
  std::size_t iterations = 0;
  /// Log-likelihood after every accepted step, starting with the initial value.
  std::vector<double> trace;
};

/// Sum of log tste_prob over triplets, with the gradient w.r.t. M if asked.
double tste_log_likelihood(const Eigen::MatrixXd& M, const TripletSet& triplets, double alpha,
                           Eigen::MatrixXd* grad = nullptr);

/// Gradient ascent with Armijo backtracking; best of cfg.restarts runs.
/// Empty triplets give a zero matrix.
TsteFit fit_tste(const TripletSet& triplets, std::size_t n_objects, const TsteConfig& cfg);

}  // namespace simtuple
