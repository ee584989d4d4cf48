#include "simtuple/tste.hpp"

#include "simtuple/error.hpp"

#include <spdlog/spdlog.h>

#include <cmath>
#include <limits>
#include <random>

namespace simtuple {

double tste_kernel(double d, double alpha) { return std::pow(1.0 + d * d / alpha, -(alpha + 1.0) / 2.0); }

double tste_prob(double d_ap, double d_an, double alpha) {
  // Ratio form avoids underflow of both kernels for large distances.
  const double u = (alpha + 1.0) / 2.0;
  const double log_ratio = u * (std::log1p(d_ap * d_ap / alpha) - std::log1p(d_an * d_an / alpha));
  return 1.0 / (1.0 + std::exp(log_ratio));
}

double default_alpha(std::size_t d_ord) { return std::max(1.0, static_cast<double>(d_ord) - 1.0); }

double tste_log_likelihood(const Eigen::MatrixXd& M, const TripletSet& triplets, double alpha,
                           Eigen::MatrixXd* grad) {
  const double u = (alpha + 1.0) / 2.0;
  if (grad) grad->setZero(M.rows(), M.cols());
  double ll = 0.0;
  const Eigen::Index d = M.rows();
  for (const auto& t : triplets) {
    const double* ma = M.col(static_cast<Eigen::Index>(t.a)).data();
    const double* mp = M.col(static_cast<Eigen::Index>(t.p)).data();
    const double* mn = M.col(static_cast<Eigen::Index>(t.n)).data();
    double sp = 0.0, sn = 0.0;
    for (Eigen::Index k = 0; k < d; ++k) {
      sp += (ma[k] - mp[k]) * (ma[k] - mp[k]);
      sn += (ma[k] - mn[k]) * (ma[k] - mn[k]);
    }
    // log p = -log(1 + exp(z)), z = u (log(1 + sp/alpha) - log(1 + sn/alpha))
    const double z = u * (std::log1p(sp / alpha) - std::log1p(sn / alpha));
    ll -= z > 0.0 ? z + std::log1p(std::exp(-z)) : std::log1p(std::exp(z));
    if (grad) {
      const double one_minus_p = 1.0 / (1.0 + std::exp(-z));
      const double cp = -2.0 * one_minus_p * u / (alpha + sp);
      const double cn = 2.0 * one_minus_p * u / (alpha + sn);
      double* ga = grad->col(static_cast<Eigen::Index>(t.a)).data();
      double* gp = grad->col(static_cast<Eigen::Index>(t.p)).data();
      double* gn = grad->col(static_cast<Eigen::Index>(t.n)).data();
      for (Eigen::Index k = 0; k < d; ++k) {
        const double dp = ma[k] - mp[k], dn = ma[k] - mn[k];
        ga[k] += cp * dp + cn * dn;
        gp[k] -= cp * dp;
        gn[k] -= cn * dn;
      }
    }
  }
  return ll;
}

namespace {

TsteFit ascend(Eigen::MatrixXd M, const TripletSet& triplets, double alpha, const TsteConfig& cfg) {
  TsteFit fit;
  Eigen::MatrixXd g, trial;
  double ll = tste_log_likelihood(M, triplets, alpha, &g);
  fit.trace.push_back(ll);
  double eta = 1.0;
  std::size_t it = 0;
  for (; it < cfg.max_iter; ++it) {
    const double g2 = g.squaredNorm();
    if (g2 < 1e-20) break;
    bool accepted = false;
    double next = ll;
    for (int halving = 0; halving < 50; ++halving) {
      trial = M + eta * g;
      next = tste_log_likelihood(trial, triplets, alpha);
      if (next >= ll + 1e-4 * eta * g2) {
        accepted = true;
        break;
      }
      eta *= 0.5;
    }
    if (!accepted) break;
    M.swap(trial);
    const double gain = next - ll;
    ll = tste_log_likelihood(M, triplets, alpha, &g);
    fit.trace.push_back(ll);
    eta *= 2.0;
    if (gain < cfg.tol * (1.0 + std::abs(ll))) {
      ++it;
      break;
    }
  }
  fit.M = std::move(M);
  fit.log_likelihood = ll;
  fit.iterations = it;
  return fit;
}

}  // namespace

TsteFit fit_tste(const TripletSet& triplets, std::size_t n_objects, const TsteConfig& cfg) {
  require(cfg.d_ord >= 1, "fit_tste: d_ord must be at least 1");
  require(cfg.restarts >= 1, "fit_tste: need at least one restart");
  const auto d = static_cast<Eigen::Index>(cfg.d_ord), N = static_cast<Eigen::Index>(n_objects);
  if (cfg.init) require(cfg.init->rows() == d && cfg.init->cols() == N, "fit_tste: init has the wrong shape");
  for (const auto& t : triplets)
    require(t.a < n_objects && t.p < n_objects && t.n < n_objects, "fit_tste: triplet index out of range");
  if (triplets.empty()) {
    spdlog::warn("fit_tste: no triplets, returning a zero embedding");
    TsteFit fit;
    fit.M = Eigen::MatrixXd::Zero(d, N);
    return fit;
  }

  const double alpha = cfg.resolved_alpha();
  TsteFit best;
  best.log_likelihood = -std::numeric_limits<double>::infinity();
  for (std::size_t r = 0; r < cfg.restarts; ++r) {
    std::mt19937_64 rng(cfg.seed + 0x9e3779b97f4a7c15ULL * r);
    Eigen::MatrixXd M0(d, N);
    if (cfg.init) {
      std::normal_distribution<double> noise(0.0, 1.0);
      M0 = *cfg.init;
      if (cfg.init_jitter > 0.0)
        for (Eigen::Index i = 0; i < M0.size(); ++i) M0.data()[i] += cfg.init_jitter * noise(rng);
    } else {
      std::normal_distribution<double> normal(0.0, std::sqrt(1.0 / static_cast<double>(cfg.d_ord)));
      for (Eigen::Index i = 0; i < M0.size(); ++i) M0.data()[i] = normal(rng);
    }
    TsteFit fit = ascend(std::move(M0), triplets, alpha, cfg);
    if (fit.log_likelihood > best.log_likelihood) best = std::move(fit);
  }
  return best;
}

}  // namespace simtuple
