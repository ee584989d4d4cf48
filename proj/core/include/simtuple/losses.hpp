#pragma once

#include "simtuple/network.hpp"

#include <Eigen/Core>

namespace simtuple {

/// Margin of the triplet loss.
inline constexpr double kTripletMargin = 1.0;

struct SiameseWeights {
  double center = 1e-4;
  double weight = 1e-4;
};

/// (|f(a) - f(b)| - d_true)^2 + center (|f(a)| + |f(b)|) + weight |theta|.
/// When `grad` is given, d(loss)/d(theta) is added to it.
double siamese_loss(const EmbeddingModel& model, const Eigen::MatrixXd& a, const Eigen::MatrixXd& b,
                    double d_true, const SiameseWeights& w, Eigen::VectorXd* grad = nullptr);

/// max(|f(a) - f(p)| - |f(a) - f(n)| + margin, 0).
double triplet_loss(const EmbeddingModel& model, const Eigen::MatrixXd& a, const Eigen::MatrixXd& p,
                    const Eigen::MatrixXd& n, Eigen::VectorXd* grad = nullptr);

/// Loss terms on precomputed embeddings. The `g*` outputs receive
/// d(loss)/d(embedding); norms use a zero subgradient at the origin.
double siamese_term(const Eigen::VectorXd& fa, const Eigen::VectorXd& fb, double d_true, double center,
                    Eigen::VectorXd* ga = nullptr, Eigen::VectorXd* gb = nullptr);
double triplet_term(const Eigen::VectorXd& fa, const Eigen::VectorXd& fp, const Eigen::VectorXd& fn,
                    Eigen::VectorXd* ga = nullptr, Eigen::VectorXd* gp = nullptr, Eigen::VectorXd* gn = nullptr);

}  // namespace simtuple
