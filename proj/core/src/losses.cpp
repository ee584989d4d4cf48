#include "simtuple/losses.hpp"

#include "simtuple/error.hpp"

namespace simtuple {

namespace {

Eigen::VectorXd unit_or_zero(const Eigen::VectorXd& v, double norm) {
  return norm > 0.0 ? Eigen::VectorXd(v / norm) : Eigen::VectorXd::Zero(v.size());
}

}  // namespace

double siamese_term(const Eigen::VectorXd& fa, const Eigen::VectorXd& fb, double d_true, double center,
                    Eigen::VectorXd* ga, Eigen::VectorXd* gb) {
  const Eigen::VectorXd diff = fa - fb;
  const double d = diff.norm(), na = fa.norm(), nb = fb.norm();
  const double r = d - d_true;
  if (ga || gb) {
    const Eigen::VectorXd u = unit_or_zero(diff, d);
    if (ga) *ga = 2.0 * r * u + center * unit_or_zero(fa, na);
    if (gb) *gb = -2.0 * r * u + center * unit_or_zero(fb, nb);
  }
  return r * r + center * (na + nb);
}

double triplet_term(const Eigen::VectorXd& fa, const Eigen::VectorXd& fp, const Eigen::VectorXd& fn,
                    Eigen::VectorXd* ga, Eigen::VectorXd* gp, Eigen::VectorXd* gn) {
  const Eigen::VectorXd dp = fa - fp, dn = fa - fn;
  const double np = dp.norm(), nn = dn.norm();
  const double loss = np - nn + kTripletMargin;
  const bool active = loss > 0.0;
  if (ga || gp || gn) {
    const Eigen::VectorXd up = active ? unit_or_zero(dp, np) : Eigen::VectorXd::Zero(fa.size());
    const Eigen::VectorXd un = active ? unit_or_zero(dn, nn) : Eigen::VectorXd::Zero(fa.size());
    if (ga) *ga = up - un;
    if (gp) *gp = -up;
    if (gn) *gn = un;
  }
  return active ? loss : 0.0;
}

double siamese_loss(const EmbeddingModel& model, const Eigen::MatrixXd& a, const Eigen::MatrixXd& b,
                    double d_true, const SiameseWeights& w, Eigen::VectorXd* grad) {
  require(w.center >= 0.0 && w.weight >= 0.0, "siamese_loss: regularization weights must be non-negative");
  ForwardCache ca, cb;
  const Eigen::VectorXd fa = forward(model, a, grad ? &ca : nullptr);
  const Eigen::VectorXd fb = forward(model, b, grad ? &cb : nullptr);
  Eigen::VectorXd ga, gb;
  double loss = siamese_term(fa, fb, d_true, w.center, grad ? &ga : nullptr, grad ? &gb : nullptr);
  const double theta = model.params.norm();
  loss += w.weight * theta;
  if (grad) {
    if (grad->size() != model.params.size()) *grad = Eigen::VectorXd::Zero(model.params.size());
    backward(model, ca, ga, *grad);
    backward(model, cb, gb, *grad);
    if (theta > 0.0) *grad += (w.weight / theta) * model.params;
  }
  return loss;
}

double triplet_loss(const EmbeddingModel& model, const Eigen::MatrixXd& a, const Eigen::MatrixXd& p,
                    const Eigen::MatrixXd& n, Eigen::VectorXd* grad) {
  ForwardCache ca, cp, cn;
  const Eigen::VectorXd fa = forward(model, a, grad ? &ca : nullptr);
  const Eigen::VectorXd fp = forward(model, p, grad ? &cp : nullptr);
  const Eigen::VectorXd fn = forward(model, n, grad ? &cn : nullptr);
  Eigen::VectorXd ga, gp, gn;
  const double loss = triplet_term(fa, fp, fn, grad ? &ga : nullptr, grad ? &gp : nullptr, grad ? &gn : nullptr);
  if (grad) {
    if (grad->size() != model.params.size()) *grad = Eigen::VectorXd::Zero(model.params.size());
    backward(model, ca, ga, *grad);
    backward(model, cp, gp, *grad);
    backward(model, cn, gn, *grad);
  }
  return loss;
}

}  // namespace simtuple
