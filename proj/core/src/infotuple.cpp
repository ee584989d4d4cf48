#include "simtuple/infotuple.hpp"

#include "simtuple/error.hpp"
#include "simtuple/qmc.hpp"

#include <boost/math/distributions/normal.hpp>

#include <algorithm>
#include <cmath>
#include <numeric>
#include <random>

namespace simtuple {

DistanceMarginal DistanceMarginal::gaussian(double mean, double var) {
  DistanceMarginal m;
  m.kind = Kind::gaussian;
  m.mean = mean;
  m.sd = std::sqrt(std::max(0.0, var));
  return m;
}

DistanceMarginal DistanceMarginal::two_point(double lo, double hi, double p_lo) {
  DistanceMarginal m;
  m.kind = Kind::two_point;
  m.lo = lo;
  m.hi = hi;
  m.p_lo = p_lo;
  return m;
}

double DistanceMarginal::quantile(double u) const {
  if (kind == Kind::two_point) return u < p_lo ? lo : hi;
  if (sd <= 0.0) return std::max(0.0, mean);
  static const boost::math::normal_distribution<double> standard;
  return std::max(0.0, mean + sd * boost::math::quantile(standard, u));
}

namespace {

double entropy(const std::vector<double>& p) {
  double h = 0.0;
  for (double v : p)
    if (v > 0.0) h -= v * std::log(v);
  return h;
}

// log tste_kernel(d) up to the shared constant.
double log_kernel(double d, double alpha) { return -(alpha + 1.0) / 2.0 * std::log1p(d * d / alpha); }

void top1_probs(const std::vector<double>& d, double alpha, std::vector<double>& p) {
  p.resize(d.size());
  double top = -std::numeric_limits<double>::infinity();
  for (std::size_t i = 0; i < d.size(); ++i) top = std::max(top, p[i] = log_kernel(d[i], alpha));
  double z = 0.0;
  for (auto& v : p) z += (v = std::exp(v - top));
  for (auto& v : p) v /= z;
}

// Plackett-Luce probabilities of a fixed ranking subset, renormalized.
void ranking_probs(const std::vector<double>& d, double alpha, const std::vector<std::vector<std::uint8_t>>& rankings,
                   std::vector<double>& p) {
  std::vector<double> w(d.size());
  top1_probs(d, alpha, w);
  p.resize(rankings.size());
  double z = 0.0;
  for (std::size_t r = 0; r < rankings.size(); ++r) {
    double rest = 1.0, prob = 1.0;
    for (auto i : rankings[r]) {
      prob *= rest > 0.0 ? w[i] / rest : 0.0;
      rest -= w[i];
    }
    z += (p[r] = prob);
  }
  if (z > 0.0)
    for (auto& v : p) v /= z;
}

std::vector<std::vector<std::uint8_t>> ranking_subset(std::size_t n, double fraction, std::uint64_t seed) {
  require(n <= 10, "infotuple_mi: full-ranking responses support at most 10 body elements");
  std::vector<std::uint8_t> perm(n);
  std::iota(perm.begin(), perm.end(), std::uint8_t{0});
  std::vector<std::vector<std::uint8_t>> all;
  do all.push_back(perm);
  while (std::next_permutation(perm.begin(), perm.end()));
  const auto keep = std::max<std::size_t>(
      1, static_cast<std::size_t>(std::ceil(std::clamp(fraction, 0.0, 1.0) * static_cast<double>(all.size()))));
  if (keep >= all.size()) return all;
  std::mt19937_64 rng(seed ^ 0x5851f42d4c957f2dULL);
  std::shuffle(all.begin(), all.end(), rng);
  all.resize(keep);
  std::sort(all.begin(), all.end());
  return all;
}

}  // namespace

MiEstimate infotuple_mi(const std::vector<DistanceMarginal>& body, double alpha, std::size_t mc_passes,
                        std::uint64_t seed, const MiOptions& opts) {
  require(mc_passes >= 1, "infotuple_mi: mc_passes must be at least 1");
  require(!body.empty(), "infotuple_mi: empty body");
  require(alpha > 0.0, "infotuple_mi: alpha must be positive");

  std::vector<std::vector<std::uint8_t>> rankings;
  if (opts.response == ResponseModel::full_ranking) rankings = ranking_subset(body.size(), opts.ranking_subsample, seed);

  const auto points = rank_stratified_sobol(body.size(), mc_passes, seed);
  std::vector<double> d(body.size()), p, mean_p;
  double mean_h = 0.0;
  for (const auto& u : points) {
    for (std::size_t i = 0; i < body.size(); ++i) d[i] = body[i].quantile(u[i]);
    if (opts.response == ResponseModel::top1)
      top1_probs(d, alpha, p);
    else
      ranking_probs(d, alpha, rankings, p);
    if (mean_p.empty()) mean_p.assign(p.size(), 0.0);
    for (std::size_t r = 0; r < p.size(); ++r) mean_p[r] += p[r];
    mean_h += entropy(p);
  }
  const double inv = 1.0 / static_cast<double>(mc_passes);
  for (auto& v : mean_p) v *= inv;
  MiEstimate est;
  est.entropy_of_mean = entropy(mean_p);
  est.mean_entropy = mean_h * inv;
  // Differences at rounding level count as no information, so equal bodies tie exactly.
  const double diff = est.entropy_of_mean - est.mean_entropy;
  est.mi = diff > kMiNoiseFloor ? diff : 0.0;
  return est;
}

TupleQuery infotuple_select(const EmbeddingStore& store, std::uint64_t model_version,
                            const OrdinalPosterior& posterior, std::size_t head, std::size_t k,
                            const InfoTupleConfig& cfg, std::uint64_t seed, std::vector<double>* mi_out) {
  store.require_version(model_version);
  if (!posterior.has_stats()) fail(ErrorCode::posterior_not_ready, "infotuple_select: posterior has no distance statistics");
  require(posterior.size() == store.size(), "infotuple_select: posterior and dataset differ in size");
  require(head < store.size(), "infotuple_select: head out of range");
  require(k >= 2 && cfg.n_permutations >= 1, "infotuple_select: invalid configuration");
  const auto pool = store.knn(head, std::max(cfg.n_candidates, k - 1));
  require(pool.size() >= k - 1, "infotuple_select: candidate pool smaller than the body");

  std::mt19937_64 rng(seed);
  MiOptions opts{cfg.response, cfg.ranking_subsample};
  TupleQuery best;
  best.strategy = Strategy::infotuple;
  best.model_version = model_version;
  best.head = head;
  double best_mi = -1.0;
  if (mi_out) mi_out->clear();
  std::vector<std::size_t> shuffled = pool;
  std::vector<DistanceMarginal> marginals(k - 1);
  for (std::size_t c = 0; c < cfg.n_permutations; ++c) {
    for (std::size_t i = 0; i < k - 1; ++i) {
      std::uniform_int_distribution<std::size_t> pick(i, shuffled.size() - 1);
      std::swap(shuffled[i], shuffled[pick(rng)]);
    }
    std::vector<std::size_t> body(shuffled.begin(), shuffled.begin() + static_cast<std::ptrdiff_t>(k - 1));
    for (std::size_t i = 0; i < body.size(); ++i) {
      const auto m = posterior.stats(head, body[i]);
      marginals[i] = DistanceMarginal::gaussian(m.mean, m.var);
    }
    // Common random numbers across candidates sharpen the comparison.
    const double mi = infotuple_mi(marginals, posterior.alpha(), cfg.mc_passes, seed ^ 0x2545f4914f6cdd1dULL, opts).mi;
    if (mi_out) mi_out->push_back(mi);
    if (mi > best_mi) {
      best_mi = mi;
      best.body = std::move(body);
    }
  }
  return best;
}

}  // namespace simtuple
