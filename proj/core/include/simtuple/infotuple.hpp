#pragma once

#include "simtuple/embedding_store.hpp"
#include "simtuple/posterior.hpp"
#include "simtuple/query.hpp"

#include <cstdint>
#include <vector>

namespace simtuple {

/// Marginal distribution of one head-body distance.
struct DistanceMarginal {
  enum class Kind : std::uint8_t { gaussian, two_point };
  Kind kind = Kind::gaussian;
  double mean = 0.0;
  double sd = 0.0;
  /// Two-point support: `lo` with probability `p_lo`, else `hi`.
  double lo = 0.0;
  double hi = 0.0;
  double p_lo = 0.5;

  static DistanceMarginal gaussian(double mean, double var);
  static DistanceMarginal two_point(double lo, double hi, double p_lo = 0.5);

  /// Inverse CDF at u in (0,1); Gaussian draws are clamped at zero.
  double quantile(double u) const;
};

enum class ResponseModel : std::uint8_t { top1, full_ranking };

struct MiEstimate {
  double mi = 0.0;
  /// Entropy of the averaged response distribution.
  double entropy_of_mean = 0.0;
  /// Average entropy of the per-sample response distributions.
  double mean_entropy = 0.0;
};

struct MiOptions {
  ResponseModel response = ResponseModel::top1;
  /// Fraction of the (k-1)! rankings enumerated by the full-ranking model.
  double ranking_subsample = 0.1;
};

/// Estimates below this are reported as exactly zero.
inline constexpr double kMiNoiseFloor = 1e-9;

/// Mutual information between the annotator's response and the distances,
/// estimated with `mc_passes` quasi-Monte Carlo draws of the body distances.
/// Clamped at zero. Throws invalid_input for mc_passes < 1.
MiEstimate infotuple_mi(const std::vector<DistanceMarginal>& body, double alpha, std::size_t mc_passes,
                        std::uint64_t seed, const MiOptions& opts = {});

struct InfoTupleConfig {
  std::size_t n_candidates = 100;
  std::size_t n_permutations = 10;
  std::size_t mc_passes = 10;
  double ranking_subsample = 0.1;
  ResponseModel response = ResponseModel::top1;
};

/// Candidate bodies drawn from the head's n_candidates nearest neighbors;
/// returns the body with the largest estimated MI (first on ties). When
/// `mi_out` is given it receives every candidate's estimate.
TupleQuery infotuple_select(const EmbeddingStore& store, std::uint64_t model_version,
                            const OrdinalPosterior& posterior, std::size_t head, std::size_t k,
                            const InfoTupleConfig& cfg, std::uint64_t seed, std::vector<double>* mi_out = nullptr);

}  // namespace simtuple
