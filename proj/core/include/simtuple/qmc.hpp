#pragma once

#include <cstdint>
#include <memory>
#include <vector>

namespace simtuple {

/// Sobol points in [0,1)^dim with a random digital shift (XOR of every
/// coordinate with a seeded mask). The shift keeps the net's stratification,
/// so the first 2^k points still fill every dyadic box of the first k bits
/// equally.
class ShiftedSobol {
 public:
  ShiftedSobol(std::size_t dim, std::uint64_t seed);

  std::size_t dim() const { return shift_.size(); }
  /// Writes the next point into `u` (resized to dim).
  void next(std::vector<double>& u);

 private:
  struct Engine;
  std::vector<std::uint64_t> shift_;
  std::vector<std::uint64_t> raw_;
  std::uint64_t index_ = 0;
  std::shared_ptr<Engine> engine_;
};

/// The first `n` points of ShiftedSobol(dim, seed) with every coordinate
/// replaced by the midpoint of its rank, (rank + 0.5) / n. Each coordinate
/// then hits every 1/n stratum once for any n, while the joint ordering stays
/// that of the Sobol points. For n = 2^k the points fall in the same dyadic
/// boxes as before. Row i is point i.
std::vector<std::vector<double>> rank_stratified_sobol(std::size_t dim, std::size_t n, std::uint64_t seed);

}  // namespace simtuple
