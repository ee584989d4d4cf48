#include "simtuple/qmc.hpp"

#include "simtuple/error.hpp"

#include <boost/random/sobol.hpp>

#include <algorithm>
#include <numeric>
#include <random>

namespace simtuple {

struct ShiftedSobol::Engine {
  explicit Engine(std::size_t dim) : sobol(dim) {}
  boost::random::sobol sobol;
};

ShiftedSobol::ShiftedSobol(std::size_t dim, std::uint64_t seed)
    : shift_(dim), raw_(dim, 0), engine_(std::make_shared<Engine>(dim)) {
  require(dim >= 1, "ShiftedSobol: dimension must be positive");
  std::mt19937_64 rng(seed);
  for (auto& s : shift_) s = rng();
}

void ShiftedSobol::next(std::vector<double>& u) {
  u.resize(shift_.size());
  // Boost starts after the origin; emit the origin first to keep the
  // 2^k-point stratification aligned.
  if (index_ > 0)
    for (auto& r : raw_) r = engine_->sobol();
  ++index_;
  for (std::size_t k = 0; k < shift_.size(); ++k)
    u[k] = (static_cast<double>((raw_[k] ^ shift_[k]) >> 11) + 0.5) * 0x1.0p-53;
}

std::vector<std::vector<double>> rank_stratified_sobol(std::size_t dim, std::size_t n, std::uint64_t seed) {
  ShiftedSobol qmc(dim, seed);
  std::vector<std::vector<double>> pts(n);
  for (auto& p : pts) qmc.next(p);
  std::vector<std::size_t> order(n);
  for (std::size_t k = 0; k < dim; ++k) {
    std::iota(order.begin(), order.end(), std::size_t{0});
    std::stable_sort(order.begin(), order.end(), [&](std::size_t a, std::size_t b) { return pts[a][k] < pts[b][k]; });
    for (std::size_t r = 0; r < n; ++r)
      pts[order[r]][k] = (static_cast<double>(r) + 0.5) / static_cast<double>(n);
  }
  return pts;
}

}  // namespace simtuple
