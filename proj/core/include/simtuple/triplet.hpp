#pragma once

#include <compare>
#include <cstddef>
#include <vector>

namespace simtuple {

/// Anchor, positive (judged more similar) and negative, as dataset indices.
struct Triplet {
  std::size_t a = 0;
  std::size_t p = 0;
  std::size_t n = 0;

  auto operator<=>(const Triplet&) const = default;
};

using TripletSet = std::vector<Triplet>;

}  // namespace simtuple
