#pragma once

#include "simtuple/triplet.hpp"

#include <cstdint>
#include <optional>
#include <string>
#include <string_view>
#include <vector>

namespace simtuple {

enum class Strategy : std::uint8_t { random, nn, random_nn, active_nn, infotuple };

std::string_view to_string(Strategy s) noexcept;
Strategy strategy_from_string(std::string_view name);

/// A head scene and k-1 body scenes, as dataset indices.
struct TupleQuery {
  std::string id;
  std::size_t head = 0;
  std::vector<std::size_t> body;
  Strategy strategy = Strategy::random;
  std::uint64_t model_version = 0;
  std::int64_t created_at_ms = 0;
};

/// A body index, or no value for a skip.
struct TupleResponse {
  std::string query_id;
  std::optional<std::size_t> choice;
  double response_ms = 0.0;
  std::string annotator_id;

  bool skipped() const { return !choice.has_value(); }
};

/// Throws invalid_input unless the head is outside the body, the body has no
/// duplicates and every index is below `n_objects`.
void validate_query(const TupleQuery& q, std::size_t n_objects);

/// (head, chosen, other) for every other body element; empty for skips.
TripletSet decompose_response(const TupleQuery& query, const TupleResponse& response);

}  // namespace simtuple
