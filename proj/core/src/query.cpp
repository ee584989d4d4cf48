#include "simtuple/query.hpp"

#include "simtuple/error.hpp"

#include <algorithm>

namespace simtuple {

std::string_view to_string(Strategy s) noexcept {
  switch (s) {
    case Strategy::random: return "random";
    case Strategy::nn: return "nn";
    case Strategy::random_nn: return "random_nn";
    case Strategy::active_nn: return "active_nn";
    case Strategy::infotuple: return "infotuple";
  }
  return "random";
}

Strategy strategy_from_string(std::string_view name) {
  for (auto s : {Strategy::random, Strategy::nn, Strategy::random_nn, Strategy::active_nn, Strategy::infotuple})
    if (to_string(s) == name) return s;
  fail(ErrorCode::invalid_input, "unknown strategy '" + std::string(name) + "'");
}

void validate_query(const TupleQuery& q, std::size_t n_objects) {
  require(!q.body.empty(), "query: empty body");
  require(q.head < n_objects, "query: head out of range");
  auto body = q.body;
  std::sort(body.begin(), body.end());
  require(std::adjacent_find(body.begin(), body.end()) == body.end(), "query: duplicate body element");
  require(body.back() < n_objects, "query: body element out of range");
  require(!std::binary_search(body.begin(), body.end(), q.head), "query: head inside body");
}

TripletSet decompose_response(const TupleQuery& query, const TupleResponse& response) {
  if (response.skipped()) return {};
  const std::size_t i = *response.choice;
  require(i < query.body.size(), "decompose_response: choice out of range");
  TripletSet out;
  out.reserve(query.body.size() - 1);
  for (std::size_t j = 0; j < query.body.size(); ++j)
    if (j != i) out.push_back({query.head, query.body[i], query.body[j]});
  return out;
}

}  // namespace simtuple
