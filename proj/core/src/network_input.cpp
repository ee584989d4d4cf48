#include "simtuple/network_input.hpp"

#include "simtuple/error.hpp"
#include "simtuple/template_order.hpp"

namespace simtuple {

std::size_t pooled_steps(std::size_t steps, std::size_t pool) {
  return pool <= 1 ? steps : (steps + pool - 1) / pool;
}

Eigen::MatrixXd network_input(const Scene& scene, const InputSpec& spec) {
  const auto order = template_order(scene).order;
  const auto T = static_cast<std::size_t>(scene.steps());
  const std::size_t pool = std::max<std::size_t>(spec.pool, 1);
  const std::size_t Tp = pooled_steps(T, pool);
  const double sx = 1.0 / spec.pitch.half_length(), sy = 1.0 / spec.pitch.half_width();

  Eigen::MatrixXd out(static_cast<Eigen::Index>(2 * order.size()), static_cast<Eigen::Index>(Tp));
  for (std::size_t s = 0; s < order.size(); ++s) {
    const auto r = static_cast<Eigen::Index>(order[s]);
    for (std::size_t c = 0; c < Tp; ++c) {
      const std::size_t lo = c * pool, hi = std::min(T, lo + pool);
      const auto n = static_cast<Eigen::Index>(hi - lo);
      const auto l = static_cast<Eigen::Index>(lo);
      out(static_cast<Eigen::Index>(2 * s), static_cast<Eigen::Index>(c)) = scene.x.row(r).segment(l, n).mean() * sx;
      out(static_cast<Eigen::Index>(2 * s + 1), static_cast<Eigen::Index>(c)) = scene.y.row(r).segment(l, n).mean() * sy;
    }
  }
  return out;
}

std::size_t Dataset::index_of(const std::string& id) const {
  const auto it = by_id.find(id);
  if (it == by_id.end()) fail(ErrorCode::not_found, "unknown scene id '" + id + "'");
  return it->second;
}

Dataset make_dataset(std::vector<Scene> scenes, const InputSpec& spec) {
  Dataset ds;
  ds.scenes = std::move(scenes);
  ds.inputs.reserve(ds.scenes.size());
  for (std::size_t i = 0; i < ds.scenes.size(); ++i) {
    const auto& s = ds.scenes[i];
    require(s.steps() == ds.scenes.front().steps() && s.agents() == ds.scenes.front().agents(),
            "dataset: scene '" + s.id + "' differs in shape from the first scene");
    require(ds.by_id.emplace(s.id, i).second, "dataset: duplicate scene id '" + s.id + "'");
    ds.inputs.push_back(network_input(s, spec));
  }
  return ds;
}

}  // namespace simtuple
