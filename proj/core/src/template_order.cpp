#include "simtuple/template_order.hpp"

#include "simtuple/hungarian.hpp"

#include <cmath>
#include <numbers>
#include <numeric>

namespace simtuple {

std::vector<Eigen::Vector2d> template_slots(std::size_t n) {
  std::vector<Eigen::Vector2d> slots(n, Eigen::Vector2d::Zero());
  if (n <= 1) return slots;
  for (std::size_t j = 0; j < n; ++j) {
    const double angle = 2.0 * std::numbers::pi * static_cast<double>(j) / static_cast<double>(n);
    slots[j] = {std::cos(angle), std::sin(angle)};
  }
  return slots;
}

TemplateFit fit_template(const Scene& scene, const std::vector<std::size_t>& rows) {
  TemplateFit fit;
  const std::size_t n = rows.size();
  fit.order = rows;
  if (n == 0) return fit;

  std::vector<Eigen::Vector2d> means(n);
  for (std::size_t i = 0; i < n; ++i) {
    const auto r = static_cast<Eigen::Index>(rows[i]);
    means[i] = {scene.x.row(r).mean(), scene.y.row(r).mean()};
    fit.center += means[i];
  }
  fit.center /= static_cast<double>(n);

  Eigen::Vector2d var = Eigen::Vector2d::Zero();
  for (const auto& m : means) var += (m - fit.center).cwiseAbs2();
  var /= static_cast<double>(n);
  fit.scale = (2.0 * var).cwiseSqrt();

  if (n == 1 || fit.scale.maxCoeff() <= 1e-12) {
    fit.degenerate = (n > 1);
    return fit;
  }

  const auto unit = template_slots(n);
  Eigen::MatrixXd cost(static_cast<Eigen::Index>(n), static_cast<Eigen::Index>(n));
  for (std::size_t j = 0; j < n; ++j) {
    const Eigen::Vector2d slot = fit.center + unit[j].cwiseProduct(fit.scale);
    for (std::size_t i = 0; i < n; ++i)
      cost(static_cast<Eigen::Index>(j), static_cast<Eigen::Index>(i)) = (means[i] - slot).norm();
  }
  // Exact ties resolve toward lower input rows in lower slots.
  const double eps = 1e-12 * (1.0 + cost.maxCoeff());
  for (std::size_t j = 0; j < n; ++j)
    for (std::size_t i = 0; i < n; ++i)
      cost(static_cast<Eigen::Index>(j), static_cast<Eigen::Index>(i)) -=
          eps * static_cast<double>(i * j) / static_cast<double>(n * n);

  const Assignment a = hungarian_assign(cost);
  for (std::size_t j = 0; j < n; ++j) fit.order[j] = rows[a.perm[j]];
  return fit;
}

TemplateOrdering template_order(const Scene& scene) {
  TemplateOrdering out;
  out.possession = fit_template(scene, scene.rows_with(Role::possession));
  out.defending = fit_template(scene, scene.rows_with(Role::defending));
  out.order = out.possession.order;
  out.order.insert(out.order.end(), out.defending.order.begin(), out.defending.order.end());
  for (std::size_t r : scene.rows_with(Role::ball)) out.order.push_back(r);
  return out;
}

}  // namespace simtuple
