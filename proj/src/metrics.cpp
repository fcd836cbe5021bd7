#include "dias/metrics.hpp"

#include <cmath>
#include <stdexcept>

namespace dias::metrics {

double wrmse(const Eigen::VectorXd& mu_grid, const Eigen::VectorXd& phi_grid) {
  if (mu_grid.size() != phi_grid.size() || phi_grid.size() == 0)
    throw std::invalid_argument("wrmse: grid shape mismatch");
  const double phi_min = phi_grid.minCoeff();
  const double phi_max = phi_grid.maxCoeff();
  if (phi_max <= phi_min)
    throw std::invalid_argument("wrmse: constant phi grid leaves the weight undefined");

  const double inv_range = 1.0 / (phi_max - phi_min);
  double acc = 0.0;
  for (Eigen::Index i = 0; i < phi_grid.size(); ++i) {
    const double r = mu_grid[i] - phi_grid[i];
    acc += r * r * (phi_grid[i] - phi_min) * inv_range;
  }
  return std::sqrt(acc / static_cast<double>(phi_grid.size()));
}

double pooled_wrmse_grids(std::span<const Eigen::VectorXd> mu_grids, const Tessellation& tess,
                          const Eigen::VectorXd& phi_grid) {
  if (mu_grids.size() != tess.generators.size())
    throw std::invalid_argument("pooled_wrmse: one mean grid per robot required");
  Eigen::VectorXd composite(phi_grid.size());
  for (Eigen::Index i = 0; i < phi_grid.size(); ++i)
    composite[i] = mu_grids[static_cast<std::size_t>(tess.owner(static_cast<int>(i)))][i];
  return wrmse(composite, phi_grid);
}

double pooled_wrmse(std::span<const gp::GpModel> models, const Tessellation& tess,
                    const Eigen::VectorXd& phi_grid) {
  const Domain& domain = tess.domain;
  std::vector<Vec2> centers(static_cast<std::size_t>(domain.n_cells()));
  for (int idx = 0; idx < domain.n_cells(); ++idx)
    centers[static_cast<std::size_t>(idx)] = domain.cell_center(idx);

  std::vector<Eigen::VectorXd> mu_grids(models.size());
  Eigen::VectorXd var;
  for (std::size_t i = 0; i < models.size(); ++i) models[i].predict(centers, mu_grids[i], var);
  return pooled_wrmse_grids(mu_grids, tess, phi_grid);
}

}  // namespace dias::metrics
