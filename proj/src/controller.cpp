#include "dias/controller.hpp"

#include <cmath>

namespace dias::controller {

std::vector<int> find_local_maxima(const Eigen::VectorXd& mu_grid,
                                   const std::vector<bool>& cell_mask,
                                   const std::vector<bool>& exclusion_mask, const Domain& domain) {
  if (mu_grid.size() != domain.n_cells() ||
      cell_mask.size() != static_cast<std::size_t>(domain.n_cells()) ||
      exclusion_mask.size() != static_cast<std::size_t>(domain.n_cells()))
    throw std::invalid_argument("find_local_maxima: mask/grid shape mismatch");

  std::vector<int> maxima;
  for (int iy = 0; iy < domain.grid_ny; ++iy)
    for (int ix = 0; ix < domain.grid_nx; ++ix) {
      const int idx = domain.cell_index(ix, iy);
      if (!cell_mask[static_cast<std::size_t>(idx)]) continue;
      if (exclusion_mask[static_cast<std::size_t>(idx)]) continue;

      const double v = mu_grid[idx];
      bool strict_max = true;
      for (int dy = -1; dy <= 1 && strict_max; ++dy)
        for (int dx = -1; dx <= 1 && strict_max; ++dx) {
          if (dx == 0 && dy == 0) continue;
          const int jx = ix + dx;
          const int jy = iy + dy;
          if (jx < 0 || jx >= domain.grid_nx || jy < 0 || jy >= domain.grid_ny) continue;
          if (mu_grid[domain.cell_index(jx, jy)] >= v) strict_max = false;
        }
      if (strict_max) maxima.push_back(idx);
    }
  return maxima;
}

std::vector<bool> cell_mask_of(const Tessellation& tess, int robot_i) {
  std::vector<bool> mask(tess.cell_of_grid.size(), false);
  for (std::size_t idx = 0; idx < tess.cell_of_grid.size(); ++idx)
    mask[idx] = tess.cell_of_grid[idx] == robot_i;
  return mask;
}

std::vector<bool> exclusion_mask_of(std::span<const Vec2> centers, double radius,
                                    const Domain& domain) {
  std::vector<bool> mask(static_cast<std::size_t>(domain.n_cells()), false);
  if (centers.empty()) return mask;
  const double r2 = radius * radius;
  for (int idx = 0; idx < domain.n_cells(); ++idx) {
    const Vec2 c = domain.cell_center(idx);
    for (const Vec2& p : centers)
      if ((c - p).squared_norm() <= r2) {
        mask[static_cast<std::size_t>(idx)] = true;
        break;
      }
  }
  return mask;
}

std::optional<PotentialSource> identify_on_grids(const Eigen::VectorXd& mu_grid,
                                                 const Eigen::VectorXd& var_grid,
                                                 const std::vector<bool>& cell_mask,
                                                 const std::vector<bool>& exclusion_mask,
                                                 const Domain& domain,
                                                 const ControllerConfig& cfg) {
  const std::vector<int> candidates =
      find_local_maxima(mu_grid, cell_mask, exclusion_mask, domain);

  std::optional<PotentialSource> best;
  for (const int idx : candidates) {
    const double mu = mu_grid[idx];
    const double var = var_grid[idx];
    const double width = cfg.lcb_use_std ? std::sqrt(std::max(var, 0.0)) : var;
    const double lcb = mu - cfg.beta * width;
    // candidates arrive in grid-index order, so strict > keeps the lowest
    // index among ties
    if (!best || lcb > best->lcb)
      best = PotentialSource{idx, domain.cell_center(idx), mu, var, lcb};
  }
  if (best && best->lcb > cfg.tau) return best;
  return std::nullopt;
}

std::optional<PotentialSource> identify_potential_source(const gp::GpModel& model,
                                                         const Tessellation& tess, int robot_i,
                                                         std::span<const Vec2> found_sources,
                                                         const ControllerConfig& cfg) {
  const Domain& domain = tess.domain;
  std::vector<Vec2> centers(static_cast<std::size_t>(domain.n_cells()));
  for (int idx = 0; idx < domain.n_cells(); ++idx)
    centers[static_cast<std::size_t>(idx)] = domain.cell_center(idx);
  Eigen::VectorXd mu, var;
  model.predict(centers, mu, var);
  return identify_on_grids(mu, var, cell_mask_of(tess, robot_i),
                           exclusion_mask_of(found_sources, cfg.exclusion_radius, domain), domain,
                           cfg);
}

Vec2 source_seeking_step(const Vec2& position, const Vec2& q_target, double u_max,
                         const Domain& domain) {
  domain.require_inside(q_target, "source_seeking_step");
  const Vec2 delta = q_target - position;
  const double dist = delta.norm();
  if (dist < 1e-15) return {0.0, 0.0};
  const double step = std::min(u_max, dist);
  const Vec2 u{delta.x / dist * step, delta.y / dist * step};
  return domain.clamp(position + u) - position;
}

StepDecision controller_step(const WorldView& view, const ControllerConfig& cfg) {
  StepDecision decision;
  if (!view.force_sensing) {
    decision.target = identify_on_grids(view.mu_grid, view.var_grid, view.cell_mask,
                                        view.exclusion_mask, view.basis.domain(), cfg);
  }
  if (decision.target) {
    decision.mode = Mode::seeking;
    const Domain& domain = view.basis.domain();
    Vec2 goal = decision.target->position;
    if (cfg.probe_radius > 0.0 && distance(view.position, goal) <= cfg.probe_radius) {
      static constexpr double kDiag = 0.70710678118654752;
      static constexpr Vec2 kRing[8] = {{1.0, 0.0},   {kDiag, kDiag},   {0.0, 1.0},
                                        {-kDiag, kDiag}, {-1.0, 0.0},   {-kDiag, -kDiag},
                                        {0.0, -1.0},  {kDiag, -kDiag}};
      const Vec2& dir = kRing[((view.iteration % 8) + 8) % 8];
      goal = domain.clamp_margin({goal.x + cfg.probe_radius * dir.x,
                                  goal.y + cfg.probe_radius * dir.y},
                                 std::min(0.5 * domain.cell_dx(), 0.5 * domain.cell_dy()));
    }
    decision.command = source_seeking_step(view.position, goal, view.u_max, domain);
  } else {
    decision.mode = Mode::sensing;
    decision.command =
        ergodic::ergodic_control(view.basis, view.I_k_bar, view.c_k_bar, view.position, view.u_max);
  }
  return decision;
}

}  // namespace dias::controller
