#pragma once

#include <span>
#include <vector>

#include <Eigen/Core>

#include "dias/gp.hpp"
#include "dias/voronoi.hpp"

namespace dias::metrics {

/// WRMSE = sqrt( mean_i [ (mu_i - phi_i)^2 (phi_i - min phi)/(max phi - min phi) ] ).
/// Errors in high-density regions dominate; a constant phi grid leaves the
/// weight undefined and is rejected.
double wrmse(const Eigen::VectorXd& mu_grid, const Eigen::VectorXd& phi_grid);

/// WRMSE of the composite estimate that takes each grid cell's value from
/// its Voronoi owner's mean grid.
double pooled_wrmse_grids(std::span<const Eigen::VectorXd> mu_grids, const Tessellation& tess,
                          const Eigen::VectorXd& phi_grid);

/// Same, predicting each owner's grid from its GP model.
double pooled_wrmse(std::span<const gp::GpModel> models, const Tessellation& tess,
                    const Eigen::VectorXd& phi_grid);

}  // namespace dias::metrics
