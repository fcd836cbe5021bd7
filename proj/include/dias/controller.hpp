#pragma once

#include <optional>
#include <span>
#include <vector>

#include <Eigen/Core>

#include "dias/ergodic.hpp"
#include "dias/geometry.hpp"
#include "dias/gp.hpp"
#include "dias/voronoi.hpp"

namespace dias::controller {

struct ControllerConfig {
  double beta = 5.0;             // LCB width; applied to the variance as printed
  double tau = 0.08;             // identification threshold
  double exclusion_radius = 0.8; // masked disk around found sources
  double alpha = 1.0;            // EID exploration coefficient
  double probe_radius = 0.3;     // orbit radius around an unconfirmed candidate (0 = park on it)
  bool lcb_use_std = false;      // optional sigma form of the LCB

  void validate(double found_radius) const {
    if (beta < 0.0) throw std::invalid_argument("ControllerConfig: beta must be >= 0");
    if (tau <= 0.0) throw std::invalid_argument("ControllerConfig: tau must be > 0");
    if (exclusion_radius < found_radius)
      throw std::invalid_argument("ControllerConfig: exclusion_radius must be >= found radius d");
    if (probe_radius < 0.0)
      throw std::invalid_argument("ControllerConfig: probe_radius must be >= 0");
  }
};

/// Candidate source: a local maximum of the posterior mean inside the
/// robot's cell, scored by LCB = mu - beta * sigma^2.
struct PotentialSource {
  int grid_idx = -1;
  Vec2 position;
  double mu = 0.0;
  double var = 0.0;
  double lcb = 0.0;
};

enum class Mode { sensing, seeking };

/// Strict local maxima of mu over the 8-neighborhood, restricted to cells
/// inside cell_mask and outside exclusion_mask. Border cells compare
/// whatever neighbors exist. Returned in grid-index order.
std::vector<int> find_local_maxima(const Eigen::VectorXd& mu_grid,
                                   const std::vector<bool>& cell_mask,
                                   const std::vector<bool>& exclusion_mask, const Domain& domain);

/// Grid cells owned by robot_i.
std::vector<bool> cell_mask_of(const Tessellation& tess, int robot_i);

/// Grid cells within radius of any of the given points.
std::vector<bool> exclusion_mask_of(std::span<const Vec2> centers, double radius,
                                    const Domain& domain);

/// LCB candidate selection on precomputed posterior grids. Returns the
/// candidate with the highest LCB (ties go to the lowest grid index), or
/// nothing when no local maximum clears tau.
std::optional<PotentialSource> identify_on_grids(const Eigen::VectorXd& mu_grid,
                                                 const Eigen::VectorXd& var_grid,
                                                 const std::vector<bool>& cell_mask,
                                                 const std::vector<bool>& exclusion_mask,
                                                 const Domain& domain, const ControllerConfig& cfg);

/// Convenience wrapper that evaluates the GP posterior on the domain grid.
/// found_sources are the shared discovered locations to exclude.
std::optional<PotentialSource> identify_potential_source(const gp::GpModel& model,
                                                         const Tessellation& tess, int robot_i,
                                                         std::span<const Vec2> found_sources,
                                                         const ControllerConfig& cfg);

/// Clamped proportional step: magnitude min(u_max, |q_target - x|) toward
/// the target. The domain is convex so the next position stays inside.
Vec2 source_seeking_step(const Vec2& position, const Vec2& q_target, double u_max,
                         const Domain& domain);

/// Everything one robot's controller reads for one iteration. Keeping the
/// decision a pure function of this snapshot is what makes iterations
/// replayable and robots order-independent.
struct WorldView {
  const Eigen::VectorXd& mu_grid;
  const Eigen::VectorXd& var_grid;
  const std::vector<bool>& cell_mask;
  const std::vector<bool>& exclusion_mask;
  const ergodic::FourierBasis& basis;
  const Eigen::VectorXd& I_k_bar;  // consensus-averaged EID coefficients
  const Eigen::VectorXd& c_k_bar;  // consensus-averaged trajectory coefficients
  Vec2 position;
  double u_max = 0.5;
  int iteration = 0;           // phases the probe pattern; no other effect
  bool force_sensing = false;  // cold-start override
};

struct StepDecision {
  Mode mode = Mode::sensing;
  Vec2 command;
  std::optional<PotentialSource> target;
};

/// Hybrid switch: seek the best LCB candidate if one clears tau, otherwise
/// delegate to the ergodic controller. A seeking robot that has closed to
/// within probe_radius of a still-unconfirmed candidate orbits it on a ring
/// of that radius (eight compass points cycled by iteration) instead of
/// parking: a parked robot resamples a single spot, which can freeze a peak
/// estimate a little more than the found radius away from the true source.
StepDecision controller_step(const WorldView& view, const ControllerConfig& cfg);

}  // namespace dias::controller
