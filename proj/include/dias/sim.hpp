#pragma once

#include <array>
#include <cstdint>
#include <memory>
#include <optional>
#include <span>
#include <string>
#include <vector>

#include "dias/controller.hpp"
#include "dias/env_model.hpp"
#include "dias/ergodic.hpp"
#include "dias/geometry.hpp"
#include "dias/gp.hpp"
#include "dias/metrics.hpp"
#include "dias/voronoi.hpp"

namespace dias {

enum class Algorithm { dias, greedybo };

std::string to_string(Algorithm a);
Algorithm algorithm_from_string(const std::string& s);

struct GpConfig {
  gp::Hyperparams init{0.01, 0.1, 1.0};
  gp::HyperBounds bounds;
  int train_every = 5;  // full hyperparameter optimization cadence; refit happens every iteration
  int restarts = 3;
};

/// Randomized source layout: `count` sources with intensities uniform in
/// [intensity_lo, intensity_hi], pairwise at least min_separation apart,
/// at least `margin` from the boundary.
struct RandomSourceSpec {
  int count = 3;
  double intensity_lo = 0.16;
  double intensity_hi = 0.20;
  double spread = 1.0;
  double min_separation = 2.0;
  double margin = 1.0;
};

struct SourceSpec {
  std::vector<Source> fixed;                // used when non-empty
  std::optional<RandomSourceSpec> random;   // otherwise drawn per seed
};

struct SimConfig {
  Domain domain{10.0, 10.0, 50, 50};
  int n_robots = 3;
  std::vector<Vec2> initial_positions;      // empty -> drawn uniformly from init_region
  std::array<double, 4> init_region{0.5, 3.5, 0.5, 3.5};  // xmin, xmax, ymin, ymax
  SourceSpec sources;
  double noise_std = 0.01;
  Algorithm algorithm = Algorithm::dias;
  double found_radius = 0.4;                // d
  double u_max = 0.5;
  int k_max = 10;
  int consensus_rounds = 5;                 // t_c
  GpConfig gp;
  controller::ControllerConfig controller;
  int warmup_iterations = 3;                // forced-sensing cold start (DIAS)
  int max_iterations = 400;
  int min_iterations = 0;                   // keep stepping past all-found up to this iteration
  std::uint64_t seed = 0;
  std::string name;                         // scenario label for reports

  void validate() const;
};

enum class RobotMode { sensing, seeking, greedy };

std::string to_string(RobotMode m);
RobotMode robot_mode_from_string(const std::string& s);

struct RobotState {
  int id = 0;
  Vec2 position;
  std::vector<Vec2> trajectory;   // sampling locations, one per iteration
  std::vector<Vec2> dataset_x;
  std::vector<double> dataset_y;
  gp::Hyperparams theta;
  ergodic::TrajectoryStats stats;
  double gamma = 0.0;
  RobotMode mode = RobotMode::sensing;

  // posterior on the domain grid for the current iteration
  Eigen::VectorXd mu_grid;
  Eigen::VectorXd var_grid;
};

struct FoundEvent {
  int source = -1;
  int robot = -1;
  int iteration = 0;
};

struct IterationRecord {
  int iteration = 0;                 // 1-based
  std::vector<Vec2> positions;       // sampling locations x_i^t
  std::vector<RobotMode> modes;
  std::vector<Vec2> commands;
  std::vector<int> newly_found;      // source indices first reported this iteration
  int found_total = 0;
  std::vector<double> wrmse_robot;
  double wrmse_pooled = 0.0;
  double ergodic_metric = 0.0;       // team metric; 0 for GreedyBO
};

struct RunSummary {
  int iterations_run = 0;
  std::optional<int> iterations_to_all_found;  // empty => DNF
  bool dnf = false;
  int found_total = 0;
  int n_sources = 0;
  double final_wrmse_pooled = 0.0;
};

struct RunResult {
  SimConfig config;                  // with materialized sources / start positions
  RunSummary summary;
  std::vector<FoundEvent> found_events;
  std::vector<IterationRecord> records;
};

/// Grid-level GreedyBO target: argmax of mu + 3 sigma over the robot's cell
/// (ties to the lowest grid index).
int greedy_target_index(const Eigen::VectorXd& mu_grid, const Eigen::VectorXd& var_grid,
                        const std::vector<bool>& cell_mask);

/// Synchronous-round executor of the per-iteration loop for one trial.
class Simulation {
 public:
  explicit Simulation(SimConfig cfg);

  const SimConfig& config() const { return cfg_; }
  const ScalarField& field() const { return field_; }
  const Eigen::VectorXd& phi_grid() const { return phi_grid_; }
  const std::vector<RobotState>& robots() const { return robots_; }
  const std::vector<bool>& found() const { return found_; }
  const std::vector<FoundEvent>& found_events() const { return found_events_; }

  int iteration() const { return iteration_; }
  bool all_found() const { return found_count_ == static_cast<int>(field_.sources.size()); }
  bool finished() const;

  IterationRecord step();

  /// Test hook: robots' compute phases run in this order. Results must be
  /// identical for any permutation.
  void set_phase_order(std::vector<int> order);

 private:
  void materialize_scenario();
  void robot_compute_phase(int i, const Tessellation& tess, int t);

  SimConfig cfg_;
  ScalarField field_;
  Eigen::VectorXd phi_grid_;
  std::unique_ptr<MeasurementModel> sensor_;
  ergodic::FourierBasis basis_;
  std::vector<RobotState> robots_;
  std::vector<gp::GridPosterior> grids_;  // incremental per-robot posterior on the grid
  std::vector<bool> found_;
  int found_count_ = 0;
  std::vector<FoundEvent> found_events_;
  int iteration_ = 0;
  std::vector<int> phase_order_;

  // per-iteration scratch, sized once
  std::vector<Vec2> grid_centers_;
  std::vector<Eigen::VectorXd> eid_coeffs_;
};

RunResult run(const SimConfig& cfg);

struct BatchResult {
  std::vector<RunResult> trials;
  std::vector<std::uint64_t> seeds;
  double mean_iterations = 0.0;
  double std_iterations = 0.0;   // sample standard deviation (0 for a single trial)
  int dnf_count = 0;
};

/// Independent seeded trials of one config template; DNFs contribute
/// max_iterations to the aggregate and are flagged.
BatchResult run_batch(const SimConfig& config_template, int n_trials,
                      std::span<const std::uint64_t> seeds);

}  // namespace dias
