#include "dias/sim.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <numeric>
#include <stdexcept>

#include "dias/rng.hpp"

namespace dias {

std::string to_string(Algorithm a) { return a == Algorithm::dias ? "dias" : "greedybo"; }

Algorithm algorithm_from_string(const std::string& s) {
  if (s == "dias") return Algorithm::dias;
  if (s == "greedybo") return Algorithm::greedybo;
  throw std::invalid_argument("unknown algorithm '" + s + "' (expected dias|greedybo)");
}

std::string to_string(RobotMode m) {
  switch (m) {
    case RobotMode::sensing: return "sensing";
    case RobotMode::seeking: return "seeking";
    case RobotMode::greedy: return "greedy";
  }
  return "sensing";
}

RobotMode robot_mode_from_string(const std::string& s) {
  if (s == "sensing") return RobotMode::sensing;
  if (s == "seeking") return RobotMode::seeking;
  if (s == "greedy") return RobotMode::greedy;
  throw std::invalid_argument("unknown robot mode '" + s + "'");
}

void SimConfig::validate() const {
  domain.validate();
  if (n_robots < 1) throw std::invalid_argument("SimConfig: n_robots must be >= 1");
  if (sources.fixed.empty() && (!sources.random || sources.random->count < 1))
    throw std::invalid_argument("SimConfig: at least one source required");
  if (found_radius <= 0.0) throw std::invalid_argument("SimConfig: found_radius must be > 0");
  if (u_max <= 0.0) throw std::invalid_argument("SimConfig: u_max must be > 0");
  if (k_max < 1) throw std::invalid_argument("SimConfig: k_max must be >= 1");
  if (consensus_rounds < 1) throw std::invalid_argument("SimConfig: consensus_rounds must be >= 1");
  if (noise_std < 0.0) throw std::invalid_argument("SimConfig: noise_std must be >= 0");
  if (max_iterations < 1) throw std::invalid_argument("SimConfig: max_iterations must be >= 1");
  if (min_iterations < 0 || min_iterations > max_iterations)
    throw std::invalid_argument("SimConfig: min_iterations must lie in [0, max_iterations]");
  if (warmup_iterations < 0) throw std::invalid_argument("SimConfig: warmup_iterations must be >= 0");
  if (gp.train_every < 0) throw std::invalid_argument("SimConfig: gp.train_every must be >= 0");
  if (gp.restarts < 1) throw std::invalid_argument("SimConfig: gp.restarts must be >= 1");
  gp.init.validate();
  controller.validate(found_radius);
  if (!(init_region[0] <= init_region[1] && init_region[2] <= init_region[3]))
    throw std::invalid_argument("SimConfig: degenerate init_region");
  for (const Vec2& p : initial_positions) domain.require_inside(p, "SimConfig initial position");
  if (!initial_positions.empty() && static_cast<int>(initial_positions.size()) != n_robots)
    throw std::invalid_argument("SimConfig: initial_positions count must match n_robots");
  if (sources.random) {
    const auto& r = *sources.random;
    if (r.intensity_lo <= 0.0 || r.intensity_hi < r.intensity_lo)
      throw std::invalid_argument("SimConfig: bad intensity range");
    if (r.spread <= 0.0) throw std::invalid_argument("SimConfig: spread must be > 0");
    if (r.margin < 0.0 || 2.0 * r.margin >= std::min(domain.width, domain.height))
      throw std::invalid_argument("SimConfig: margin leaves no room for sources");
  }
}

int greedy_target_index(const Eigen::VectorXd& mu_grid, const Eigen::VectorXd& var_grid,
                        const std::vector<bool>& cell_mask) {
  if (mu_grid.size() != var_grid.size() ||
      cell_mask.size() != static_cast<std::size_t>(mu_grid.size()))
    throw std::invalid_argument("greedy_target_index: shape mismatch");
  int best = -1;
  double best_v = -std::numeric_limits<double>::infinity();
  for (Eigen::Index idx = 0; idx < mu_grid.size(); ++idx) {
    if (!cell_mask[static_cast<std::size_t>(idx)]) continue;
    const double v = mu_grid[idx] + 3.0 * std::sqrt(std::max(var_grid[idx], 0.0));
    if (v > best_v) {  // strict: ties keep the lowest grid index
      best_v = v;
      best = static_cast<int>(idx);
    }
  }
  if (best < 0) throw std::invalid_argument("greedy_target_index: empty cell mask");
  return best;
}

Simulation::Simulation(SimConfig cfg)
    : cfg_(std::move(cfg)), basis_(cfg_.domain, std::max(cfg_.k_max, 1)) {
  cfg_.validate();
  materialize_scenario();

  field_.domain = cfg_.domain;
  field_.sources = cfg_.sources.fixed;
  field_.validate();
  phi_grid_ = field_on_grid(field_);
  sensor_ = std::make_unique<MeasurementModel>(cfg_.noise_std, cfg_.seed, cfg_.n_robots);

  robots_.resize(static_cast<std::size_t>(cfg_.n_robots));
  for (int i = 0; i < cfg_.n_robots; ++i) {
    RobotState& r = robots_[static_cast<std::size_t>(i)];
    r.id = i;
    r.position = cfg_.initial_positions[static_cast<std::size_t>(i)];
    r.theta = cfg_.gp.init;
    r.stats = ergodic::TrajectoryStats::zero(basis_);
  }

  found_.assign(field_.sources.size(), false);
  // The found criterion applies to sampling locations, and the starting
  // positions are the first ones.
  for (int i = 0; i < cfg_.n_robots; ++i)
    for (int j : check_found(field_.sources, found_, robots_[static_cast<std::size_t>(i)].position,
                             cfg_.found_radius)) {
      found_[static_cast<std::size_t>(j)] = true;
      ++found_count_;
      found_events_.push_back({j, i, 0});
    }

  phase_order_.resize(static_cast<std::size_t>(cfg_.n_robots));
  std::iota(phase_order_.begin(), phase_order_.end(), 0);

  grid_centers_.resize(static_cast<std::size_t>(cfg_.domain.n_cells()));
  for (int idx = 0; idx < cfg_.domain.n_cells(); ++idx)
    grid_centers_[static_cast<std::size_t>(idx)] = cfg_.domain.cell_center(idx);
  grids_.reserve(static_cast<std::size_t>(cfg_.n_robots));
  for (int i = 0; i < cfg_.n_robots; ++i) grids_.emplace_back(grid_centers_, cfg_.gp.init);
  eid_coeffs_.assign(static_cast<std::size_t>(cfg_.n_robots),
                     Eigen::VectorXd::Zero(basis_.n_modes()));
}

void Simulation::materialize_scenario() {
  if (cfg_.sources.fixed.empty()) {
    const RandomSourceSpec& spec = *cfg_.sources.random;
    const double x_lo = spec.margin, x_hi = cfg_.domain.width - spec.margin;
    const double y_lo = spec.margin, y_hi = cfg_.domain.height - spec.margin;
    Rng rng(cfg_.seed, StreamTag::source_layout);

    std::vector<Source> placed;
    long attempts = 0;
    const long cap = 200000L * spec.count;
    while (static_cast<int>(placed.size()) < spec.count) {
      if (++attempts > cap)
        throw std::runtime_error(
            "materialize_scenario: could not place sources with the requested separation");
      const Vec2 p{rng.uniform(x_lo, x_hi), rng.uniform(y_lo, y_hi)};
      bool ok = true;
      for (const Source& s : placed)
        if (distance(p, s.position) < spec.min_separation) {
          ok = false;
          break;
        }
      if (!ok) {
        // a cramped partial layout can become unplaceable; restart it
        if (attempts % 5000 == 0) placed.clear();
        continue;
      }
      placed.push_back({p, rng.uniform(spec.intensity_lo, spec.intensity_hi), spec.spread});
    }
    cfg_.sources.fixed = std::move(placed);
  }

  if (cfg_.initial_positions.empty()) {
    Rng rng(cfg_.seed, StreamTag::initial_positions);
    const double x_lo = std::max(0.0, cfg_.init_region[0]);
    const double x_hi = std::min(cfg_.domain.width, cfg_.init_region[1]);
    const double y_lo = std::max(0.0, cfg_.init_region[2]);
    const double y_hi = std::min(cfg_.domain.height, cfg_.init_region[3]);
    for (int i = 0; i < cfg_.n_robots; ++i) {
      Vec2 p;
      do {
        p = {rng.uniform(x_lo, x_hi), rng.uniform(y_lo, y_hi)};
      } while (std::any_of(cfg_.initial_positions.begin(), cfg_.initial_positions.end(),
                           [&](const Vec2& q) { return distance(p, q) < 1e-6; }));
      cfg_.initial_positions.push_back(p);
    }
  }
}

bool Simulation::finished() const {
  if (iteration_ >= cfg_.max_iterations) return true;
  return all_found() && iteration_ >= cfg_.min_iterations;
}

void Simulation::set_phase_order(std::vector<int> order) {
  if (static_cast<int>(order.size()) != cfg_.n_robots)
    throw std::invalid_argument("set_phase_order: order must list every robot once");
  phase_order_ = std::move(order);
}

void Simulation::robot_compute_phase(int i, const Tessellation&, int t) {
  RobotState& r = robots_[static_cast<std::size_t>(i)];
  gp::GridPosterior& grid = grids_[static_cast<std::size_t>(i)];
  const Vec2 x = r.position;
  r.trajectory.push_back(x);

  const double yt = sensor_->sample(field_, x, i);
  r.dataset_x.push_back(x);
  r.dataset_y.push_back(yt);
  // append returns the posterior variance at x under the pre-update model;
  // that is the information-gain increment for gamma
  const double var_here = grid.append(x, yt);

  const bool dias_mode = cfg_.algorithm == Algorithm::dias;
  if (dias_mode) ergodic::update_trajectory_stats(r.stats, basis_, x, 1.0);

  if (cfg_.gp.train_every > 0 && r.dataset_x.size() >= 2 && t % cfg_.gp.train_every == 0) {
    const Eigen::Map<const Eigen::VectorXd> y(r.dataset_y.data(),
                                              static_cast<Eigen::Index>(r.dataset_y.size()));
    r.theta = gp::train(r.dataset_x, y, r.theta, cfg_.gp.bounds, cfg_.gp.restarts).theta;
    grid.reset(r.theta);
    for (std::size_t k = 0; k < r.dataset_x.size(); ++k)
      grid.append(r.dataset_x[k], r.dataset_y[k]);
  }
  r.mu_grid = grid.mu();
  r.var_grid = grid.var();

  if (dias_mode) {
    const auto eid =
        ergodic::compute_eid(r.mu_grid, r.var_grid, r.gamma, cfg_.controller.alpha);
    eid_coeffs_[static_cast<std::size_t>(i)] = ergodic::fourier_coeffs_of_field(
        ergodic::normalize_density(eid.I_grid, cfg_.domain), basis_);
    r.gamma = ergodic::update_gamma(r.gamma, var_here);
  }
}

IterationRecord Simulation::step() {
  if (finished()) throw std::logic_error("Simulation::step: run already finished");
  const int t = iteration_ + 1;
  const int n = cfg_.n_robots;
  const bool dias_mode = cfg_.algorithm == Algorithm::dias;

  std::vector<Vec2> positions(static_cast<std::size_t>(n));
  for (int i = 0; i < n; ++i) positions[static_cast<std::size_t>(i)] = robots_[static_cast<std::size_t>(i)].position;
  const Tessellation tess = update_voronoi(positions, cfg_.domain);

  std::vector<Vec2> found_positions;
  for (std::size_t j = 0; j < found_.size(); ++j)
    if (found_[j]) found_positions.push_back(field_.sources[j].position);
  const std::vector<bool> exclusion =
      controller::exclusion_mask_of(found_positions, cfg_.controller.exclusion_radius, cfg_.domain);

  // Phase 1: sampling, estimation, EID coefficients (per robot, any order).
  for (int i : phase_order_) robot_compute_phase(i, tess, t);

  // Phase 2: consensus exchange at the barrier.
  std::vector<Eigen::VectorXd> I_bars, c_bars;
  if (dias_mode) {
    std::vector<Eigen::VectorXd> c_local(static_cast<std::size_t>(n));
    for (int i = 0; i < n; ++i) c_local[static_cast<std::size_t>(i)] = robots_[static_cast<std::size_t>(i)].stats.coeffs;
    I_bars = ergodic::consensus_round(eid_coeffs_, tess.adjacency, cfg_.consensus_rounds);
    c_bars = ergodic::consensus_round(c_local, tess.adjacency, cfg_.consensus_rounds);
  }

  // Phase 3: control decisions from the iteration snapshot.
  std::vector<Vec2> commands(static_cast<std::size_t>(n));
  std::vector<RobotMode> modes(static_cast<std::size_t>(n), RobotMode::sensing);
  for (int i : phase_order_) {
    const RobotState& r = robots_[static_cast<std::size_t>(i)];
    const std::vector<bool> cell_mask = controller::cell_mask_of(tess, i);
    if (!dias_mode) {
      const int target = greedy_target_index(r.mu_grid, r.var_grid, cell_mask);
      commands[static_cast<std::size_t>(i)] = controller::source_seeking_step(
          r.position, cfg_.domain.cell_center(target), cfg_.u_max, cfg_.domain);
      modes[static_cast<std::size_t>(i)] = RobotMode::greedy;
    } else {
      const controller::WorldView view{r.mu_grid,
                                       r.var_grid,
                                       cell_mask,
                                       exclusion,
                                       basis_,
                                       I_bars[static_cast<std::size_t>(i)],
                                       c_bars[static_cast<std::size_t>(i)],
                                       r.position,
                                       cfg_.u_max,
                                       t,
                                       t <= cfg_.warmup_iterations};
      const auto decision = controller::controller_step(view, cfg_.controller);
      commands[static_cast<std::size_t>(i)] = decision.command;
      modes[static_cast<std::size_t>(i)] =
          decision.mode == controller::Mode::seeking ? RobotMode::seeking : RobotMode::sensing;
    }
  }

  // Phase 4: dynamics, then found bookkeeping at the synchronization point.
  for (int i = 0; i < n; ++i) {
    RobotState& r = robots_[static_cast<std::size_t>(i)];
    r.mode = modes[static_cast<std::size_t>(i)];
    r.position = cfg_.domain.clamp(r.position + commands[static_cast<std::size_t>(i)]);
  }

  IterationRecord rec;
  rec.iteration = t;
  rec.positions = positions;
  rec.modes = modes;
  rec.commands = commands;
  for (int i = 0; i < n; ++i)
    for (int j : check_found(field_.sources, found_, robots_[static_cast<std::size_t>(i)].position,
                             cfg_.found_radius)) {
      found_[static_cast<std::size_t>(j)] = true;
      ++found_count_;
      found_events_.push_back({j, i, t});
      rec.newly_found.push_back(j);
    }
  rec.found_total = found_count_;

  std::vector<Eigen::VectorXd> mu_grids(static_cast<std::size_t>(n));
  rec.wrmse_robot.resize(static_cast<std::size_t>(n));
  for (int i = 0; i < n; ++i) {
    mu_grids[static_cast<std::size_t>(i)] = robots_[static_cast<std::size_t>(i)].mu_grid;
    rec.wrmse_robot[static_cast<std::size_t>(i)] =
        metrics::wrmse(robots_[static_cast<std::size_t>(i)].mu_grid, phi_grid_);
  }
  rec.wrmse_pooled = metrics::pooled_wrmse_grids(mu_grids, tess, phi_grid_);

  if (dias_mode) {
    Eigen::VectorXd I_mean = Eigen::VectorXd::Zero(basis_.n_modes());
    Eigen::VectorXd c_mean = Eigen::VectorXd::Zero(basis_.n_modes());
    for (int i = 0; i < n; ++i) {
      I_mean += eid_coeffs_[static_cast<std::size_t>(i)];
      c_mean += robots_[static_cast<std::size_t>(i)].stats.coeffs;
    }
    rec.ergodic_metric = ergodic::ergodic_metric(basis_, I_mean / n, c_mean / n);
  }

  iteration_ = t;
  return rec;
}

RunResult run(const SimConfig& cfg) {
  Simulation sim(cfg);
  RunResult out;
  out.config = sim.config();
  while (!sim.finished()) out.records.push_back(sim.step());

  out.found_events = sim.found_events();
  out.summary.iterations_run = sim.iteration();
  out.summary.n_sources = static_cast<int>(sim.field().sources.size());
  out.summary.found_total = static_cast<int>(
      std::count(sim.found().begin(), sim.found().end(), true));
  out.summary.dnf = !sim.all_found();
  if (sim.all_found()) {
    int last = 0;
    for (const FoundEvent& e : out.found_events) last = std::max(last, e.iteration);
    out.summary.iterations_to_all_found = last;
  }
  if (!out.records.empty()) out.summary.final_wrmse_pooled = out.records.back().wrmse_pooled;
  return out;
}

BatchResult run_batch(const SimConfig& config_template, int n_trials,
                      std::span<const std::uint64_t> seeds) {
  if (n_trials < 1) throw std::invalid_argument("run_batch: n_trials must be >= 1");
  if (static_cast<int>(seeds.size()) < n_trials)
    throw std::invalid_argument("run_batch: need one seed per trial");

  BatchResult out;
  out.trials.reserve(static_cast<std::size_t>(n_trials));
  for (int k = 0; k < n_trials; ++k) {
    SimConfig cfg = config_template;
    cfg.seed = seeds[static_cast<std::size_t>(k)];
    out.seeds.push_back(cfg.seed);
    out.trials.push_back(run(cfg));
  }

  double sum = 0.0;
  for (const RunResult& trial : out.trials) {
    const double v = trial.summary.iterations_to_all_found
                         ? static_cast<double>(*trial.summary.iterations_to_all_found)
                         : static_cast<double>(config_template.max_iterations);
    if (trial.summary.dnf) ++out.dnf_count;
    sum += v;
  }
  out.mean_iterations = sum / n_trials;
  if (n_trials > 1) {
    double ss = 0.0;
    for (const RunResult& trial : out.trials) {
      const double v = trial.summary.iterations_to_all_found
                           ? static_cast<double>(*trial.summary.iterations_to_all_found)
                           : static_cast<double>(config_template.max_iterations);
      ss += (v - out.mean_iterations) * (v - out.mean_iterations);
    }
    out.std_iterations = std::sqrt(ss / (n_trials - 1));
  }
  return out;
}

}  // namespace dias
