#pragma once

#include <cstdint>
#include <filesystem>
#include <string>
#include <vector>

#include <nlohmann/json.hpp>

#include "dias/sim.hpp"

namespace dias::io {

inline constexpr int kFormatVersion = 1;

/// Shortest representation that parses back to the exact same double
/// ("%.17g"); used for every floating-point value we persist.
std::string format_double(double v);
double parse_double(const std::string& s);

nlohmann::json config_to_json(const SimConfig& cfg);
SimConfig config_from_json(const nlohmann::json& j);

SimConfig load_config(const std::filesystem::path& path);
void save_config(const SimConfig& cfg, const std::filesystem::path& path);

/// Writes the full artifact for one trial into out_dir:
///   config.json                  exact (materialized) configuration
///   summary.txt                  key=value summary plus found events
///   records.csv                  iter,robot,x,y,mode,found_total,wrmse_pooled,ergodic_metric
///   wrmse_robots.csv             iter,robot,wrmse
///   trajectory_robot<i>.csv      iter,x,y,ux,uy,mode
/// Output is byte-stable for identical inputs.
void export_run(const RunResult& artifact, const std::filesystem::path& out_dir);

/// Inverse of export_run for everything the artifact format persists.
RunResult load_run(const std::filesystem::path& run_dir);

struct TrialStats {
  std::uint64_t seed = 0;
  int iterations = 0;  // iterations_to_all_found, or max_iterations when DNF
  bool dnf = false;
  double final_wrmse_pooled = 0.0;
};

struct SweepStats {
  std::string name;
  std::string algorithm;
  std::vector<TrialStats> trials;
  double mean_iterations = 0.0;
  double std_iterations = 0.0;
  int dnf_count = 0;
};

SweepStats stats_of(const BatchResult& batch);

/// Writes one trial directory per run (trial_<k>/...) plus trials.csv and
/// aggregate.txt at the sweep root.
void export_sweep(const BatchResult& batch, const std::filesystem::path& out_dir);

/// Reads a sweep directory back; aggregates are recomputed from the
/// per-trial summaries, not trusted from aggregate.txt.
SweepStats load_sweep(const std::filesystem::path& sweep_dir);

/// Mean pooled-WRMSE curve across a sweep's trials. Row i holds the mean over
/// all trials that reached iteration i+1 (and how many did).
struct WrmseCurve {
  std::vector<double> mean;
  std::vector<int> trials;
};
WrmseCurve wrmse_curve(const std::filesystem::path& sweep_dir);

}  // namespace dias::io
