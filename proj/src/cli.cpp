#include "dias/cli.hpp"

#include <cstdio>
#include <cstdlib>
#include <filesystem>
#include <fstream>
#include <map>
#include <stdexcept>
#include <string>
#include <vector>

#include <CLI11.hpp>

#include "dias/run_io.hpp"
#include "dias/sim.hpp"

namespace dias::io {

namespace fs = std::filesystem;

namespace {

fs::path out_root() {
  if (const char* env = std::getenv("DIAS_OUT_ROOT"); env && *env) return env;
  return "out";
}

std::string label_of(const SimConfig& cfg, const fs::path& config_path) {
  return cfg.name.empty() ? config_path.stem().string() : cfg.name;
}

int do_run(const fs::path& config_path, const CLI::Option* seed_opt, std::uint64_t seed,
           const std::string& algo, const fs::path& out_opt) {
  SimConfig cfg = load_config(config_path);
  if (seed_opt->count() > 0) cfg.seed = seed;
  if (!algo.empty()) cfg.algorithm = algorithm_from_string(algo);
  if (cfg.name.empty()) cfg.name = label_of(cfg, config_path);

  const fs::path dir =
      !out_opt.empty() ? out_opt
                       : out_root() / (cfg.name + "_" + to_string(cfg.algorithm) + "_seed" +
                                       std::to_string(cfg.seed));
  const RunResult result = run(cfg);
  export_run(result, dir);

  const RunSummary& s = result.summary;
  std::printf("%s seed=%llu iterations=%d found=%d/%d dnf=%d final_wrmse=%s\n",
              cfg.name.c_str(), static_cast<unsigned long long>(cfg.seed), s.iterations_run,
              s.found_total, s.n_sources, s.dnf ? 1 : 0,
              format_double(s.final_wrmse_pooled).c_str());
  std::printf("wrote %s\n", dir.string().c_str());
  return 0;
}

int do_sweep(const fs::path& config_path, int trials, const CLI::Option* seed_opt,
             std::uint64_t base_seed, const std::string& algo, const fs::path& out_opt) {
  SimConfig cfg = load_config(config_path);
  if (!algo.empty()) cfg.algorithm = algorithm_from_string(algo);
  if (cfg.name.empty()) cfg.name = label_of(cfg, config_path);
  const std::uint64_t base = seed_opt->count() > 0 ? base_seed : cfg.seed;

  std::vector<std::uint64_t> seeds(static_cast<std::size_t>(trials));
  for (int k = 0; k < trials; ++k) seeds[static_cast<std::size_t>(k)] = base + static_cast<std::uint64_t>(k);

  const fs::path dir = !out_opt.empty()
                           ? out_opt
                           : out_root() / ("sweep_" + cfg.name + "_" + to_string(cfg.algorithm));
  const BatchResult batch = run_batch(cfg, trials, seeds);
  export_sweep(batch, dir);

  for (std::size_t k = 0; k < batch.trials.size(); ++k) {
    const RunSummary& s = batch.trials[k].summary;
    std::printf("trial %zu: seed=%llu iterations=%s dnf=%d\n", k,
                static_cast<unsigned long long>(batch.seeds[k]),
                s.iterations_to_all_found ? std::to_string(*s.iterations_to_all_found).c_str()
                                          : "-",
                s.dnf ? 1 : 0);
  }
  std::printf("%s %s: mean=%.2f std=%.2f dnf=%d/%d\n", cfg.name.c_str(),
              to_string(cfg.algorithm).c_str(), batch.mean_iterations, batch.std_iterations,
              batch.dnf_count, trials);
  std::printf("wrote %s\n", dir.string().c_str());
  return 0;
}

int do_report(const std::vector<std::string>& dirs, const fs::path& out_opt) {
  const fs::path dir = !out_opt.empty() ? out_opt : out_root() / "report";
  fs::create_directories(dir);

  std::vector<SweepStats> rows;
  for (const std::string& d : dirs) rows.push_back(load_sweep(d));

  // the lower mean per scenario gets the flag
  std::map<std::string, double> best;
  for (const SweepStats& r : rows) {
    const auto it = best.find(r.name);
    if (it == best.end() || r.mean_iterations < it->second) best[r.name] = r.mean_iterations;
  }

  std::printf("%-16s %-10s %6s %10s %9s %5s\n", "scenario", "algorithm", "trials", "mean", "std",
              "dnf");
  {
    std::ofstream table(dir / "report_table.csv");
    if (!table) throw std::runtime_error("cannot open for writing: " + (dir / "report_table.csv").string());
    table << "scenario,algorithm,trials,mean_iterations,std_iterations,dnf_count,flagged\n";
    for (const SweepStats& r : rows) {
      const bool flagged = best.at(r.name) == r.mean_iterations;
      std::printf("%-16s %-10s %6zu %7.1f%s%5.1f %5d%s\n", r.name.c_str(), r.algorithm.c_str(),
                  r.trials.size(), r.mean_iterations, " \xC2\xB1 ", r.std_iterations, r.dnf_count,
                  flagged ? "  *" : "");
      table << r.name << ',' << r.algorithm << ',' << r.trials.size() << ','
            << format_double(r.mean_iterations) << ',' << format_double(r.std_iterations) << ','
            << r.dnf_count << ',' << (flagged ? 1 : 0) << '\n';
    }
  }
  std::printf("* lower mean iterations within the scenario\n");

  for (std::size_t i = 0; i < rows.size(); ++i) {
    const WrmseCurve curve = wrmse_curve(dirs[i]);
    const fs::path curve_path =
        dir / ("wrmse_curve_" + rows[i].name + "_" + rows[i].algorithm + ".csv");
    std::ofstream out(curve_path);
    if (!out) throw std::runtime_error("cannot open for writing: " + curve_path.string());
    out << "iter,mean_wrmse_pooled,trials\n";
    for (std::size_t t = 0; t < curve.mean.size(); ++t)
      out << (t + 1) << ',' << format_double(curve.mean[t]) << ',' << curve.trials[t] << '\n';
  }
  std::printf("wrote %s\n", dir.string().c_str());
  return 0;
}

}  // namespace

int cli(int argc, const char* const* argv) {
  CLI::App app{"deterministic multi-robot source-seeking simulator"};
  app.require_subcommand(1);

  std::string config_path, algo;
  std::string out_path;
  std::uint64_t seed = 0;
  int trials = 10;
  std::vector<std::string> report_dirs;

  auto* run_cmd = app.add_subcommand("run", "simulate one seeded trial and export its artifact");
  run_cmd->add_option("config", config_path, "JSON scenario config")
      ->required()
      ->check(CLI::ExistingFile);
  auto* run_seed = run_cmd->add_option("--seed", seed, "override the config's seed");
  run_cmd->add_option("--out", out_path, "output directory");
  run_cmd->add_option("--algo", algo, "algorithm override")
      ->check(CLI::IsMember({"dias", "greedybo"}));

  auto* sweep_cmd = app.add_subcommand("sweep", "run N independent seeded trials of one config");
  sweep_cmd->add_option("config", config_path, "JSON scenario config")
      ->required()
      ->check(CLI::ExistingFile);
  sweep_cmd->add_option("--trials", trials, "number of trials")
      ->required()
      ->check(CLI::PositiveNumber);
  auto* sweep_seed =
      sweep_cmd->add_option("--seed", seed, "base seed; trial k uses base+k (default: config seed)");
  sweep_cmd->add_option("--out", out_path, "sweep output directory");
  sweep_cmd->add_option("--algo", algo, "algorithm override")
      ->check(CLI::IsMember({"dias", "greedybo"}));

  auto* report_cmd =
      app.add_subcommand("report", "aggregate sweep directories into a comparison table");
  report_cmd->add_option("dirs", report_dirs, "sweep directories")
      ->required()
      ->check(CLI::ExistingDirectory);
  report_cmd->add_option("--out", out_path, "report output directory");

  try {
    app.parse(argc, argv);
  } catch (const CLI::ParseError& e) {
    return app.exit(e);
  }

  try {
    if (run_cmd->parsed()) return do_run(config_path, run_seed, seed, algo, out_path);
    if (sweep_cmd->parsed()) return do_sweep(config_path, trials, sweep_seed, seed, algo, out_path);
    return do_report(report_dirs, out_path);
  } catch (const std::exception& e) {
    std::fprintf(stderr, "error: %s\n", e.what());
    return 1;
  }
}

}  // namespace dias::io
