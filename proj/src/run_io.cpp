#include "dias/run_io.hpp"

#include <algorithm>
#include <cmath>
#include <cstdio>
#include <cstdlib>
#include <fstream>
#include <initializer_list>
#include <map>
#include <sstream>
#include <stdexcept>

namespace dias::io {

namespace fs = std::filesystem;
using nlohmann::json;

std::string format_double(double v) {
  char buf[40];
  std::snprintf(buf, sizeof(buf), "%.17g", v);
  return buf;
}

double parse_double(const std::string& s) {
  char* end = nullptr;
  const double v = std::strtod(s.c_str(), &end);
  if (end == s.c_str() || *end != '\0')
    throw std::invalid_argument("parse_double: bad number '" + s + "'");
  return v;
}

namespace {

long parse_long(const std::string& s) {
  char* end = nullptr;
  const long v = std::strtol(s.c_str(), &end, 10);
  if (end == s.c_str() || *end != '\0')
    throw std::invalid_argument("expected integer, got '" + s + "'");
  return v;
}

std::uint64_t parse_u64(const std::string& s) {
  char* end = nullptr;
  const std::uint64_t v = std::strtoull(s.c_str(), &end, 10);
  if (end == s.c_str() || *end != '\0')
    throw std::invalid_argument("expected unsigned integer, got '" + s + "'");
  return v;
}

std::vector<std::string> split(const std::string& line, char sep) {
  std::vector<std::string> out;
  std::string field;
  std::istringstream in(line);
  while (std::getline(in, field, sep)) out.push_back(field);
  if (!line.empty() && line.back() == sep) out.emplace_back();
  return out;
}

std::ofstream open_out(const fs::path& path) {
  std::ofstream out(path);
  if (!out) throw std::runtime_error("cannot open for writing: " + path.string());
  return out;
}

std::vector<std::string> read_lines(const fs::path& path) {
  std::ifstream in(path);
  if (!in) throw std::runtime_error("cannot open for reading: " + path.string());
  std::vector<std::string> lines;
  std::string line;
  while (std::getline(in, line)) {
    if (!line.empty() && line.back() == '\r') line.pop_back();
    lines.push_back(line);
  }
  return lines;
}

void expect_keys(const json& j, const char* where, std::initializer_list<const char*> allowed) {
  for (auto it = j.begin(); it != j.end(); ++it) {
    const bool known = std::any_of(allowed.begin(), allowed.end(),
                                   [&](const char* k) { return it.key() == k; });
    if (!known)
      throw std::invalid_argument(std::string("unknown key '") + it.key() + "' in " + where);
  }
}

json vec2_to_json(const Vec2& p) { return json::array({p.x, p.y}); }

Vec2 vec2_from_json(const json& j) {
  if (!j.is_array() || j.size() != 2)
    throw std::invalid_argument("expected [x, y] pair in config");
  return {j[0].get<double>(), j[1].get<double>()};
}

}  // namespace

json config_to_json(const SimConfig& cfg) {
  json j;
  j["name"] = cfg.name;
  j["algorithm"] = to_string(cfg.algorithm);
  j["seed"] = cfg.seed;
  j["domain"] = {{"width", cfg.domain.width},
                 {"height", cfg.domain.height},
                 {"grid_nx", cfg.domain.grid_nx},
                 {"grid_ny", cfg.domain.grid_ny}};
  j["n_robots"] = cfg.n_robots;
  if (!cfg.initial_positions.empty()) {
    json arr = json::array();
    for (const Vec2& p : cfg.initial_positions) arr.push_back(vec2_to_json(p));
    j["initial_positions"] = arr;
  }
  j["init_region"] = cfg.init_region;
  json src;
  if (!cfg.sources.fixed.empty()) {
    json arr = json::array();
    for (const Source& s : cfg.sources.fixed)
      arr.push_back({{"position", vec2_to_json(s.position)},
                     {"intensity", s.intensity},
                     {"spread", s.spread}});
    src["fixed"] = arr;
  }
  if (cfg.sources.random) {
    const RandomSourceSpec& r = *cfg.sources.random;
    src["random"] = {{"count", r.count},
                     {"intensity_lo", r.intensity_lo},
                     {"intensity_hi", r.intensity_hi},
                     {"spread", r.spread},
                     {"min_separation", r.min_separation},
                     {"margin", r.margin}};
  }
  j["sources"] = src;
  j["noise_std"] = cfg.noise_std;
  j["found_radius"] = cfg.found_radius;
  j["u_max"] = cfg.u_max;
  j["k_max"] = cfg.k_max;
  j["consensus_rounds"] = cfg.consensus_rounds;
  j["warmup_iterations"] = cfg.warmup_iterations;
  j["max_iterations"] = cfg.max_iterations;
  j["min_iterations"] = cfg.min_iterations;
  j["gp"] = {{"init",
              {{"sigma_n", cfg.gp.init.sigma_n},
               {"sigma_f", cfg.gp.init.sigma_f},
               {"length_scale", cfg.gp.init.length_scale}}},
             {"bounds",
              {{"sigma_n", {cfg.gp.bounds.sigma_n.lo, cfg.gp.bounds.sigma_n.hi}},
               {"sigma_f", {cfg.gp.bounds.sigma_f.lo, cfg.gp.bounds.sigma_f.hi}},
               {"length_scale", {cfg.gp.bounds.length_scale.lo, cfg.gp.bounds.length_scale.hi}}}},
             {"train_every", cfg.gp.train_every},
             {"restarts", cfg.gp.restarts}};
  j["controller"] = {{"beta", cfg.controller.beta},
                     {"tau", cfg.controller.tau},
                     {"exclusion_radius", cfg.controller.exclusion_radius},
                     {"alpha", cfg.controller.alpha},
                     {"probe_radius", cfg.controller.probe_radius},
                     {"lcb_use_std", cfg.controller.lcb_use_std}};
  return j;
}

SimConfig config_from_json(const json& j) {
  expect_keys(j, "config",
              {"name", "algorithm", "seed", "domain", "n_robots", "initial_positions",
               "init_region", "sources", "noise_std", "found_radius", "u_max", "k_max",
               "consensus_rounds", "warmup_iterations", "max_iterations", "min_iterations",
               "gp", "controller"});
  SimConfig cfg;
  cfg.name = j.value("name", cfg.name);
  if (j.contains("algorithm")) cfg.algorithm = algorithm_from_string(j.at("algorithm"));
  cfg.seed = j.value("seed", cfg.seed);
  if (j.contains("domain")) {
    const json& d = j.at("domain");
    expect_keys(d, "domain", {"width", "height", "grid_nx", "grid_ny"});
    cfg.domain.width = d.value("width", cfg.domain.width);
    cfg.domain.height = d.value("height", cfg.domain.height);
    cfg.domain.grid_nx = d.value("grid_nx", cfg.domain.grid_nx);
    cfg.domain.grid_ny = d.value("grid_ny", cfg.domain.grid_ny);
  }
  cfg.n_robots = j.value("n_robots", cfg.n_robots);
  if (j.contains("initial_positions")) {
    for (const json& p : j.at("initial_positions"))
      cfg.initial_positions.push_back(vec2_from_json(p));
  }
  if (j.contains("init_region")) cfg.init_region = j.at("init_region").get<std::array<double, 4>>();
  if (j.contains("sources")) {
    const json& s = j.at("sources");
    expect_keys(s, "sources", {"fixed", "random"});
    if (s.contains("fixed")) {
      for (const json& f : s.at("fixed")) {
        expect_keys(f, "sources.fixed[]", {"position", "intensity", "spread"});
        Source src;
        src.position = vec2_from_json(f.at("position"));
        src.intensity = f.value("intensity", src.intensity);
        src.spread = f.value("spread", src.spread);
        cfg.sources.fixed.push_back(src);
      }
    }
    if (s.contains("random")) {
      const json& r = s.at("random");
      expect_keys(r, "sources.random",
                  {"count", "intensity_lo", "intensity_hi", "spread", "min_separation", "margin"});
      RandomSourceSpec spec;
      spec.count = r.value("count", spec.count);
      spec.intensity_lo = r.value("intensity_lo", spec.intensity_lo);
      spec.intensity_hi = r.value("intensity_hi", spec.intensity_hi);
      spec.spread = r.value("spread", spec.spread);
      spec.min_separation = r.value("min_separation", spec.min_separation);
      spec.margin = r.value("margin", spec.margin);
      cfg.sources.random = spec;
    }
  }
  cfg.noise_std = j.value("noise_std", cfg.noise_std);
  cfg.found_radius = j.value("found_radius", cfg.found_radius);
  cfg.u_max = j.value("u_max", cfg.u_max);
  cfg.k_max = j.value("k_max", cfg.k_max);
  cfg.consensus_rounds = j.value("consensus_rounds", cfg.consensus_rounds);
  cfg.warmup_iterations = j.value("warmup_iterations", cfg.warmup_iterations);
  cfg.max_iterations = j.value("max_iterations", cfg.max_iterations);
  cfg.min_iterations = j.value("min_iterations", cfg.min_iterations);
  if (j.contains("gp")) {
    const json& g = j.at("gp");
    expect_keys(g, "gp", {"init", "bounds", "train_every", "restarts"});
    if (g.contains("init")) {
      const json& h = g.at("init");
      expect_keys(h, "gp.init", {"sigma_n", "sigma_f", "length_scale"});
      cfg.gp.init.sigma_n = h.value("sigma_n", cfg.gp.init.sigma_n);
      cfg.gp.init.sigma_f = h.value("sigma_f", cfg.gp.init.sigma_f);
      cfg.gp.init.length_scale = h.value("length_scale", cfg.gp.init.length_scale);
    }
    if (g.contains("bounds")) {
      const json& b = g.at("bounds");
      expect_keys(b, "gp.bounds", {"sigma_n", "sigma_f", "length_scale"});
      auto interval = [](const json& arr, gp::Interval& out) {
        if (!arr.is_array() || arr.size() != 2)
          throw std::invalid_argument("gp.bounds entries must be [lo, hi]");
        out.lo = arr[0].get<double>();
        out.hi = arr[1].get<double>();
      };
      if (b.contains("sigma_n")) interval(b.at("sigma_n"), cfg.gp.bounds.sigma_n);
      if (b.contains("sigma_f")) interval(b.at("sigma_f"), cfg.gp.bounds.sigma_f);
      if (b.contains("length_scale")) interval(b.at("length_scale"), cfg.gp.bounds.length_scale);
    }
    cfg.gp.train_every = g.value("train_every", cfg.gp.train_every);
    cfg.gp.restarts = g.value("restarts", cfg.gp.restarts);
  }
  if (j.contains("controller")) {
    const json& c = j.at("controller");
    expect_keys(c, "controller",
                {"beta", "tau", "exclusion_radius", "alpha", "probe_radius", "lcb_use_std"});
    cfg.controller.beta = c.value("beta", cfg.controller.beta);
    cfg.controller.tau = c.value("tau", cfg.controller.tau);
    cfg.controller.exclusion_radius = c.value("exclusion_radius", cfg.controller.exclusion_radius);
    cfg.controller.alpha = c.value("alpha", cfg.controller.alpha);
    cfg.controller.probe_radius = c.value("probe_radius", cfg.controller.probe_radius);
    cfg.controller.lcb_use_std = c.value("lcb_use_std", cfg.controller.lcb_use_std);
  }
  cfg.validate();
  return cfg;
}

SimConfig load_config(const fs::path& path) {
  std::ifstream in(path);
  if (!in) throw std::runtime_error("cannot open config: " + path.string());
  json j;
  try {
    in >> j;
  } catch (const json::exception& e) {
    throw std::runtime_error("bad JSON in " + path.string() + ": " + e.what());
  }
  try {
    return config_from_json(j);
  } catch (const std::exception& e) {
    throw std::runtime_error("invalid config " + path.string() + ": " + e.what());
  }
}

void save_config(const SimConfig& cfg, const fs::path& path) {
  auto out = open_out(path);
  out << config_to_json(cfg).dump(2) << '\n';
}

void export_run(const RunResult& artifact, const fs::path& out_dir) {
  fs::create_directories(out_dir);
  save_config(artifact.config, out_dir / "config.json");

  {
    auto out = open_out(out_dir / "summary.txt");
    const RunSummary& s = artifact.summary;
    out << "format_version=" << kFormatVersion << '\n';
    out << "name=" << artifact.config.name << '\n';
    out << "algorithm=" << to_string(artifact.config.algorithm) << '\n';
    out << "seed=" << artifact.config.seed << '\n';
    out << "n_robots=" << artifact.config.n_robots << '\n';
    out << "n_sources=" << s.n_sources << '\n';
    out << "max_iterations=" << artifact.config.max_iterations << '\n';
    out << "iterations_run=" << s.iterations_run << '\n';
    out << "found_total=" << s.found_total << '\n';
    out << "dnf=" << (s.dnf ? 1 : 0) << '\n';
    if (s.iterations_to_all_found)
      out << "iterations_to_all_found=" << *s.iterations_to_all_found << '\n';
    out << "final_wrmse_pooled=" << format_double(s.final_wrmse_pooled) << '\n';
    for (const FoundEvent& e : artifact.found_events)
      out << "found_event=" << e.source << ',' << e.robot << ',' << e.iteration << '\n';
  }

  {
    auto out = open_out(out_dir / "records.csv");
    out << "iter,robot,x,y,mode,found_total,wrmse_pooled,ergodic_metric\n";
    for (const IterationRecord& rec : artifact.records)
      for (std::size_t i = 0; i < rec.positions.size(); ++i)
        out << rec.iteration << ',' << i << ',' << format_double(rec.positions[i].x) << ','
            << format_double(rec.positions[i].y) << ',' << to_string(rec.modes[i]) << ','
            << rec.found_total << ',' << format_double(rec.wrmse_pooled) << ','
            << format_double(rec.ergodic_metric) << '\n';
  }

  {
    auto out = open_out(out_dir / "wrmse_robots.csv");
    out << "iter,robot,wrmse\n";
    for (const IterationRecord& rec : artifact.records)
      for (std::size_t i = 0; i < rec.wrmse_robot.size(); ++i)
        out << rec.iteration << ',' << i << ',' << format_double(rec.wrmse_robot[i]) << '\n';
  }

  for (int i = 0; i < artifact.config.n_robots; ++i) {
    auto out = open_out(out_dir / ("trajectory_robot" + std::to_string(i) + ".csv"));
    out << "iter,x,y,ux,uy,mode\n";
    for (const IterationRecord& rec : artifact.records) {
      const auto k = static_cast<std::size_t>(i);
      out << rec.iteration << ',' << format_double(rec.positions[k].x) << ','
          << format_double(rec.positions[k].y) << ',' << format_double(rec.commands[k].x) << ','
          << format_double(rec.commands[k].y) << ',' << to_string(rec.modes[k]) << '\n';
    }
  }
}

namespace {

/// key=value lines; repeated keys collected in order.
std::multimap<std::string, std::string> parse_kv(const fs::path& path,
                                                 std::vector<std::string>* found_events) {
  std::multimap<std::string, std::string> kv;
  for (const std::string& line : read_lines(path)) {
    if (line.empty()) continue;
    const auto eq = line.find('=');
    if (eq == std::string::npos)
      throw std::runtime_error("bad line in " + path.string() + ": " + line);
    const std::string key = line.substr(0, eq);
    const std::string value = line.substr(eq + 1);
    if (key == "found_event" && found_events) found_events->push_back(value);
    kv.emplace(key, value);
  }
  return kv;
}

std::string kv_get(const std::multimap<std::string, std::string>& kv, const std::string& key,
                   const fs::path& path) {
  const auto it = kv.find(key);
  if (it == kv.end()) throw std::runtime_error("missing key '" + key + "' in " + path.string());
  return it->second;
}

}  // namespace

RunResult load_run(const fs::path& run_dir) {
  RunResult out;
  out.config = load_config(run_dir / "config.json");

  const fs::path summary_path = run_dir / "summary.txt";
  std::vector<std::string> event_lines;
  const auto kv = parse_kv(summary_path, &event_lines);
  const int version = static_cast<int>(parse_long(kv_get(kv, "format_version", summary_path)));
  if (version != kFormatVersion)
    throw std::runtime_error("unsupported artifact format_version in " + summary_path.string());
  RunSummary& s = out.summary;
  s.n_sources = static_cast<int>(parse_long(kv_get(kv, "n_sources", summary_path)));
  s.iterations_run = static_cast<int>(parse_long(kv_get(kv, "iterations_run", summary_path)));
  s.found_total = static_cast<int>(parse_long(kv_get(kv, "found_total", summary_path)));
  s.dnf = parse_long(kv_get(kv, "dnf", summary_path)) != 0;
  if (kv.count("iterations_to_all_found"))
    s.iterations_to_all_found =
        static_cast<int>(parse_long(kv_get(kv, "iterations_to_all_found", summary_path)));
  s.final_wrmse_pooled = parse_double(kv_get(kv, "final_wrmse_pooled", summary_path));
  for (const std::string& line : event_lines) {
    const auto f = split(line, ',');
    if (f.size() != 3) throw std::runtime_error("bad found_event in " + summary_path.string());
    out.found_events.push_back({static_cast<int>(parse_long(f[0])),
                                static_cast<int>(parse_long(f[1])),
                                static_cast<int>(parse_long(f[2]))});
  }

  const fs::path records_path = run_dir / "records.csv";
  const auto lines = read_lines(records_path);
  if (lines.empty() || lines[0] != "iter,robot,x,y,mode,found_total,wrmse_pooled,ergodic_metric")
    throw std::runtime_error("bad header in " + records_path.string());
  const int n = out.config.n_robots;
  for (std::size_t li = 1; li < lines.size(); ++li) {
    const auto f = split(lines[li], ',');
    if (f.size() != 8) throw std::runtime_error("bad row in " + records_path.string());
    const int iter = static_cast<int>(parse_long(f[0]));
    const int robot = static_cast<int>(parse_long(f[1]));
    if (robot == 0) {
      IterationRecord rec;
      rec.iteration = iter;
      rec.positions.resize(static_cast<std::size_t>(n));
      rec.modes.resize(static_cast<std::size_t>(n));
      rec.commands.resize(static_cast<std::size_t>(n));
      rec.wrmse_robot.resize(static_cast<std::size_t>(n));
      rec.found_total = static_cast<int>(parse_long(f[5]));
      rec.wrmse_pooled = parse_double(f[6]);
      rec.ergodic_metric = parse_double(f[7]);
      out.records.push_back(std::move(rec));
    }
    IterationRecord& rec = out.records.back();
    if (rec.iteration != iter || robot < 0 || robot >= n)
      throw std::runtime_error("rows out of order in " + records_path.string());
    rec.positions[static_cast<std::size_t>(robot)] = {parse_double(f[2]), parse_double(f[3])};
    rec.modes[static_cast<std::size_t>(robot)] = robot_mode_from_string(f[4]);
  }

  {
    const fs::path path = run_dir / "wrmse_robots.csv";
    const auto wl = read_lines(path);
    if (wl.empty() || wl[0] != "iter,robot,wrmse")
      throw std::runtime_error("bad header in " + path.string());
    for (std::size_t li = 1; li < wl.size(); ++li) {
      const auto f = split(wl[li], ',');
      if (f.size() != 3) throw std::runtime_error("bad row in " + path.string());
      const auto iter = static_cast<std::size_t>(parse_long(f[0]));
      if (iter == 0 || iter > out.records.size())
        throw std::runtime_error("row out of range in " + path.string());
      out.records[iter - 1].wrmse_robot[static_cast<std::size_t>(parse_long(f[1]))] =
          parse_double(f[2]);
    }
  }

  for (int i = 0; i < n; ++i) {
    const fs::path path = run_dir / ("trajectory_robot" + std::to_string(i) + ".csv");
    const auto tl = read_lines(path);
    if (tl.empty() || tl[0] != "iter,x,y,ux,uy,mode")
      throw std::runtime_error("bad header in " + path.string());
    for (std::size_t li = 1; li < tl.size(); ++li) {
      const auto f = split(tl[li], ',');
      if (f.size() != 6) throw std::runtime_error("bad row in " + path.string());
      const auto iter = static_cast<std::size_t>(parse_long(f[0]));
      if (iter == 0 || iter > out.records.size())
        throw std::runtime_error("row out of range in " + path.string());
      out.records[iter - 1].commands[static_cast<std::size_t>(i)] = {parse_double(f[3]),
                                                                     parse_double(f[4])};
    }
  }

  for (IterationRecord& rec : out.records)
    for (const FoundEvent& e : out.found_events)
      if (e.iteration == rec.iteration) rec.newly_found.push_back(e.source);

  return out;
}

SweepStats stats_of(const BatchResult& batch) {
  SweepStats out;
  if (!batch.trials.empty()) {
    out.name = batch.trials.front().config.name;
    out.algorithm = to_string(batch.trials.front().config.algorithm);
  }
  for (std::size_t k = 0; k < batch.trials.size(); ++k) {
    const RunResult& trial = batch.trials[k];
    TrialStats t;
    t.seed = batch.seeds[k];
    t.dnf = trial.summary.dnf;
    t.iterations = trial.summary.iterations_to_all_found ? *trial.summary.iterations_to_all_found
                                                         : trial.config.max_iterations;
    t.final_wrmse_pooled = trial.summary.final_wrmse_pooled;
    out.trials.push_back(t);
  }
  out.mean_iterations = batch.mean_iterations;
  out.std_iterations = batch.std_iterations;
  out.dnf_count = batch.dnf_count;
  return out;
}

void export_sweep(const BatchResult& batch, const fs::path& out_dir) {
  fs::create_directories(out_dir);
  for (std::size_t k = 0; k < batch.trials.size(); ++k)
    export_run(batch.trials[k], out_dir / ("trial_" + std::to_string(k)));

  const SweepStats stats = stats_of(batch);
  {
    auto out = open_out(out_dir / "trials.csv");
    out << "trial,seed,iterations,dnf,final_wrmse_pooled\n";
    for (std::size_t k = 0; k < stats.trials.size(); ++k) {
      const TrialStats& t = stats.trials[k];
      out << k << ',' << t.seed << ',' << t.iterations << ',' << (t.dnf ? 1 : 0) << ','
          << format_double(t.final_wrmse_pooled) << '\n';
    }
  }
  {
    auto out = open_out(out_dir / "aggregate.txt");
    out << "name=" << stats.name << '\n';
    out << "algorithm=" << stats.algorithm << '\n';
    out << "trials=" << stats.trials.size() << '\n';
    out << "mean_iterations=" << format_double(stats.mean_iterations) << '\n';
    out << "std_iterations=" << format_double(stats.std_iterations) << '\n';
    out << "dnf_count=" << stats.dnf_count << '\n';
  }
}

SweepStats load_sweep(const fs::path& sweep_dir) {
  SweepStats out;
  for (int k = 0;; ++k) {
    const fs::path trial_dir = sweep_dir / ("trial_" + std::to_string(k));
    if (!fs::exists(trial_dir / "summary.txt")) break;
    const fs::path summary_path = trial_dir / "summary.txt";
    const auto kv = parse_kv(summary_path, nullptr);
    if (k == 0) {
      out.name = kv_get(kv, "name", summary_path);
      out.algorithm = kv_get(kv, "algorithm", summary_path);
    }
    TrialStats t;
    t.seed = parse_u64(kv_get(kv, "seed", summary_path));
    t.dnf = parse_long(kv_get(kv, "dnf", summary_path)) != 0;
    t.iterations = t.dnf
                       ? static_cast<int>(parse_long(kv_get(kv, "max_iterations", summary_path)))
                       : static_cast<int>(
                             parse_long(kv_get(kv, "iterations_to_all_found", summary_path)));
    t.final_wrmse_pooled = parse_double(kv_get(kv, "final_wrmse_pooled", summary_path));
    out.trials.push_back(t);
  }
  if (out.trials.empty())
    throw std::runtime_error("no trial_<k>/summary.txt found under " + sweep_dir.string());

  double sum = 0.0;
  for (const TrialStats& t : out.trials) {
    sum += t.iterations;
    if (t.dnf) ++out.dnf_count;
  }
  out.mean_iterations = sum / static_cast<double>(out.trials.size());
  if (out.trials.size() > 1) {
    double ss = 0.0;
    for (const TrialStats& t : out.trials)
      ss += (t.iterations - out.mean_iterations) * (t.iterations - out.mean_iterations);
    out.std_iterations = std::sqrt(ss / static_cast<double>(out.trials.size() - 1));
  }
  return out;
}

WrmseCurve wrmse_curve(const fs::path& sweep_dir) {
  WrmseCurve curve;
  std::vector<double> sums;
  for (int k = 0;; ++k) {
    const fs::path records_path = sweep_dir / ("trial_" + std::to_string(k)) / "records.csv";
    if (!fs::exists(records_path)) {
      if (k == 0) throw std::runtime_error("no trial_0/records.csv under " + sweep_dir.string());
      break;
    }
    const auto lines = read_lines(records_path);
    for (std::size_t li = 1; li < lines.size(); ++li) {
      const auto f = split(lines[li], ',');
      if (f.size() != 8) throw std::runtime_error("bad row in " + records_path.string());
      if (parse_long(f[1]) != 0) continue;  // pooled value repeats per robot
      const auto iter = static_cast<std::size_t>(parse_long(f[0]));
      if (sums.size() < iter) {
        sums.resize(iter, 0.0);
        curve.trials.resize(iter, 0);
      }
      sums[iter - 1] += parse_double(f[6]);
      curve.trials[iter - 1] += 1;
    }
  }
  curve.mean.resize(sums.size());
  for (std::size_t i = 0; i < sums.size(); ++i) curve.mean[i] = sums[i] / curve.trials[i];
  return curve;
}

}  // namespace dias::io
