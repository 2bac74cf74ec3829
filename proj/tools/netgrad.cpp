// netgrad command line: run | experiment | sweep | validate
#include <cstdio>
#include <filesystem>
#include <fstream>
#include <iostream>
#include <optional>
#include <sstream>
#include <string>
#include <vector>

#include <CLI11.hpp>

#include "netgrad/config.hpp"
#include "netgrad/experiment.hpp"

namespace fs = std::filesystem;
using namespace netgrad;

namespace {

constexpr int kExitOk = 0;
constexpr int kExitConfig = 2;
constexpr int kExitIo = 3;

struct IoError : std::runtime_error {
  using std::runtime_error::runtime_error;
};

struct Common {
  std::string config;
  std::optional<std::uint64_t> seed;
  std::vector<std::string> set;
  int jobs = 0;
  bool allow_offschedule = false;
  std::string out = ".";
};

void add_common(CLI::App* cmd, Common& c) {
  cmd->add_option("--config", c.config, "configuration file")->required();
  cmd->add_option("--seed", c.seed, "root seed (overrides experiment.seed)");
  cmd->add_option("--set", c.set, "override, e.g. weights.gamma.c=0")->take_all();
  cmd->add_option("--jobs", c.jobs, "worker threads for Monte Carlo runs");
  cmd->add_flag("--allow-offschedule", c.allow_offschedule,
                "report schedule violations as warnings and run anyway");
  cmd->add_option("--out", c.out, "output directory");
}

ExperimentConfig load(const Common& c) {
  if (!fs::exists(c.config)) throw IoError("cannot open config file '" + c.config + "'");
  ExperimentConfig cfg = apply_overrides(load_config(c.config), c.set);
  if (c.seed) cfg.seed = *c.seed;
  if (c.jobs > 0) cfg.jobs = c.jobs;
  if (c.allow_offschedule) cfg.validation = ValidationMode::permissive;
  return cfg;
}

void print_report(const ValidationReport& r) {
  for (const auto& w : r.warnings) std::cerr << "warning: " << w << "\n";
  for (const auto& e : r.errors) std::cerr << "error: " << e << "\n";
}

BuiltConfig build_checked(const ExperimentConfig& cfg) {
  BuiltConfig b = build_sim_config(cfg);
  print_report(b.report);
  if (!b.report.passed) throw ConfigError("configuration failed validation");
  return b;
}

std::ofstream open_out(const fs::path& dir, const std::string& name) {
  std::error_code ec;
  fs::create_directories(dir, ec);
  std::ofstream f(dir / name, std::ios::binary);
  if (!f) throw IoError("cannot write '" + (dir / name).string() + "'");
  return f;
}

void finish(std::ofstream& f, const fs::path& path) {
  f.close();
  if (!f) throw IoError("write failed for '" + path.string() + "'");
}

int cmd_run(const Common& c) {
  const ExperimentConfig cfg = load(c);
  const BuiltConfig b = build_checked(cfg);
  // Same seed as run 0 of an experiment.
  Trajectory t = run(b.sim, RngStream(cfg.seed).run_seed(0));
  t.warnings.insert(t.warnings.begin(), b.report.warnings.begin(), b.report.warnings.end());
  const fs::path dir = c.out;
  {
    auto f = open_out(dir, "trajectory.csv");
    write_trajectory_csv(f, t);
    finish(f, dir / "trajectory.csv");
  }
  {
    auto f = open_out(dir, "summary.json");
    f << run_summary_json(cfg, t);
    finish(f, dir / "summary.json");
  }
  std::cout << (t.diverged ? "diverged" : "finished") << " after " << t.final_state.k
            << " steps; outputs in " << dir.string() << "\n";
  return kExitOk;
}

int cmd_experiment(const Common& c) {
  const ExperimentConfig cfg = load(c);
  const BuiltConfig b = build_checked(cfg);
  const ExperimentResult r = run_experiment(cfg, b.sim, cfg.jobs);
  const fs::path dir = c.out;
  {
    auto f = open_out(dir, "runs.csv");
    write_runs_csv(f, r);
    finish(f, dir / "runs.csv");
  }
  {
    auto f = open_out(dir, "experiment.json");
    f << experiment_summary_json(r);
    finish(f, dir / "experiment.json");
  }
  std::cout << "runs " << r.summary.runs;
  for (const auto& [basin, n] : r.summary.counts) std::cout << "  " << to_string(basin) << " " << n;
  std::cout << "\n";
  return kExitOk;
}

std::vector<std::string> split_values(const std::vector<std::string>& raw) {
  std::vector<std::string> out;
  for (const auto& item : raw) {
    std::stringstream ss(item);
    std::string v;
    while (std::getline(ss, v, ','))
      if (!v.empty()) out.push_back(v);
  }
  return out;
}

int cmd_sweep(const Common& c, const std::string& param, const std::vector<std::string>& raw) {
  const ExperimentConfig cfg = load(c);
  const auto values = split_values(raw);
  if (values.empty()) throw ConfigError("sweep needs at least one value");
  // Validate every variant up front so a bad value fails before any run.
  for (const auto& v : values) build_checked(apply_overrides(cfg, {param + "=" + v}));
  const auto rows = run_sweep(cfg, param, values, cfg.jobs);
  const fs::path dir = c.out;
  auto f = open_out(dir, "sweep.csv");
  write_sweep_csv(f, param, rows);
  finish(f, dir / "sweep.csv");
  write_sweep_csv(std::cout, param, rows);
  return kExitOk;
}

int cmd_validate(const Common& c) {
  const ExperimentConfig cfg = load(c);
  const BuiltConfig b = build_sim_config(cfg);
  print_report(b.report);
  std::cout << "fingerprint " << hex64(config_fingerprint(cfg)) << "\n";
  std::cout << (b.report.passed ? "ok" : "invalid") << "\n";
  return b.report.passed ? kExitOk : kExitConfig;
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"Distributed gradient dynamics simulator"};
  app.require_subcommand(1);
  Common run_opts, exp_opts, sweep_opts, val_opts;
  std::string param;
  std::vector<std::string> values;

  auto* run_cmd = app.add_subcommand("run", "one seeded run");
  add_common(run_cmd, run_opts);
  auto* exp_cmd = app.add_subcommand("experiment", "Monte Carlo experiment");
  add_common(exp_cmd, exp_opts);
  auto* sweep_cmd = app.add_subcommand("sweep", "experiment per parameter value");
  add_common(sweep_cmd, sweep_opts);
  sweep_cmd->add_option("--param", param, "config path, e.g. weights.gamma.c")->required();
  sweep_cmd->add_option("--values", values, "comma separated values")->required();
  auto* val_cmd = app.add_subcommand("validate", "parse and check a config");
  add_common(val_cmd, val_opts);

  try {
    app.parse(argc, argv);
  } catch (const CLI::ParseError& e) {
    const int rc = app.exit(e);
    return rc == 0 ? kExitOk : kExitConfig;
  }

  try {
    if (*run_cmd) return cmd_run(run_opts);
    if (*exp_cmd) return cmd_experiment(exp_opts);
    if (*sweep_cmd) return cmd_sweep(sweep_opts, param, values);
    if (*val_cmd) return cmd_validate(val_opts);
  } catch (const IoError& e) {
    std::cerr << "netgrad: " << e.what() << "\n";
    return kExitIo;
  } catch (const std::invalid_argument& e) {  // ConfigError and friends
    std::cerr << "netgrad: " << e.what() << "\n";
    return kExitConfig;
  } catch (const std::ios_base::failure& e) {
    std::cerr << "netgrad: " << e.what() << "\n";
    return kExitIo;
  }
  return kExitConfig;
}
