#pragma once

#include <cstdint>
#include <filesystem>
#include <string>
#include <vector>

#include "netgrad/analysis.hpp"
#include "netgrad/config.hpp"
#include "netgrad/engine.hpp"

namespace netgrad {

inline constexpr int kSchemaVersion = 1;
inline constexpr std::string_view kCsvVersion = "1";

struct ExperimentResult {
  ExperimentConfig config;
  std::vector<Trajectory> runs;  // indexed by run number
  MonteCarloSummary summary;
};

/// Runs cfg.runs independent simulations. Run i uses seed
/// RngStream(cfg.seed).run_seed(i), so results do not depend on `jobs`.
/// `jobs` <= 0 uses cfg.jobs.
ExperimentResult run_experiment(const ExperimentConfig& cfg, const SimConfig& sim, int jobs = 0);

/// Convenience wrapper that builds and validates the simulation first.
/// Throws ConfigError if validation fails.
ExperimentResult run_experiment(const ExperimentConfig& cfg, int jobs = 0);

struct SweepRow {
  std::string value;
  int runs = 0;
  double global_rate = 0.0;
  double local_rate = 0.0;
  double diverged_rate = 0.0;
  double unresolved_rate = 0.0;
  double mean_consensus_error = 0.0;
};

std::vector<SweepRow> run_sweep(const ExperimentConfig& cfg, const std::string& parameter,
                                const std::vector<std::string>& values, int jobs = 0);

// -- serialization ---------------------------------------------------------------

/// Columns: k, x<n>_<i> for every agent n and coordinate i, consensus_error.
void write_trajectory_csv(std::ostream& out, const Trajectory& t);

/// JSON summary of one run.
std::string run_summary_json(const ExperimentConfig& cfg, const Trajectory& t);

/// Columns: run, seed, mean_<i>..., basin, distance, final_consensus_error, diverged.
void write_runs_csv(std::ostream& out, const ExperimentResult& r);

std::string experiment_summary_json(const ExperimentResult& r);

/// Columns: value, runs, global_rate, local_rate, diverged_rate, unresolved_rate,
/// mean_consensus_error.
void write_sweep_csv(std::ostream& out, const std::string& parameter,
                     const std::vector<SweepRow>& rows);

/// Shortest decimal text that round-trips the double.
std::string format_double(double v);

}  // namespace netgrad
