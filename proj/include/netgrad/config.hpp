#pragma once

#include <cstdint>
#include <filesystem>
#include <map>
#include <string>
#include <utility>
#include <variant>
#include <vector>

#include "netgrad/analysis.hpp"
#include "netgrad/engine.hpp"
#include "netgrad/schedule.hpp"

namespace netgrad {

/// Parse or semantic error in a configuration source. `line` is 0 when the
/// problem is not tied to a single line (for example a missing key).
class ConfigParseError : public ConfigError {
 public:
  ConfigParseError(std::string source, int line, const std::string& msg);
  const std::string& source() const { return source_; }
  int line() const { return line_; }

 private:
  std::string source_;
  int line_;
};

// -- TOML subset -------------------------------------------------------------
//
// Supported: `[table]` and `[dotted.table]` headers, `key = value` pairs with
// bare or dotted keys, `#` comments, and values that are double-quoted strings,
// integers, floats, booleans, or (nested) arrays of those. Everything else is
// rejected with the offending line number.

struct TomlValue {
  using Array = std::vector<TomlValue>;
  std::variant<bool, long long, double, std::string, Array> data;
  int line = 0;

  bool is_number() const {
    return std::holds_alternative<long long>(data) || std::holds_alternative<double>(data);
  }
  double as_double() const;
  long long as_int() const;
  const std::string& as_string() const;
  const Array& as_array() const;
};

/// Flat document: fully qualified dotted key -> value, in sorted key order.
using TomlDocument = std::map<std::string, TomlValue>;

TomlDocument parse_toml(const std::string& text, const std::string& source = "<config>");

/// Parses a single value as it would appear on the right of `=`.
TomlValue parse_toml_value(const std::string& text, const std::string& source, int line);

// -- Experiment configuration ------------------------------------------------

struct GraphSpec {
  std::string kind = "cycle";  // cycle | petersen | complete | edges
  long n = 4;
  std::vector<std::pair<std::size_t, std::size_t>> edges;

  Graph build() const;
  bool operator==(const GraphSpec&) const = default;
};

struct InitSpec {
  Initializer::Kind kind = Initializer::Kind::fixed;
  double lo = 0.0;
  double hi = 1.0;
  std::vector<double> point;       // fixed: broadcast to every agent
  std::vector<std::vector<double>> agents;  // fixed: one point per agent

  bool operator==(const InitSpec&) const = default;
};

struct ExperimentConfig {
  GraphSpec graph;
  std::string objective = "robust_regression";
  std::string split = "even";  // even (f_n = F/N) | replicate (f_n = F)
  std::string gradient = "regression";  // regression | none | gaussian | uniform
  double noise_scale = 0.0;
  RegressionData data;
  WeightTriple weights;
  UpdateForm form = UpdateForm::literal;
  long steps = 1000;
  long record_every = 100;
  double divergence_radius = 1e8;
  InitSpec init;

  int runs = 1;
  std::uint64_t seed = 0;
  int jobs = 1;
  ValidationMode validation = ValidationMode::strict;
  double ratio_floor = 0.0;
  double radius = 0.25;
  std::vector<Anchor> anchors;

  bool operator==(const ExperimentConfig& other) const;
};

/// Builds a config from a document. Unknown keys and bad values are errors.
/// Relative `graph.edges_file` paths resolve against base_dir.
ExperimentConfig config_from_toml(const TomlDocument& doc, const std::string& source = "<config>",
                                  const std::filesystem::path& base_dir = {});

ExperimentConfig load_config(const std::filesystem::path& path);

/// Canonical TOML text. parse_toml(serialize_config(c)) rebuilds c exactly.
std::string serialize_config(const ExperimentConfig& cfg);

/// FNV-1a 64 of the canonical text, ignoring experiment.jobs.
std::uint64_t config_fingerprint(const ExperimentConfig& cfg);

std::string hex64(std::uint64_t v);

/// Applies `path=value` overrides (for example `weights.gamma.c=0`).
/// Unknown paths are ConfigParseErrors.
ExperimentConfig apply_overrides(const ExperimentConfig& cfg,
                                 const std::vector<std::string>& overrides);

/// Engine configuration plus the findings of schedule and graph checks.
struct BuiltConfig {
  SimConfig sim;
  ValidationReport report;
};

/// Constructs the simulation and validates it under cfg.validation. Strict
/// failures (including a disconnected graph) are reported, not thrown.
BuiltConfig build_sim_config(const ExperimentConfig& cfg);

}  // namespace netgrad
