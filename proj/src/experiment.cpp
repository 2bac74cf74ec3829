#include "netgrad/experiment.hpp"

#include <algorithm>
#include <atomic>
#include <charconv>
#include <ostream>
#include <thread>

#include <json.hpp>

namespace netgrad {

using json = nlohmann::ordered_json;

std::string format_double(double v) {
  if (std::isnan(v)) return "nan";
  if (std::isinf(v)) return v > 0 ? "inf" : "-inf";
  char buf[64];
  const auto [end, ec] = std::to_chars(buf, buf + sizeof buf, v);
  return std::string(buf, end);
}

ExperimentResult run_experiment(const ExperimentConfig& cfg, const SimConfig& sim, int jobs) {
  if (jobs <= 0) jobs = cfg.jobs;
  ExperimentResult out;
  out.config = cfg;
  out.runs.resize(static_cast<std::size_t>(cfg.runs));
  const RngStream root(cfg.seed);

  std::atomic<int> next{0};
  auto worker = [&] {
    for (int i = next++; i < cfg.runs; i = next++)
      out.runs[static_cast<std::size_t>(i)] = run(sim, root.run_seed(static_cast<std::uint64_t>(i)));
  };
  const int threads = std::clamp(jobs, 1, cfg.runs);
  if (threads == 1) {
    worker();
  } else {
    std::vector<std::jthread> pool;
    for (int t = 0; t < threads; ++t) pool.emplace_back(worker);
  }
  out.summary = aggregate(out.runs, cfg.anchors, cfg.radius);
  return out;
}

ExperimentResult run_experiment(const ExperimentConfig& cfg, int jobs) {
  const BuiltConfig built = build_sim_config(cfg);
  if (!built.report.passed) {
    std::string msg = "configuration failed validation:";
    for (const auto& e : built.report.errors) msg += "\n  " + e;
    throw ConfigError(msg);
  }
  return run_experiment(cfg, built.sim, jobs);
}

std::vector<SweepRow> run_sweep(const ExperimentConfig& cfg, const std::string& parameter,
                                const std::vector<std::string>& values, int jobs) {
  std::vector<SweepRow> rows;
  for (const auto& value : values) {
    const ExperimentConfig variant = apply_overrides(cfg, {parameter + "=" + value});
    const ExperimentResult r = run_experiment(variant, jobs);
    SweepRow row;
    row.value = value;
    row.runs = r.summary.runs;
    row.global_rate = r.summary.rate(Basin::global);
    row.local_rate = r.summary.rate(Basin::local);
    row.diverged_rate = r.summary.rate(Basin::diverged);
    row.unresolved_rate = r.summary.rate(Basin::unresolved);
    row.mean_consensus_error = r.summary.mean_consensus_error;
    rows.push_back(row);
  }
  return rows;
}

void write_trajectory_csv(std::ostream& out, const Trajectory& t) {
  const Eigen::Index d = t.final_state.x.rows();
  const Eigen::Index n = t.final_state.x.cols();
  out << "k";
  for (Eigen::Index a = 0; a < n; ++a)
    for (Eigen::Index i = 0; i < d; ++i) out << ",x" << a << "_" << i;
  out << ",consensus_error\n";
  for (std::size_t s = 0; s < t.samples.size(); ++s) {
    out << t.sample_k[s];
    const auto& x = t.samples[s];
    for (Eigen::Index a = 0; a < n; ++a)
      for (Eigen::Index i = 0; i < d; ++i) out << "," << format_double(x(i, a));
    out << "," << format_double(t.consensus_error[s]) << "\n";
  }
}

namespace {

json vector_json(const Eigen::VectorXd& v) {
  json arr = json::array();
  for (Eigen::Index i = 0; i < v.size(); ++i) arr.push_back(v(i));
  return arr;
}

json number(double v) {
  if (std::isfinite(v)) return v;
  return format_double(v);  // JSON has no inf/nan
}

json label_json(const BasinLabel& label) {
  json j;
  j["label"] = to_string(label.label);
  j["anchor"] = label.anchor;
  j["distance"] = number(label.distance);
  return j;
}

std::string rule_text(const ExperimentConfig& cfg) {
  return "nearest anchor to the agent-mean state within radius " + format_double(cfg.radius) +
         "; otherwise unresolved";
}

}  // namespace

std::string run_summary_json(const ExperimentConfig& cfg, const Trajectory& t) {
  BasinLabel label;
  if (!cfg.anchors.empty()) {
    label = classify_basin(t.final_state, cfg.anchors, cfg.radius);
  } else if (t.diverged) {
    label.label = Basin::diverged;
  }
  json j;
  j["schema_version"] = kSchemaVersion;
  j["kind"] = "run";
  j["stream_version"] = std::string(kStreamVersion);
  j["root_seed"] = cfg.seed;
  j["run_seed"] = t.seed;
  j["config_fingerprint"] = hex64(t.config_fingerprint);
  j["update_form"] = to_string(cfg.form);
  j["steps"] = cfg.steps;
  j["steps_taken"] = t.final_state.k;
  j["diverged"] = t.diverged;
  j["basin"] = label_json(label);
  j["classification_rule"] = rule_text(cfg);
  json states = json::array();
  for (Eigen::Index a = 0; a < t.final_state.x.cols(); ++a) {
    json row = json::array();
    for (Eigen::Index i = 0; i < t.final_state.x.rows(); ++i)
      row.push_back(number(t.final_state.x(i, a)));
    states.push_back(row);
  }
  j["final_states"] = states;
  json mean = json::array();
  const Eigen::VectorXd m = t.final_state.mean();
  for (Eigen::Index i = 0; i < m.size(); ++i) mean.push_back(number(m(i)));
  j["mean_state"] = mean;
  j["final_consensus_error"] = number(consensus_error(t.final_state.x));
  j["warnings"] = t.warnings;
  return j.dump(2) + "\n";
}

void write_runs_csv(std::ostream& out, const ExperimentResult& r) {
  const auto& s = r.summary;
  const Eigen::Index d = s.final_means.empty() ? 0 : s.final_means.front().size();
  out << "run,seed";
  for (Eigen::Index i = 0; i < d; ++i) out << ",mean_" << i;
  out << ",basin,distance,final_consensus_error,diverged\n";
  for (int i = 0; i < s.runs; ++i) {
    const auto idx = static_cast<std::size_t>(i);
    out << i << "," << s.seeds[idx];
    for (Eigen::Index c = 0; c < d; ++c) out << "," << format_double(s.final_means[idx](c));
    out << "," << to_string(s.labels[idx].label) << "," << format_double(s.labels[idx].distance)
        << "," << format_double(s.final_consensus_error[idx]) << ","
        << (r.runs[idx].diverged ? "true" : "false") << "\n";
  }
}

std::string experiment_summary_json(const ExperimentResult& r) {
  const auto& s = r.summary;
  const auto& cfg = r.config;
  json j;
  j["schema_version"] = kSchemaVersion;
  j["kind"] = "experiment";
  j["stream_version"] = std::string(kStreamVersion);
  j["root_seed"] = cfg.seed;
  j["config_fingerprint"] = hex64(config_fingerprint(cfg));
  j["update_form"] = to_string(cfg.form);
  j["runs"] = s.runs;
  json counts;
  for (const auto& [basin, count] : s.counts) counts[to_string(basin)] = count;
  j["counts"] = counts;
  j["classification_rule"] = rule_text(cfg);
  json anchors = json::array();
  for (const auto& a : cfg.anchors)
    anchors.push_back({{"label", to_string(a.label)}, {"point", vector_json(a.point)}});
  j["anchors"] = anchors;
  j["mean_final_consensus_error"] = number(s.mean_consensus_error);
  j["max_final_consensus_error"] = number(s.max_consensus_error);
  j["run_seeds"] = s.seeds;
  return j.dump(2) + "\n";
}

void write_sweep_csv(std::ostream& out, const std::string& parameter,
                     const std::vector<SweepRow>& rows) {
  out << "parameter,value,runs,global_rate,local_rate,diverged_rate,unresolved_rate,"
         "mean_consensus_error\n";
  for (const auto& r : rows) {
    out << parameter << "," << r.value << "," << r.runs << "," << format_double(r.global_rate)
        << "," << format_double(r.local_rate) << "," << format_double(r.diverged_rate) << ","
        << format_double(r.unresolved_rate) << "," << format_double(r.mean_consensus_error)
        << "\n";
  }
}

}  // namespace netgrad
