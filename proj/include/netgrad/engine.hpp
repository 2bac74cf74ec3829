#pragma once

#include <cstdint>
#include <stdexcept>
#include <string>
#include <variant>
#include <vector>

#include <Eigen/Dense>

#include "netgrad/graph.hpp"
#include "netgrad/noise.hpp"
#include "netgrad/objective.hpp"
#include "netgrad/schedule.hpp"

namespace netgrad {

class ConfigError : public std::invalid_argument {
 public:
  using std::invalid_argument::invalid_argument;
};

/// Stacked agent estimates: column n of `x` is agent n's point in R^d.
struct NetworkState {
  Eigen::MatrixXd x;
  long k = 0;
  bool diverged = false;

  Eigen::Index dim() const { return x.rows(); }
  Eigen::Index agents() const { return x.cols(); }
  Eigen::VectorXd mean() const { return x.rowwise().mean(); }
};

/// How the consensus and annealing terms enter the discrete recursion.
///
///   literal:      x_n + b_k sum(x_l - x_n) - a_k (g_n + xi_n) + c_k w_n
///   step_scaled:  x_n + a_k (b_k sum(x_l - x_n) - (g_n + xi_n) + c_k w_n)
///
/// `step_scaled` reads b and c as multiples of the step size a.
enum class UpdateForm { literal, step_scaled };

std::string to_string(UpdateForm form);
UpdateForm update_form_from_string(const std::string& name);

/// Sampled data drives the gradient; f_n is seen only through
/// stochastic_regression_gradient and no extra noise is injected.
struct RegressionSampling {
  RegressionData data;
  bool operator==(const RegressionSampling&) const = default;
};

using GradientSource = std::variant<GradientNoiseModel, RegressionSampling>;

/// Initial network state, either given or drawn per run from the init channel.
struct Initializer {
  enum class Kind {
    fixed,                // every run starts from `fixed`
    uniform_common,       // one U(lo, hi)^d point shared by all agents
    uniform_independent,  // each agent draws its own U(lo, hi)^d point
  };
  Kind kind = Kind::fixed;
  Eigen::MatrixXd fixed;  // d x N, or d x 1 broadcast to all agents
  double lo = 0.0;
  double hi = 1.0;

  static Initializer at(Eigen::MatrixXd states);
  static Initializer uniform(double lo, double hi, bool common);

  NetworkState draw(Eigen::Index d, Eigen::Index n_agents, const RngStream& s) const;
};

struct SimConfig {
  Graph graph;
  AgentObjectives objectives;
  WeightTriple weights;
  GradientSource gradient = GradientNoiseModel::none();
  UpdateForm form = UpdateForm::literal;
  long steps = 1;
  Initializer init;
  double divergence_radius = 1e8;
  long record_every = 1;
  std::uint64_t fingerprint = 0;
};

/// Throws ConfigError when shapes or counts disagree. Returns non-fatal
/// warnings (for example a disconnected graph).
std::vector<std::string> check_config(const SimConfig& cfg);

/// One synchronous update of every agent from the snapshot `s`. The result
/// is flagged diverged when an entry is non-finite or an agent leaves the
/// divergence ball.
NetworkState dsgd_step(const NetworkState& s, const SimConfig& cfg, const RngStream& streams);

struct Trajectory {
  std::vector<long> sample_k;
  std::vector<Eigen::MatrixXd> samples;
  std::vector<double> consensus_error;  // one per sample
  NetworkState final_state;
  bool diverged = false;
  std::uint64_t seed = 0;
  std::uint64_t config_fingerprint = 0;
  std::vector<std::string> warnings;
};

/// Runs cfg.steps D-SGD iterations from cfg.init. Deterministic in (cfg, seed).
Trajectory run(const SimConfig& cfg, std::uint64_t seed);

/// Centralized SGD (+ annealing) reference: the single-agent recursion with
/// agent id 0, sharing the noise channels of dsgd_step.
Eigen::VectorXd sgd_step(const Eigen::VectorXd& x, long k, const Objective& f,
                         const WeightTriple& w, const GradientSource& source,
                         UpdateForm form, const RngStream& streams);

struct ContinuousTrajectory {
  std::vector<double> t;
  std::vector<Eigen::MatrixXd> x;  // d x 1 for gradient flow, d x N for DGF
  bool halted = false;
};

/// Classical fixed-step RK4 on x' = -grad f(x). The step is adjusted down so
/// that an integer number of steps lands exactly on t_end.
ContinuousTrajectory gf_integrate(const Objective& o, const Eigen::VectorXd& x0, double t_end,
                                  double h = 1e-3, long record_every = 1);

/// RK4 on x_n' = beta_t sum(x_l - x_n) - alpha_t grad f_n(x_n) from t0 to t_end,
/// schedules evaluated in continuous time.
ContinuousTrajectory dgf_integrate(const Graph& g, const AgentObjectives& objectives,
                                   const Schedule& alpha, const Schedule& beta,
                                   const Eigen::MatrixXd& x0, double t0, double t_end,
                                   double h = 1e-3, long record_every = 1,
                                   double divergence_radius = 1e8);

}  // namespace netgrad
