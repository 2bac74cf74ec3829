#include "netgrad/engine.hpp"

#include <cmath>
#include <limits>

#include "netgrad/analysis.hpp"

namespace netgrad {

std::string to_string(UpdateForm form) {
  return form == UpdateForm::literal ? "literal" : "step_scaled";
}

UpdateForm update_form_from_string(const std::string& name) {
  if (name == "literal") return UpdateForm::literal;
  if (name == "step_scaled") return UpdateForm::step_scaled;
  throw std::invalid_argument("unknown update form '" + name +
                              "' (expected literal or step_scaled)");
}

Initializer Initializer::at(Eigen::MatrixXd states) {
  Initializer init;
  init.kind = Kind::fixed;
  init.fixed = std::move(states);
  return init;
}

Initializer Initializer::uniform(double lo, double hi, bool common) {
  if (!(lo < hi)) throw std::invalid_argument("uniform initializer needs lo < hi");
  Initializer init;
  init.kind = common ? Kind::uniform_common : Kind::uniform_independent;
  init.lo = lo;
  init.hi = hi;
  return init;
}

NetworkState Initializer::draw(Eigen::Index d, Eigen::Index n_agents,
                               const RngStream& s) const {
  NetworkState out;
  out.x.resize(d, n_agents);
  switch (kind) {
    case Kind::fixed:
      if (fixed.rows() != d || (fixed.cols() != 1 && fixed.cols() != n_agents))
        throw ConfigError("initial state has shape " + std::to_string(fixed.rows()) + "x" +
                          std::to_string(fixed.cols()) + ", expected " + std::to_string(d) +
                          "x1 or " + std::to_string(d) + "x" + std::to_string(n_agents));
      if (fixed.cols() == 1)
        out.x = fixed.col(0).replicate(1, n_agents);
      else
        out.x = fixed;
      break;
    case Kind::uniform_common: {
      auto sub = s.substream(0, 0, Channel::init);
      Eigen::VectorXd p(d);
      for (Eigen::Index i = 0; i < d; ++i) p(i) = lo + (hi - lo) * sub.uniform();
      out.x = p.replicate(1, n_agents);
      break;
    }
    case Kind::uniform_independent:
      for (Eigen::Index n = 0; n < n_agents; ++n) {
        auto sub = s.substream(static_cast<std::uint64_t>(n), 0, Channel::init);
        for (Eigen::Index i = 0; i < d; ++i) out.x(i, n) = lo + (hi - lo) * sub.uniform();
      }
      break;
  }
  return out;
}

std::vector<std::string> check_config(const SimConfig& cfg) {
  std::vector<std::string> warnings;
  const auto n = cfg.objectives.size();
  if (n < 1) throw ConfigError("no agent objectives configured");
  if (static_cast<std::size_t>(n) != cfg.graph.size())
    throw ConfigError("graph has " + std::to_string(cfg.graph.size()) + " vertices but " +
                      std::to_string(n) + " agent objectives are configured");
  const auto d = cfg.objectives.dim();
  for (const auto& f : cfg.objectives.agents)
    if (f.dim != d) throw ConfigError("agent objectives disagree on dimension");
  if (cfg.steps < 1) throw ConfigError("steps must be >= 1");
  if (cfg.record_every < 1) throw ConfigError("record_every must be >= 1");
  if (!(cfg.divergence_radius > 0)) throw ConfigError("divergence_radius must be positive");
  if (std::holds_alternative<RegressionSampling>(cfg.gradient) && d != 1)
    throw ConfigError("regression sampling needs a one-dimensional objective");
  if (cfg.init.kind == Initializer::Kind::fixed &&
      (cfg.init.fixed.rows() != d ||
       (cfg.init.fixed.cols() != 1 && cfg.init.fixed.cols() != n)))
    throw ConfigError("initial state does not match dimension " + std::to_string(d) +
                      " and " + std::to_string(n) + " agents");
  if (!is_connected(cfg.graph))
    warnings.push_back("communication graph is not connected (undirected and connected "
                       "graphs are required for consensus)");
  return warnings;
}

namespace {

Eigen::VectorXd noisy_gradient(const Objective& f, const Eigen::Ref<const Eigen::VectorXd>& x,
                               std::uint64_t agent, long k, int n_agents,
                               const GradientSource& source, const RngStream& streams) {
  const auto kk = static_cast<std::uint64_t>(k);
  if (const auto* reg = std::get_if<RegressionSampling>(&source)) {
    const auto sample = sample_regression(reg->data, streams, agent, kk);
    return Eigen::VectorXd::Constant(1, stochastic_regression_gradient(x(0), sample, n_agents));
  }
  const auto& model = std::get<GradientNoiseModel>(source);
  Eigen::VectorXd g = f.gradient(x);
  if (model.kind != GradientNoiseModel::Kind::none)
    g += draw_gradient_noise(model, streams, agent, kk, x.size());
  return g;
}

bool out_of_bounds(const Eigen::MatrixXd& x, double radius) {
  if (!x.allFinite()) return true;
  for (Eigen::Index n = 0; n < x.cols(); ++n)
    if (!(x.col(n).norm() <= radius)) return true;
  return false;
}

}  // namespace

NetworkState dsgd_step(const NetworkState& s, const SimConfig& cfg, const RngStream& streams) {
  const Eigen::Index d = s.dim();
  const Eigen::Index n_agents = s.agents();
  const double a = cfg.weights.alpha(s.k);
  const double b = cfg.weights.beta(s.k);
  const double c = cfg.weights.gamma(s.k);

  NetworkState next;
  next.k = s.k + 1;
  next.x.resize(d, n_agents);
  Eigen::VectorXd consensus(d);
  for (Eigen::Index n = 0; n < n_agents; ++n) {
    const auto agent = static_cast<std::uint64_t>(n);
    const auto xn = s.x.col(n);
    consensus.setZero();
    for (std::size_t l : cfg.graph.neighbors(agent))
      consensus += s.x.col(static_cast<Eigen::Index>(l)) - xn;
    const Eigen::VectorXd g =
        noisy_gradient(cfg.objectives.agents[agent], xn, agent, s.k,
                       static_cast<int>(n_agents), cfg.gradient, streams);
    if (cfg.form == UpdateForm::literal) {
      next.x.col(n) = xn + b * consensus - a * g;
      if (c != 0.0)
        next.x.col(n) += c * draw_annealing_noise(streams, agent, static_cast<std::uint64_t>(s.k), d);
    } else {
      Eigen::VectorXd inner = b * consensus - g;
      if (c != 0.0)
        inner += c * draw_annealing_noise(streams, agent, static_cast<std::uint64_t>(s.k), d);
      next.x.col(n) = xn + a * inner;
    }
  }
  next.diverged = s.diverged || out_of_bounds(next.x, cfg.divergence_radius);
  return next;
}

Eigen::VectorXd sgd_step(const Eigen::VectorXd& x, long k, const Objective& f,
                         const WeightTriple& w, const GradientSource& source, UpdateForm form,
                         const RngStream& streams) {
  const double a = w.alpha(k);
  const double c = w.gamma(k);
  const Eigen::VectorXd g = noisy_gradient(f, x, 0, k, 1, source, streams);
  if (form == UpdateForm::literal) {
    Eigen::VectorXd next = x - a * g;
    if (c != 0.0) next += c * draw_annealing_noise(streams, 0, static_cast<std::uint64_t>(k), x.size());
    return next;
  }
  Eigen::VectorXd inner = -g;
  if (c != 0.0) inner += c * draw_annealing_noise(streams, 0, static_cast<std::uint64_t>(k), x.size());
  return x + a * inner;
}

Trajectory run(const SimConfig& cfg, std::uint64_t seed) {
  Trajectory traj;
  traj.warnings = check_config(cfg);
  traj.seed = seed;
  traj.config_fingerprint = cfg.fingerprint;

  const RngStream streams(seed);
  NetworkState state = cfg.init.draw(cfg.objectives.dim(), cfg.objectives.size(), streams);
  state.diverged = out_of_bounds(state.x, cfg.divergence_radius);

  auto record = [&](const NetworkState& s) {
    traj.sample_k.push_back(s.k);
    traj.samples.push_back(s.x);
    traj.consensus_error.push_back(consensus_error(s.x));
  };
  record(state);
  while (!state.diverged && state.k < cfg.steps) {
    state = dsgd_step(state, cfg, streams);
    if (state.diverged) break;
    if (state.k % cfg.record_every == 0) record(state);
  }
  traj.diverged = state.diverged;
  traj.final_state = std::move(state);
  return traj;
}

namespace {

template <typename Rhs>
ContinuousTrajectory rk4(Rhs&& rhs, Eigen::MatrixXd x, double t0, double t_end, double h,
                         long record_every, double radius) {
  if (!(h > 0)) throw std::invalid_argument("step size must be positive");
  if (!(t_end > t0)) throw std::invalid_argument("t_end must exceed the start time");
  if (record_every < 1) throw std::invalid_argument("record_every must be >= 1");
  const long steps = static_cast<long>(std::ceil((t_end - t0) / h - 1e-9));
  const double dt = (t_end - t0) / static_cast<double>(steps);

  ContinuousTrajectory out;
  out.t.push_back(t0);
  out.x.push_back(x);
  for (long i = 0; i < steps; ++i) {
    const double t = t0 + static_cast<double>(i) * dt;
    const Eigen::MatrixXd k1 = rhs(t, x);
    const Eigen::MatrixXd k2 = rhs(t + 0.5 * dt, x + 0.5 * dt * k1);
    const Eigen::MatrixXd k3 = rhs(t + 0.5 * dt, x + 0.5 * dt * k2);
    const Eigen::MatrixXd k4 = rhs(t + dt, x + dt * k3);
    x += (dt / 6.0) * (k1 + 2.0 * k2 + 2.0 * k3 + k4);
    const double t_next = (i + 1 == steps) ? t_end : t0 + static_cast<double>(i + 1) * dt;
    if (out_of_bounds(x, radius)) {
      out.halted = true;
      out.t.push_back(t_next);
      out.x.push_back(x);
      return out;
    }
    if ((i + 1) % record_every == 0 || i + 1 == steps) {
      out.t.push_back(t_next);
      out.x.push_back(x);
    }
  }
  return out;
}

}  // namespace

ContinuousTrajectory gf_integrate(const Objective& o, const Eigen::VectorXd& x0, double t_end,
                                  double h, long record_every) {
  if (x0.size() != o.dim) throw std::invalid_argument("initial point has the wrong dimension");
  auto rhs = [&o](double, const Eigen::MatrixXd& x) -> Eigen::MatrixXd {
    return -o.gradient(x.col(0));
  };
  return rk4(rhs, Eigen::MatrixXd(x0), 0.0, t_end, h, record_every,
             std::numeric_limits<double>::infinity());
}

ContinuousTrajectory dgf_integrate(const Graph& g, const AgentObjectives& objectives,
                                   const Schedule& alpha, const Schedule& beta,
                                   const Eigen::MatrixXd& x0, double t0, double t_end, double h,
                                   long record_every, double divergence_radius) {
  if (static_cast<std::size_t>(objectives.size()) != g.size() ||
      x0.cols() != objectives.size() || x0.rows() != objectives.dim())
    throw std::invalid_argument("graph, objectives and initial state disagree in shape");
  if (t0 < 0) throw std::invalid_argument("t0 must be >= 0");
  const Eigen::MatrixXd L = laplacian(g);
  auto rhs = [&](double t, const Eigen::MatrixXd& x) -> Eigen::MatrixXd {
    Eigen::MatrixXd grad(x.rows(), x.cols());
    for (Eigen::Index n = 0; n < x.cols(); ++n)
      grad.col(n) = objectives.agents[static_cast<std::size_t>(n)].gradient(x.col(n));
    return -beta.at(t) * (x * L) - alpha.at(t) * grad;
  };
  return rk4(rhs, x0, t0, t_end, h, record_every, divergence_radius);
}

}  // namespace netgrad
