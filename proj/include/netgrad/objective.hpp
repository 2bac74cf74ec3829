#pragma once

#include <functional>
#include <optional>
#include <stdexcept>
#include <string>
#include <vector>

#include <Eigen/Dense>

#include "netgrad/noise.hpp"

namespace netgrad {

using Point = Eigen::Ref<const Eigen::VectorXd>;

class UnsupportedOperation : public std::logic_error {
 public:
  using std::logic_error::logic_error;
};

/// A smooth function R^d -> R with its gradient and, optionally, its Hessian.
struct Objective {
  std::string name;
  Eigen::Index dim = 1;
  std::function<double(Point)> value;
  std::function<Eigen::VectorXd(Point)> gradient;
  std::optional<std::function<Eigen::MatrixXd(Point)>> hessian;

  bool has_hessian() const { return hessian.has_value(); }
};

/// f(x) = scale * g(x).
Objective scaled(const Objective& g, double scale);

/// N per-agent objectives of a common dimension and their sum F.
struct AgentObjectives {
  std::vector<Objective> agents;

  Eigen::Index dim() const { return agents.empty() ? 0 : agents.front().dim; }
  int size() const { return static_cast<int>(agents.size()); }

  /// F(x) = sum_n f_n(x).
  Objective sum() const;
};

/// f_n = F / N for every agent.
AgentObjectives split_evenly(const Objective& F, int n_agents);

/// f_n = F for every agent (the sum is N F, same critical points as F).
AgentObjectives replicate(const Objective& F, int n_agents);

Objective zero_objective(Eigen::Index d);

/// 1/2 x^T A x with A = diag(+1 x (d - q), -1 x q).
Objective quadratic_saddle(int d, int q);

/// x1^2 - x2^2 + x1^2 x2 + x1 x2^2; regular saddle at the origin.
Objective cubic_saddle();

/// w^4 - w^2 + 0.3 w; two wells of different depth.
Objective double_well_1d();

/// 1/4 x1^4 - 1/2 x1^2 + 1/2 x2^2; saddle at 0, minima at (+-1, 0).
Objective quartic_saddle();

/// Per-agent population risk (1/N) E[log(8 (w x - y)^2 + 1)] over the
/// two-branch data law. There is no closed form; value, gradient and Hessian
/// come from one fixed tensor quadrature rule (Gauss-Legendre panels in x,
/// trapezoid in the Gaussian noise), so they are mutually consistent but only
/// approximate the true risk.
AgentObjectives robust_regression(int n_agents, const RegressionData& data = {});

/// Population risk E[L] (unscaled) under the same quadrature.
Objective regression_population_risk(const RegressionData& data = {});

/// Builds an objective from a registry spec such as `quadratic_saddle:d=2,q=1`,
/// `cubic_saddle`, `double_well_1d`, `quartic_saddle`, `zero:d=3`.
/// Throws std::invalid_argument on unknown names or bad parameters.
Objective objective_from_spec(const std::string& spec);

enum class CriticalKind { local_min, local_max, regular_saddle, degenerate, not_critical };

std::string to_string(CriticalKind kind);

struct CriticalPointClass {
  CriticalKind kind = CriticalKind::not_critical;
  int q = 0;  // negative Hessian eigenvalues
  double min_abs_eigenvalue = 0.0;
  Eigen::VectorXd eigenvalues;
};

struct ClassifyOptions {
  double grad_tol = 1e-6;
  /// Negative selects the default 1e-8 (1 + spectral radius).
  double eig_tol = -1.0;
  bool allow_finite_difference = true;
  double fd_step = 1e-5;
};

/// Throws UnsupportedOperation when no Hessian is available and the
/// finite-difference fallback is disabled.
CriticalPointClass classify(const Objective& o, Point x, const ClassifyOptions& opts = {});

/// Central-difference Hessian from the gradient, symmetrized.
Eigen::MatrixXd finite_difference_hessian(const Objective& o, Point x, double h = 1e-5);

/// max_i |g_i - g~_i| / max(1, |g_i|), g~ by central differences of value.
double check_gradient(const Objective& o, Point x, double h = 1e-5);

/// Relative error of the Hessian against central differences of the gradient.
double check_hessian(const Objective& o, Point x, double h = 1e-5);

}  // namespace netgrad
