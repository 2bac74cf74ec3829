#include "netgrad/objective.hpp"

#include <algorithm>
#include <cmath>
#include <map>
#include <memory>
#include <numbers>
#include <sstream>

namespace netgrad {

Objective scaled(const Objective& g, double scale) {
  Objective f;
  f.name = g.name;
  f.dim = g.dim;
  f.value = [v = g.value, scale](Point x) { return scale * v(x); };
  f.gradient = [gr = g.gradient, scale](Point x) -> Eigen::VectorXd { return scale * gr(x); };
  if (g.hessian) {
    f.hessian = [h = *g.hessian, scale](Point x) -> Eigen::MatrixXd { return scale * h(x); };
  }
  return f;
}

Objective AgentObjectives::sum() const {
  if (agents.empty()) throw std::invalid_argument("no agent objectives");
  Objective F;
  F.name = "sum";
  F.dim = dim();
  auto parts = std::make_shared<const std::vector<Objective>>(agents);
  F.value = [parts](Point x) {
    double s = 0.0;
    for (const auto& f : *parts) s += f.value(x);
    return s;
  };
  F.gradient = [parts](Point x) -> Eigen::VectorXd {
    Eigen::VectorXd g = Eigen::VectorXd::Zero(x.size());
    for (const auto& f : *parts) g += f.gradient(x);
    return g;
  };
  const bool all_hess = std::all_of(agents.begin(), agents.end(),
                                    [](const Objective& f) { return f.has_hessian(); });
  if (all_hess) {
    F.hessian = [parts](Point x) -> Eigen::MatrixXd {
      Eigen::MatrixXd H = Eigen::MatrixXd::Zero(x.size(), x.size());
      for (const auto& f : *parts) H += (*f.hessian)(x);
      return H;
    };
  }
  return F;
}

AgentObjectives split_evenly(const Objective& F, int n_agents) {
  if (n_agents < 1) throw std::invalid_argument("agent count must be >= 1");
  AgentObjectives out;
  out.agents.assign(static_cast<std::size_t>(n_agents), scaled(F, 1.0 / n_agents));
  return out;
}

AgentObjectives replicate(const Objective& F, int n_agents) {
  if (n_agents < 1) throw std::invalid_argument("agent count must be >= 1");
  AgentObjectives out;
  out.agents.assign(static_cast<std::size_t>(n_agents), F);
  return out;
}

Objective zero_objective(Eigen::Index d) {
  Objective f;
  f.name = "zero";
  f.dim = d;
  f.value = [](Point) { return 0.0; };
  f.gradient = [d](Point) -> Eigen::VectorXd { return Eigen::VectorXd::Zero(d); };
  f.hessian = [d](Point) -> Eigen::MatrixXd { return Eigen::MatrixXd::Zero(d, d); };
  return f;
}

Objective quadratic_saddle(int d, int q) {
  if (d < 2) throw std::invalid_argument("quadratic_saddle needs d >= 2");
  if (q < 1 || q > d) throw std::invalid_argument("quadratic_saddle needs 1 <= q <= d");
  Eigen::VectorXd diag = Eigen::VectorXd::Ones(d);
  diag.tail(q).setConstant(-1.0);
  Objective f;
  f.name = "quadratic_saddle";
  f.dim = d;
  f.value = [diag](Point x) { return 0.5 * x.dot(diag.cwiseProduct(x)); };
  f.gradient = [diag](Point x) -> Eigen::VectorXd { return diag.cwiseProduct(x); };
  f.hessian = [diag](Point) -> Eigen::MatrixXd { return diag.asDiagonal(); };
  return f;
}

Objective cubic_saddle() {
  Objective f;
  f.name = "cubic_saddle";
  f.dim = 2;
  f.value = [](Point x) {
    const double a = x(0), b = x(1);
    return a * a - b * b + a * a * b + a * b * b;
  };
  f.gradient = [](Point x) -> Eigen::VectorXd {
    const double a = x(0), b = x(1);
    return Eigen::Vector2d(2 * a + 2 * a * b + b * b, -2 * b + a * a + 2 * a * b);
  };
  f.hessian = [](Point x) -> Eigen::MatrixXd {
    const double a = x(0), b = x(1);
    Eigen::Matrix2d H;
    H << 2 + 2 * b, 2 * a + 2 * b,
         2 * a + 2 * b, -2 + 2 * a;
    return H;
  };
  return f;
}

Objective double_well_1d() {
  Objective f;
  f.name = "double_well_1d";
  f.dim = 1;
  f.value = [](Point x) {
    const double w = x(0);
    return w * w * w * w - w * w + 0.3 * w;
  };
  f.gradient = [](Point x) -> Eigen::VectorXd {
    const double w = x(0);
    return Eigen::VectorXd::Constant(1, 4 * w * w * w - 2 * w + 0.3);
  };
  f.hessian = [](Point x) -> Eigen::MatrixXd {
    const double w = x(0);
    return Eigen::MatrixXd::Constant(1, 1, 12 * w * w - 2);
  };
  return f;
}

Objective quartic_saddle() {
  Objective f;
  f.name = "quartic_saddle";
  f.dim = 2;
  f.value = [](Point x) {
    const double a = x(0), b = x(1);
    return 0.25 * a * a * a * a - 0.5 * a * a + 0.5 * b * b;
  };
  f.gradient = [](Point x) -> Eigen::VectorXd {
    return Eigen::Vector2d(x(0) * x(0) * x(0) - x(0), x(1));
  };
  f.hessian = [](Point x) -> Eigen::MatrixXd {
    Eigen::Matrix2d H;
    H << 3 * x(0) * x(0) - 1, 0,
         0, 1;
    return H;
  };
  return f;
}

namespace {

/// Gauss-Legendre nodes/weights on [-1, 1] via the Golub-Welsch eigenproblem.
std::pair<Eigen::VectorXd, Eigen::VectorXd> gauss_legendre(int n) {
  Eigen::MatrixXd J = Eigen::MatrixXd::Zero(n, n);
  for (int i = 1; i < n; ++i) {
    const double b = i / std::sqrt(4.0 * i * i - 1.0);
    J(i, i - 1) = J(i - 1, i) = b;
  }
  Eigen::SelfAdjointEigenSolver<Eigen::MatrixXd> es(J);
  Eigen::VectorXd w = 2.0 * es.eigenvectors().row(0).transpose().array().square();
  return {es.eigenvalues(), w};
}

/// Tensor rule for E over (x, branch, eps). Each node carries (x, y, weight).
struct RegressionRule {
  Eigen::VectorXd x, y, w;
};

std::shared_ptr<const RegressionRule> make_rule(const RegressionData& data) {
  constexpr int kPanels = 12;
  constexpr int kNodes = 16;
  constexpr double kEpsHalfWidth = 8.0;  // in units of noise_std
  constexpr double kEpsStep = 0.1;

  const auto [gx, gw] = gauss_legendre(kNodes);
  const int n_eps = static_cast<int>(std::lround(2 * kEpsHalfWidth / kEpsStep)) + 1;
  std::vector<double> eps(n_eps), eps_w(n_eps);
  double eps_total = 0.0;
  for (int j = 0; j < n_eps; ++j) {
    const double z = -kEpsHalfWidth + j * kEpsStep;
    eps[j] = data.noise_std * z;
    eps_w[j] = std::exp(-0.5 * z * z);
    eps_total += eps_w[j];
  }
  for (auto& v : eps_w) v /= eps_total;

  const double len = data.x_hi - data.x_lo;
  const double panel = len / kPanels;
  const Eigen::Index total = static_cast<Eigen::Index>(kPanels) * kNodes * 2 * n_eps;
  auto rule = std::make_shared<RegressionRule>();
  rule->x.resize(total);
  rule->y.resize(total);
  rule->w.resize(total);
  Eigen::Index idx = 0;
  for (int p = 0; p < kPanels; ++p) {
    const double mid = data.x_lo + (p + 0.5) * panel;
    for (int i = 0; i < kNodes; ++i) {
      const double x = mid + 0.5 * panel * gx(i);
      const double wx = 0.5 * panel * gw(i) / len;  // density 1/len
      for (int branch = 0; branch < 2; ++branch) {
        const double slope = branch == 0 ? data.slope_major : data.slope_minor;
        const double pb = branch == 0 ? data.mix_p : 1.0 - data.mix_p;
        for (int j = 0; j < n_eps; ++j) {
          rule->x(idx) = x;
          rule->y(idx) = slope * x + eps[j];
          rule->w(idx) = wx * pb * eps_w[j];
          ++idx;
        }
      }
    }
  }
  return rule;
}

Objective regression_risk(const RegressionData& data, double scale, const std::string& name) {
  auto rule = make_rule(data);
  Objective f;
  f.name = name;
  f.dim = 1;
  f.value = [rule, scale](Point p) {
    const double w = p(0);
    const Eigen::ArrayXd r = w * rule->x.array() - rule->y.array();
    return scale * (rule->w.array() * (8.0 * r.square() + 1.0).log()).sum();
  };
  f.gradient = [rule, scale](Point p) -> Eigen::VectorXd {
    const double w = p(0);
    const Eigen::ArrayXd r = w * rule->x.array() - rule->y.array();
    const double g =
        (rule->w.array() * 16.0 * rule->x.array() * r / (8.0 * r.square() + 1.0)).sum();
    return Eigen::VectorXd::Constant(1, scale * g);
  };
  f.hessian = [rule, scale](Point p) -> Eigen::MatrixXd {
    const double w = p(0);
    const Eigen::ArrayXd r = w * rule->x.array() - rule->y.array();
    const Eigen::ArrayXd den = 8.0 * r.square() + 1.0;
    const double h = (rule->w.array() * 16.0 * rule->x.array().square() *
                      (1.0 - 8.0 * r.square()) / den.square())
                         .sum();
    return Eigen::MatrixXd::Constant(1, 1, scale * h);
  };
  return f;
}

}  // namespace

Objective regression_population_risk(const RegressionData& data) {
  return regression_risk(data, 1.0, "regression_population_risk");
}

AgentObjectives robust_regression(int n_agents, const RegressionData& data) {
  if (n_agents < 1) throw std::invalid_argument("agent count must be >= 1");
  AgentObjectives out;
  out.agents.assign(static_cast<std::size_t>(n_agents),
                    regression_risk(data, 1.0 / n_agents, "robust_regression"));
  return out;
}

Objective objective_from_spec(const std::string& spec) {
  const auto colon = spec.find(':');
  const std::string name = spec.substr(0, colon);
  std::map<std::string, long> params;
  if (colon != std::string::npos) {
    std::istringstream ss(spec.substr(colon + 1));
    std::string item;
    while (std::getline(ss, item, ',')) {
      const auto eq = item.find('=');
      if (eq == std::string::npos)
        throw std::invalid_argument("objective parameter '" + item + "' is not key=value");
      try {
        params[item.substr(0, eq)] = std::stol(item.substr(eq + 1));
      } catch (const std::exception&) {
        throw std::invalid_argument("objective parameter '" + item + "' is not an integer");
      }
    }
  }
  auto get = [&](const std::string& key, long fallback) {
    const auto it = params.find(key);
    return it == params.end() ? fallback : it->second;
  };
  if (name == "quadratic_saddle")
    return quadratic_saddle(static_cast<int>(get("d", 2)), static_cast<int>(get("q", 1)));
  if (name == "cubic_saddle") return cubic_saddle();
  if (name == "double_well_1d") return double_well_1d();
  if (name == "quartic_saddle") return quartic_saddle();
  if (name == "zero") return zero_objective(get("d", 1));
  if (name == "robust_regression") return regression_population_risk();
  throw std::invalid_argument("unknown objective '" + name + "'");
}

std::string to_string(CriticalKind kind) {
  switch (kind) {
    case CriticalKind::local_min: return "local-min";
    case CriticalKind::local_max: return "local-max";
    case CriticalKind::regular_saddle: return "regular-saddle";
    case CriticalKind::degenerate: return "degenerate";
    case CriticalKind::not_critical: return "not-critical";
  }
  return "unknown";
}

Eigen::MatrixXd finite_difference_hessian(const Objective& o, Point x, double h) {
  const Eigen::Index d = x.size();
  Eigen::MatrixXd H(d, d);
  Eigen::VectorXd xp = x, xm = x;
  for (Eigen::Index i = 0; i < d; ++i) {
    xp(i) = x(i) + h;
    xm(i) = x(i) - h;
    H.col(i) = (o.gradient(xp) - o.gradient(xm)) / (2.0 * h);
    xp(i) = xm(i) = x(i);
  }
  return 0.5 * (H + H.transpose());
}

CriticalPointClass classify(const Objective& o, Point x, const ClassifyOptions& opts) {
  CriticalPointClass out;
  if (!o.has_hessian() && !opts.allow_finite_difference)
    throw UnsupportedOperation("objective '" + o.name + "' has no Hessian");
  const Eigen::MatrixXd H =
      o.has_hessian() ? (*o.hessian)(x) : finite_difference_hessian(o, x, opts.fd_step);
  Eigen::SelfAdjointEigenSolver<Eigen::MatrixXd> es(0.5 * (H + H.transpose()),
                                                    Eigen::EigenvaluesOnly);
  out.eigenvalues = es.eigenvalues();
  const double radius = out.eigenvalues.cwiseAbs().maxCoeff();
  const double eig_tol = opts.eig_tol >= 0 ? opts.eig_tol : 1e-8 * (1.0 + radius);
  out.min_abs_eigenvalue = out.eigenvalues.cwiseAbs().minCoeff();
  out.q = static_cast<int>((out.eigenvalues.array() < -eig_tol).count());

  if (o.gradient(x).norm() > opts.grad_tol) {
    out.kind = CriticalKind::not_critical;
  } else if (out.min_abs_eigenvalue <= eig_tol) {
    out.kind = CriticalKind::degenerate;
  } else if (out.q == 0) {
    out.kind = CriticalKind::local_min;
  } else if (out.q == x.size()) {
    out.kind = CriticalKind::local_max;
  } else {
    out.kind = CriticalKind::regular_saddle;
  }
  return out;
}

double check_gradient(const Objective& o, Point x, double h) {
  if (!(h > 0)) throw std::invalid_argument("finite-difference step must be positive");
  const Eigen::VectorXd g = o.gradient(x);
  Eigen::VectorXd xp = x, xm = x;
  double worst = 0.0;
  for (Eigen::Index i = 0; i < x.size(); ++i) {
    xp(i) = x(i) + h;
    xm(i) = x(i) - h;
    const double numeric = (o.value(xp) - o.value(xm)) / (2.0 * h);
    xp(i) = xm(i) = x(i);
    worst = std::max(worst, std::abs(g(i) - numeric) / std::max(1.0, std::abs(g(i))));
  }
  return worst;
}

double check_hessian(const Objective& o, Point x, double h) {
  if (!o.has_hessian()) throw UnsupportedOperation("objective '" + o.name + "' has no Hessian");
  const Eigen::MatrixXd H = (*o.hessian)(x);
  const Eigen::MatrixXd Hfd = finite_difference_hessian(o, x, h);
  return (H - Hfd).cwiseAbs().maxCoeff() / std::max(1.0, H.cwiseAbs().maxCoeff());
}

}  // namespace netgrad
