#include "netgrad/schedule.hpp"

#include <algorithm>
#include <cmath>
#include <sstream>
#include <stdexcept>

#include "netgrad/graph.hpp"

namespace netgrad {

namespace {

constexpr long kAnnealingMinOffset = 16;

std::string fmt(double v) {
  std::ostringstream ss;
  ss << v;
  return ss.str();
}

void require(bool ok, const std::string& msg) {
  if (!ok) throw std::invalid_argument(msg);
}

}  // namespace

std::string to_string(Law law) {
  switch (law) {
    case Law::power: return "power";
    case Law::exponential: return "exponential";
    case Law::exp_sqrt: return "exp_sqrt";
    case Law::annealing: return "annealing";
    case Law::constant: return "constant";
  }
  return "unknown";
}

Law law_from_string(const std::string& name) {
  if (name == "power") return Law::power;
  if (name == "exponential") return Law::exponential;
  if (name == "exp_sqrt" || name == "exp-sqrt") return Law::exp_sqrt;
  if (name == "annealing") return Law::annealing;
  if (name == "constant") return Law::constant;
  throw std::invalid_argument("unknown schedule law '" + name + "'");
}

Schedule Schedule::power(double c, double tau, long k0) {
  require(std::isfinite(c) && c > 0, "power law needs c > 0");
  require(std::isfinite(tau) && tau >= 0, "power law needs tau >= 0");
  require(k0 >= 1, "power law needs k0 >= 1");
  return Schedule(Law::power, c, tau, 1.0, k0);
}

Schedule Schedule::exponential(double c, double r) {
  require(std::isfinite(c) && c > 0, "exponential law needs c > 0");
  require(r > 0 && r <= 1, "exponential law needs r in (0, 1]");
  return Schedule(Law::exponential, c, 0.0, r, 0);
}

Schedule Schedule::exp_sqrt(double c, double r) {
  require(std::isfinite(c) && c > 0, "exp_sqrt law needs c > 0");
  require(r > 0 && r <= 1, "exp_sqrt law needs r in (0, 1]");
  return Schedule(Law::exp_sqrt, c, 0.0, r, 0);
}

Schedule Schedule::annealing(double c, long k0) {
  require(std::isfinite(c) && c > 0, "annealing law needs c > 0");
  // log log (k + k0) must be positive at k = 0; e^e ~ 15.15.
  return Schedule(Law::annealing, c, 0.5, 1.0, std::max(k0, kAnnealingMinOffset));
}

Schedule Schedule::constant(double c) {
  require(std::isfinite(c) && c >= 0, "constant law needs c >= 0");
  return Schedule(Law::constant, c, 0.0, 1.0, 0);
}

Schedule Schedule::make(Law law, double c, double tau, double r, long k0) {
  switch (law) {
    case Law::power: return power(c, tau, k0);
    case Law::exponential: return exponential(c, r);
    case Law::exp_sqrt: return exp_sqrt(c, r);
    case Law::annealing: return annealing(c, k0);
    case Law::constant: return constant(c);
  }
  throw std::invalid_argument("unknown schedule law");
}

double Schedule::at(double t) const {
  const double s = t + static_cast<double>(k0_);
  switch (law_) {
    case Law::power: return c_ * std::pow(s, -tau_);
    case Law::exponential: return c_ * std::pow(r_, t);
    case Law::exp_sqrt: return c_ * std::pow(r_, std::sqrt(t));
    case Law::annealing: return c_ / std::sqrt(s * std::log(std::log(s)));
    case Law::constant: return c_;
  }
  return 0.0;
}

double Schedule::integral(double t) const {
  const double a = static_cast<double>(k0_);
  switch (law_) {
    case Law::constant: return c_ * t;
    case Law::power:
      if (tau_ == 1.0) return c_ * std::log((t + a) / a);
      return c_ * (std::pow(t + a, 1.0 - tau_) - std::pow(a, 1.0 - tau_)) / (1.0 - tau_);
    case Law::exponential:
      if (r_ == 1.0) return c_ * t;
      return c_ * (std::pow(r_, t) - 1.0) / std::log(r_);
    default:
      throw std::logic_error("integral not available for " + to_string(law_) + " law");
  }
}

void ValidationReport::merge(const ValidationReport& other) {
  passed = passed && other.passed;
  errors.insert(errors.end(), other.errors.begin(), other.errors.end());
  warnings.insert(warnings.end(), other.warnings.begin(), other.warnings.end());
}

namespace {

ValidationReport finish(ValidationReport r, ValidationMode mode) {
  if (mode == ValidationMode::permissive && !r.passed) {
    for (auto& e : r.errors) r.warnings.push_back("off-schedule: " + e);
    r.errors.clear();
    r.passed = true;
  }
  return r;
}

}  // namespace

ValidationReport validate_dsgd(const WeightTriple& w, ValidationMode mode) {
  ValidationReport r;
  const auto& a = w.alpha;
  const auto& b = w.beta;
  if (a.law() != Law::power) {
    r.fail("alpha must be a power law c(k+k0)^-tau with tau in (1/2, 1], got " +
           to_string(a.law()));
  } else if (!(a.tau() > 0.5 && a.tau() <= 1.0)) {
    r.fail("alpha exponent tau = " + fmt(a.tau()) + " is outside (1/2, 1]");
  }
  if (b.law() == Law::power) {
    if (a.law() == Law::power && !(b.tau() < a.tau()))
      r.fail("beta exponent " + fmt(b.tau()) + " must be below alpha exponent " +
             fmt(a.tau()));
  } else if (b.law() != Law::constant) {
    r.fail("beta must be a power law or constant, got " + to_string(b.law()));
  }
  if (b.law() == Law::constant && b.c() == 0.0)
    r.warn("beta = 0 disables the consensus term");
  if (!w.gamma.is_zero())
    r.fail("gamma must be constant(0) for plain D-SGD, got " + to_string(w.gamma.law()));
  return finish(std::move(r), mode);
}

ValidationReport validate_annealing(const WeightTriple& w, double ratio_floor,
                                    AnnealingRatio ratio, ValidationMode mode) {
  ValidationReport r;
  const auto& a = w.alpha;
  const auto& g = w.gamma;
  const bool alpha_ok = a.law() == Law::power && a.tau() == 1.0;
  const bool gamma_ok = g.law() == Law::annealing;
  if (!alpha_ok) r.fail("alpha must be power(c_alpha, tau = 1)");
  if (!gamma_ok) r.fail("gamma must be annealing(c_gamma), got " + to_string(g.law()));
  if (alpha_ok && gamma_ok) {
    const double value = ratio == AnnealingRatio::distributed ? g.c() * g.c() / a.c()
                                                              : g.c() / a.c();
    const std::string name =
        ratio == AnnealingRatio::distributed ? "c_gamma^2/c_alpha" : "c_gamma/c_alpha";
    if (!(value > ratio_floor))
      r.fail(name + " = " + fmt(value) + " does not exceed the floor " + fmt(ratio_floor));
  }
  return finish(std::move(r), mode);
}

ValidationReport check_consensus_weight(const Schedule& beta, const Graph& g) {
  ValidationReport r;
  if (beta.law() == Law::constant && g.max_degree() > 0) {
    const double limit = 1.0 / (2.0 * static_cast<double>(g.max_degree()));
    if (beta.c() >= limit)
      r.warn("constant beta = " + fmt(beta.c()) + " is not below 1/(2 max-degree) = " +
             fmt(limit) + "; the literal consensus step may not contract");
  }
  return r;
}

}  // namespace netgrad
