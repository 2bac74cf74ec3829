#pragma once

#include <string>
#include <vector>

namespace netgrad {

class Graph;

enum class Law { power, exponential, exp_sqrt, annealing, constant };

std::string to_string(Law law);
Law law_from_string(const std::string& name);

/// A weight sequence evaluated at an iteration counter (or continuous time).
///
///   power(c, tau)     c (k + k0)^-tau                k0 defaults to 1
///   exponential(c, r) c r^k
///   exp_sqrt(c, r)    c r^sqrt(k)
///   annealing(c)      c ((k + k0) log log (k + k0))^-1/2,  k0 >= 16
///   constant(c)       c                              c = 0 allowed
///
/// Construction validates parameters; evaluation never fails.
class Schedule {
 public:
  static Schedule power(double c, double tau, long k0 = 1);
  static Schedule exponential(double c, double r);
  static Schedule exp_sqrt(double c, double r);
  static Schedule annealing(double c, long k0 = 16);
  static Schedule constant(double c);

  /// Generic builder used by configuration code. Ignores parameters the law
  /// does not use.
  static Schedule make(Law law, double c, double tau, double r, long k0);

  double operator()(long k) const { return at(static_cast<double>(k)); }

  /// Continuous-time evaluation at t >= 0 (shift k0 applies).
  double at(double t) const;

  /// Antiderivative of the law from 0 to t. Defined for power and constant laws.
  double integral(double t) const;

  Law law() const { return law_; }
  double c() const { return c_; }
  double tau() const { return tau_; }
  double r() const { return r_; }
  long k0() const { return k0_; }

  bool is_zero() const { return law_ == Law::constant && c_ == 0.0; }

  bool operator==(const Schedule&) const = default;

 private:
  Schedule(Law law, double c, double tau, double r, long k0)
      : law_(law), c_(c), tau_(tau), r_(r), k0_(k0) {}

  Law law_ = Law::constant;
  double c_ = 0.0;
  double tau_ = 0.0;
  double r_ = 1.0;
  long k0_ = 0;
};

struct WeightTriple {
  Schedule alpha = Schedule::constant(0.0);
  Schedule beta = Schedule::constant(0.0);
  Schedule gamma = Schedule::constant(0.0);
};

struct ValidationReport {
  bool passed = true;
  std::vector<std::string> errors;
  std::vector<std::string> warnings;

  void fail(std::string msg) {
    passed = false;
    errors.push_back(std::move(msg));
  }
  void warn(std::string msg) { warnings.push_back(std::move(msg)); }
  void merge(const ValidationReport& other);
};

enum class ValidationMode { strict, permissive };

/// D-SGD weight conditions: alpha power with tau in (1/2, 1], beta power with
/// tau in [0, tau_alpha) or constant, gamma = constant(0). Permissive mode
/// reports the same findings as warnings and passes.
ValidationReport validate_dsgd(const WeightTriple& w,
                               ValidationMode mode = ValidationMode::strict);

enum class AnnealingRatio {
  centralized,  // c_gamma / c_alpha
  distributed   // c_gamma^2 / c_alpha
};

/// Annealing weight conditions: alpha = power(c_alpha, 1), gamma =
/// annealing(c_gamma) and the configured ratio strictly above ratio_floor.
ValidationReport validate_annealing(const WeightTriple& w, double ratio_floor,
                                    AnnealingRatio ratio = AnnealingRatio::distributed,
                                    ValidationMode mode = ValidationMode::strict);

/// Warns when a constant consensus weight is at least 1/(2 max-degree).
ValidationReport check_consensus_weight(const Schedule& beta, const Graph& g);

}  // namespace netgrad
