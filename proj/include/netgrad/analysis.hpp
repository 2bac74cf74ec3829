#pragma once

#include <algorithm>
#include <cstdint>
#include <map>
#include <span>
#include <stdexcept>
#include <string>
#include <vector>

#include <Eigen/Dense>

#include "netgrad/engine.hpp"
#include "netgrad/objective.hpp"

namespace netgrad {

/// Largest pairwise distance between agent columns of `x`.
template <typename Derived>
typename Derived::Scalar consensus_error(const Eigen::MatrixBase<Derived>& x) {
  using Scalar = typename Derived::Scalar;
  Scalar worst(0);
  for (Eigen::Index i = 0; i < x.cols(); ++i)
    for (Eigen::Index j = i + 1; j < x.cols(); ++j)
      worst = std::max(worst, (x.col(i) - x.col(j)).norm());
  return worst;
}

inline double consensus_error(const NetworkState& s) { return consensus_error(s.x); }

enum class Basin { global, local, saddle_region, diverged, unresolved };

std::string to_string(Basin b);
Basin basin_from_string(const std::string& name);

struct Anchor {
  Eigen::VectorXd point;
  Basin label = Basin::global;
};

struct BasinLabel {
  Basin label = Basin::unresolved;
  int anchor = -1;  // index into the anchor list, -1 when none matched
  double distance = 0.0;
};

/// Labels the agent-mean state by its nearest anchor when that anchor lies
/// within `radius`; diverged states short-circuit to Basin::diverged.
BasinLabel classify_basin(const NetworkState& final_state, std::span<const Anchor> anchors,
                          double radius);

struct StableSubspace {
  Eigen::MatrixXd basis;        // d x (d - q), orthonormal columns
  Eigen::VectorXd eigenvalues;  // eigenvalues belonging to the basis columns
  int q = 0;                    // eigenvalues below -eig_tol
};

/// Span of the eigenvectors of a symmetric matrix with eigenvalue >= -eig_tol.
/// A negative eig_tol selects 1e-8 (1 + spectral radius).
template <typename Derived>
StableSubspace stable_subspace(const Eigen::MatrixBase<Derived>& A, double eig_tol = -1.0) {
  using Mat = Eigen::Matrix<typename Derived::Scalar, Eigen::Dynamic, Eigen::Dynamic>;
  if (A.rows() != A.cols()) throw std::invalid_argument("stable_subspace needs a square matrix");
  const Mat sym = (A + A.transpose()) / 2;
  Eigen::SelfAdjointEigenSolver<Mat> es(sym);
  const auto& lambda = es.eigenvalues();
  const double tol =
      eig_tol >= 0 ? eig_tol : 1e-8 * (1.0 + static_cast<double>(lambda.cwiseAbs().maxCoeff()));
  StableSubspace out;
  std::vector<Eigen::Index> keep;
  for (Eigen::Index i = 0; i < lambda.size(); ++i) {
    if (lambda(i) < -tol)
      ++out.q;
    else
      keep.push_back(i);
  }
  out.basis.resize(A.rows(), static_cast<Eigen::Index>(keep.size()));
  out.eigenvalues.resize(static_cast<Eigen::Index>(keep.size()));
  for (std::size_t j = 0; j < keep.size(); ++j) {
    out.basis.col(static_cast<Eigen::Index>(j)) = es.eigenvectors().col(keep[j]).template cast<double>();
    out.eigenvalues(static_cast<Eigen::Index>(j)) = static_cast<double>(lambda(keep[j]));
  }
  return out;
}

class DegenerateDensity : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

/// Density proportional to exp(-2 f(x) / eps^2) on a uniform grid, normalized
/// by the trapezoid rule.
struct GibbsDensity {
  Eigen::VectorXd grid;
  Eigen::VectorXd density;
  double step = 0.0;

  /// Trapezoid integral of the density over the whole grid.
  double total_mass() const;
  /// Trapezoid integral restricted to grid points within `radius` of `center`.
  double mass_within(double center, double radius) const;
};

GibbsDensity gibbs_measure_1d(const Objective& o, double epsilon, double lo, double hi,
                              double step);

struct MonteCarloSummary {
  int runs = 0;
  std::map<Basin, int> counts;
  std::vector<std::uint64_t> seeds;
  std::vector<BasinLabel> labels;
  std::vector<Eigen::VectorXd> final_means;
  std::vector<double> final_consensus_error;
  double mean_consensus_error = 0.0;  // over finite runs
  double max_consensus_error = 0.0;

  int count(Basin b) const {
    const auto it = counts.find(b);
    return it == counts.end() ? 0 : it->second;
  }
  double rate(Basin b) const { return runs == 0 ? 0.0 : static_cast<double>(count(b)) / runs; }
};

/// Without anchors every finite run is unresolved.
MonteCarloSummary aggregate(std::span<const Trajectory> runs, std::span<const Anchor> anchors,
                            double radius);

}  // namespace netgrad
