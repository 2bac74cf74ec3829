#include "netgrad/analysis.hpp"

#include <cmath>
#include <limits>

namespace netgrad {

std::string to_string(Basin b) {
  switch (b) {
    case Basin::global: return "global";
    case Basin::local: return "local";
    case Basin::saddle_region: return "saddle-region";
    case Basin::diverged: return "diverged";
    case Basin::unresolved: return "unresolved";
  }
  return "unknown";
}

Basin basin_from_string(const std::string& name) {
  if (name == "global") return Basin::global;
  if (name == "local") return Basin::local;
  if (name == "saddle-region" || name == "saddle_region") return Basin::saddle_region;
  if (name == "diverged") return Basin::diverged;
  if (name == "unresolved") return Basin::unresolved;
  throw std::invalid_argument("unknown basin label '" + name + "'");
}

BasinLabel classify_basin(const NetworkState& final_state, std::span<const Anchor> anchors,
                          double radius) {
  if (anchors.empty()) throw std::invalid_argument("classify_basin needs at least one anchor");
  if (!(radius > 0)) throw std::invalid_argument("classification radius must be positive");
  BasinLabel out;
  if (final_state.diverged || !final_state.x.allFinite()) {
    out.label = Basin::diverged;
    out.distance = std::numeric_limits<double>::infinity();
    return out;
  }
  const Eigen::VectorXd m = final_state.mean();
  double best = std::numeric_limits<double>::infinity();
  for (std::size_t i = 0; i < anchors.size(); ++i) {
    if (anchors[i].point.size() != m.size())
      throw std::invalid_argument("anchor dimension does not match the state");
    const double dist = (anchors[i].point - m).norm();
    if (dist < best) {
      best = dist;
      out.anchor = static_cast<int>(i);
    }
  }
  out.distance = best;
  if (best <= radius) {
    out.label = anchors[static_cast<std::size_t>(out.anchor)].label;
  } else {
    out.label = Basin::unresolved;
  }
  return out;
}

double GibbsDensity::total_mass() const {
  const Eigen::Index n = density.size();
  if (n < 2) return 0.0;
  return step * (density.sum() - 0.5 * (density(0) + density(n - 1)));
}

double GibbsDensity::mass_within(double center, double radius) const {
  // grid points carry rounding from LinSpaced; do not drop a boundary node over it
  const double reach = radius + 1e-9 * step;
  double mass = 0.0;
  for (Eigen::Index i = 0; i + 1 < grid.size(); ++i) {
    const bool left = std::abs(grid(i) - center) <= reach;
    const bool right = std::abs(grid(i + 1) - center) <= reach;
    if (left && right) mass += 0.5 * step * (density(i) + density(i + 1));
  }
  return mass;
}

GibbsDensity gibbs_measure_1d(const Objective& o, double epsilon, double lo, double hi,
                              double step) {
  if (o.dim != 1) throw std::invalid_argument("gibbs_measure_1d needs a one-dimensional objective");
  if (!(epsilon > 0)) throw std::invalid_argument("epsilon must be positive");
  if (!(hi > lo) || !(step > 0)) throw std::invalid_argument("grid needs lo < hi and step > 0");
  const auto n = static_cast<Eigen::Index>(std::floor((hi - lo) / step + 1e-9)) + 1;
  if (n < 2) throw std::invalid_argument("grid needs at least two points");

  GibbsDensity out;
  out.step = step;
  out.grid = Eigen::VectorXd::LinSpaced(n, lo, lo + step * static_cast<double>(n - 1));
  Eigen::VectorXd f(n);
  for (Eigen::Index i = 0; i < n; ++i)
    f(i) = o.value(Eigen::VectorXd::Constant(1, out.grid(i)));
  if (!f.allFinite()) throw DegenerateDensity("objective is not finite on the grid");

  // Shifting by min f leaves the normalized density unchanged.
  const double scale = 2.0 / (epsilon * epsilon);
  out.density = (-(f.array() - f.minCoeff()) * scale).exp().matrix();
  const double z = out.total_mass();
  if (!(z > 0) || !std::isfinite(z))
    throw DegenerateDensity("Gibbs weights underflow on the whole grid");
  out.density /= z;
  return out;
}

MonteCarloSummary aggregate(std::span<const Trajectory> runs, std::span<const Anchor> anchors,
                            double radius) {
  if (runs.empty()) throw std::invalid_argument("aggregate needs at least one run");
  MonteCarloSummary s;
  for (Basin b : {Basin::global, Basin::local, Basin::saddle_region, Basin::diverged,
                  Basin::unresolved})
    s.counts[b] = 0;
  s.runs = static_cast<int>(runs.size());
  double total = 0.0;
  int finite = 0;
  for (const auto& t : runs) {
    BasinLabel label;
    if (!anchors.empty()) {
      label = classify_basin(t.final_state, anchors, radius);
    } else if (t.diverged) {
      label.label = Basin::diverged;
    }
    ++s.counts[label.label];
    s.labels.push_back(label);
    s.seeds.push_back(t.seed);
    s.final_means.push_back(t.final_state.mean());
    const double ce = consensus_error(t.final_state.x);
    s.final_consensus_error.push_back(ce);
    if (std::isfinite(ce)) {
      total += ce;
      ++finite;
      s.max_consensus_error = std::max(s.max_consensus_error, ce);
    }
  }
  s.mean_consensus_error = finite > 0 ? total / finite : 0.0;
  return s;
}

}  // namespace netgrad
