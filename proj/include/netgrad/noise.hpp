#pragma once

#include <cstdint>
#include <string_view>
#include <utility>

#include <Eigen/Dense>

namespace netgrad {

/// Version tag of the stream derivation below. Recorded in run outputs.
inline constexpr std::string_view kStreamVersion = "netgrad-ctr-splitmix64-boxmuller-v1";

enum class Channel : std::uint64_t {
  gradient_noise = 1,
  annealing = 2,
  data = 3,
  init = 4,
  directions = 5,
};

/// SplitMix64 finalizer.
constexpr std::uint64_t mix64(std::uint64_t z) {
  z += 0x9e3779b97f4a7c15ULL;
  z = (z ^ (z >> 30)) * 0xbf58476d1ce4e5b9ULL;
  z = (z ^ (z >> 27)) * 0x94d049bb133111ebULL;
  return z ^ (z >> 31);
}

/// Per-(seed, agent, iteration, channel) generator. Draw i is mix64 of the
/// derived key plus a counter, so draws depend only on the coordinates and
/// never on evaluation order.
///
/// Normals use Box-Muller on (u1, u2) with u1 in (0, 1]: the cosine branch is
/// returned first and the sine branch is cached for the next call.
class Substream {
 public:
  explicit Substream(std::uint64_t key) : key_(key) {}

  std::uint64_t next_u64() { return mix64(key_ + 0x632be59bd9b4e019ULL * ++counter_); }

  /// Uniform on [0, 1).
  double uniform() { return static_cast<double>(next_u64() >> 11) * 0x1.0p-53; }

  /// Uniform on the open interval (0, 1).
  double uniform_open() {
    return (static_cast<double>(next_u64() >> 12) + 0.5) * 0x1.0p-52;
  }

  double normal();

 private:
  std::uint64_t key_;
  std::uint64_t counter_ = 0;
  bool has_spare_ = false;
  double spare_ = 0.0;
};

/// Root of all randomness in a run. Copyable and stateless; substreams are
/// derived on demand.
class RngStream {
 public:
  explicit RngStream(std::uint64_t root_seed) : root_(root_seed) {}

  std::uint64_t root_seed() const { return root_; }

  Substream substream(std::uint64_t agent, std::uint64_t k, Channel ch) const;

  /// Seed for run `index` of an experiment rooted at this stream.
  std::uint64_t run_seed(std::uint64_t index) const;

 private:
  std::uint64_t root_;
};

struct GradientNoiseModel {
  enum class Kind { none, gaussian, bounded_uniform };
  Kind kind = Kind::none;
  /// sigma for gaussian, half-width a for bounded_uniform.
  double scale = 0.0;

  static GradientNoiseModel none() { return {}; }
  static GradientNoiseModel gaussian(double sigma);
  static GradientNoiseModel bounded_uniform(double a);

  bool operator==(const GradientNoiseModel&) const = default;
};

Eigen::VectorXd draw_gradient_noise(const GradientNoiseModel& m, const RngStream& s,
                                    std::uint64_t agent, std::uint64_t k, Eigen::Index d);

/// Standard normal d-vector from the annealing channel.
Eigen::VectorXd draw_annealing_noise(const RngStream& s, std::uint64_t agent,
                                     std::uint64_t k, Eigen::Index d);

/// Two-branch linear data: x ~ U(x_lo, x_hi); with probability mix_p the
/// response is y = slope_major x + eps, otherwise y = slope_minor x + eps,
/// eps ~ N(0, noise_std^2).
struct RegressionData {
  double x_lo = 0.0;
  double x_hi = 12.0;
  double mix_p = 0.55;
  double slope_major = 0.7;
  double slope_minor = 0.1;
  double noise_std = 1.0;

  bool operator==(const RegressionData&) const = default;
};

struct RegressionSample {
  double x = 0.0;
  double y = 0.0;
  bool major = true;  // drawn from the slope_major branch
};

RegressionSample sample_regression(const RegressionData& data, const RngStream& s,
                                   std::uint64_t agent, std::uint64_t k);

/// log(8 r^2 + 1) for residual r = prediction - target.
double robust_loss(double prediction, double target);

/// (1/N) d/dw log(8 (w x - y)^2 + 1).
double stochastic_regression_gradient(double w, const RegressionSample& sample, int n_agents);

/// Minimum over `directions` random unit vectors theta of the Monte Carlo
/// estimate of E[(xi^T theta)^+], with `draws` samples per direction.
/// Returns 0 for Kind::none.
double verify_min_excitation(const GradientNoiseModel& m, int directions, int draws,
                             Eigen::Index d = 2, std::uint64_t seed = 0x5eed);

}  // namespace netgrad
