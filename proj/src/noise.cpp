#include "netgrad/noise.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <numbers>
#include <stdexcept>

namespace netgrad {

double Substream::normal() {
  if (has_spare_) {
    has_spare_ = false;
    return spare_;
  }
  const double u1 = 1.0 - uniform();  // (0, 1]
  const double u2 = uniform();
  const double radius = std::sqrt(-2.0 * std::log(u1));
  const double theta = 2.0 * std::numbers::pi * u2;
  spare_ = radius * std::sin(theta);
  has_spare_ = true;
  return radius * std::cos(theta);
}

Substream RngStream::substream(std::uint64_t agent, std::uint64_t k, Channel ch) const {
  std::uint64_t key = mix64(root_ ^ 0x243f6a8885a308d3ULL);
  key = mix64(key ^ static_cast<std::uint64_t>(ch));
  key = mix64(key ^ agent);
  key = mix64(key ^ k);
  return Substream(key);
}

std::uint64_t RngStream::run_seed(std::uint64_t index) const {
  return mix64(mix64(root_ ^ 0x13198a2e03707344ULL) ^ index);
}

GradientNoiseModel GradientNoiseModel::gaussian(double sigma) {
  if (!(sigma >= 0) || !std::isfinite(sigma))
    throw std::invalid_argument("gaussian noise needs sigma >= 0");
  return {Kind::gaussian, sigma};
}

GradientNoiseModel GradientNoiseModel::bounded_uniform(double a) {
  if (!(a >= 0) || !std::isfinite(a))
    throw std::invalid_argument("bounded-uniform noise needs a >= 0");
  return {Kind::bounded_uniform, a};
}

Eigen::VectorXd draw_gradient_noise(const GradientNoiseModel& m, const RngStream& s,
                                    std::uint64_t agent, std::uint64_t k, Eigen::Index d) {
  Eigen::VectorXd out = Eigen::VectorXd::Zero(d);
  if (m.kind == GradientNoiseModel::Kind::none) return out;
  auto sub = s.substream(agent, k, Channel::gradient_noise);
  for (Eigen::Index i = 0; i < d; ++i) {
    out(i) = m.kind == GradientNoiseModel::Kind::gaussian
                 ? m.scale * sub.normal()
                 : m.scale * (2.0 * sub.uniform() - 1.0);
  }
  return out;
}

Eigen::VectorXd draw_annealing_noise(const RngStream& s, std::uint64_t agent, std::uint64_t k,
                                     Eigen::Index d) {
  auto sub = s.substream(agent, k, Channel::annealing);
  Eigen::VectorXd out(d);
  for (Eigen::Index i = 0; i < d; ++i) out(i) = sub.normal();
  return out;
}

RegressionSample sample_regression(const RegressionData& data, const RngStream& s,
                                   std::uint64_t agent, std::uint64_t k) {
  auto sub = s.substream(agent, k, Channel::data);
  RegressionSample out;
  out.x = data.x_lo + (data.x_hi - data.x_lo) * sub.uniform_open();
  out.major = sub.uniform() < data.mix_p;
  const double slope = out.major ? data.slope_major : data.slope_minor;
  out.y = slope * out.x + data.noise_std * sub.normal();
  return out;
}

double robust_loss(double prediction, double target) {
  const double r = prediction - target;
  return std::log(8.0 * r * r + 1.0);
}

double stochastic_regression_gradient(double w, const RegressionSample& sample, int n_agents) {
  if (n_agents < 1) throw std::invalid_argument("agent count must be >= 1");
  const double r = w * sample.x - sample.y;
  return 16.0 * sample.x * r / (8.0 * r * r + 1.0) / static_cast<double>(n_agents);
}

double verify_min_excitation(const GradientNoiseModel& m, int directions, int draws,
                             Eigen::Index d, std::uint64_t seed) {
  if (directions < 1 || draws < 1)
    throw std::invalid_argument("directions and draws must be >= 1");
  if (m.kind == GradientNoiseModel::Kind::none) return 0.0;
  const RngStream root(seed);
  double worst = std::numeric_limits<double>::infinity();
  for (int j = 0; j < directions; ++j) {
    auto dir_stream = root.substream(static_cast<std::uint64_t>(j), 0, Channel::directions);
    Eigen::VectorXd theta(d);
    do {
      for (Eigen::Index i = 0; i < d; ++i) theta(i) = dir_stream.normal();
    } while (theta.norm() == 0.0);
    theta.normalize();

    const RngStream draws_stream(root.run_seed(static_cast<std::uint64_t>(j)));
    double acc = 0.0;
    for (int t = 0; t < draws; ++t) {
      const double proj = draw_gradient_noise(m, draws_stream, 0, static_cast<std::uint64_t>(t), d)
                              .dot(theta);
      acc += std::max(proj, 0.0);
    }
    worst = std::min(worst, acc / draws);
  }
  return worst;
}

}  // namespace netgrad
