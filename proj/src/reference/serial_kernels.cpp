#include "amortized/reference/serial_kernels.hpp"

#include <algorithm>
#include <cmath>
#include <stdexcept>
#include <vector>

namespace amortized::serial {

Bandwidth median_bandwidth(const ParticleMatrix& particles) {
  const Eigen::Index n = particles.rows();
  if (n <= 1) return Bandwidth(1.0);
  std::vector<double> dist;
  for (Eigen::Index i = 0; i < n; ++i) {
    for (Eigen::Index j = i + 1; j < n; ++j) {
      dist.push_back((particles.row(i) - particles.row(j)).norm());
    }
  }
  std::sort(dist.begin(), dist.end());
  const std::size_t m = dist.size();
  const double med = m % 2 == 1 ? dist[m / 2] : 0.5 * (dist[m / 2 - 1] + dist[m / 2]);
  const double log_n = std::log(static_cast<double>(n));
  if (med <= 0.0 || log_n <= 0.0) return Bandwidth(1.0);
  return Bandwidth(med * med / log_n);
}

SteinGradient stein_gradient(const ParticleMatrix& particles,
                             const TargetDensity& target, Bandwidth h,
                             double repulsion) {
  const Eigen::Index n = particles.rows();
  SteinGradient phi = SteinGradient::Zero(n, particles.cols());
  std::vector<Vector> scores;
  for (Eigen::Index j = 0; j < n; ++j) {
    scores.push_back(target.score(particles.row(j).transpose()));
  }
  for (Eigen::Index i = 0; i < n; ++i) {
    const Vector zi = particles.row(i).transpose();
    Vector acc = Vector::Zero(particles.cols());
    for (Eigen::Index j = 0; j < n; ++j) {
      const Vector zj = particles.row(j).transpose();
      acc += scores[static_cast<std::size_t>(j)] * rbf_eval(zj, zi, h) +
             repulsion * rbf_grad_first(zj, zi, h);
    }
    phi.row(i) = acc.transpose() / static_cast<double>(n);
  }
  return phi;
}

KsdEstimate ksd_u_statistic(const ParticleMatrix& samples,
                            const TargetDensity& target, Bandwidth h) {
  const Eigen::Index n = samples.rows();
  if (n < 2) throw std::invalid_argument("serial::ksd_u_statistic: need n >= 2");
  double total = 0.0;
  for (Eigen::Index i = 0; i < n; ++i) {
    for (Eigen::Index j = 0; j < n; ++j) {
      if (i == j) continue;
      total += kappa_p(samples.row(i).transpose(), samples.row(j).transpose(), target, h);
    }
  }
  return {total / (static_cast<double>(n) * static_cast<double>(n - 1)), n};
}

ParticleMatrix ksd_descent_field(const ParticleMatrix& samples,
                                 const TargetDensity& target, Bandwidth h) {
  const Eigen::Index n = samples.rows();
  if (n < 2) throw std::invalid_argument("serial::ksd_descent_field: need n >= 2");
  ParticleMatrix field = ParticleMatrix::Zero(n, samples.cols());
  const double scale = -2.0 / (static_cast<double>(n) * static_cast<double>(n - 1));
  for (Eigen::Index i = 0; i < n; ++i) {
    Vector acc = Vector::Zero(samples.cols());
    for (Eigen::Index j = 0; j < n; ++j) {
      if (i == j) continue;
      acc += kappa_grad_first(samples.row(i).transpose(), samples.row(j).transpose(),
                              target, h);
    }
    field.row(i) = scale * acc.transpose();
  }
  return field;
}

}  // namespace amortized::serial
