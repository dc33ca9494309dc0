#include "amortized/svgd.hpp"

#include <cmath>
#include <stdexcept>
#include <string>

namespace amortized {

SteinGradient stein_kernel(const ParticleMatrix& particles,
                           const ParticleMatrix& scores, Bandwidth h,
                           double repulsion) {
  const Eigen::Index n = particles.rows();
  const Eigen::Index d = particles.cols();
  if (scores.rows() != n || scores.cols() != d) {
    throw std::invalid_argument("stein_kernel: scores shape does not match particles");
  }
  const double inv_h = 1.0 / h.value();
  const double inv_n = 1.0 / static_cast<double>(n);
  SteinGradient phi(n, d);

#pragma omp parallel
  {
    Eigen::RowVectorXd acc(d);
    Eigen::RowVectorXd diff(d);
#pragma omp for schedule(static)
    for (Eigen::Index i = 0; i < n; ++i) {
      acc.setZero();
      for (Eigen::Index j = 0; j < n; ++j) {
        diff = particles.row(j) - particles.row(i);
        const double k = std::exp(-diff.squaredNorm() * inv_h);
        acc += k * scores.row(j);
        acc += (-2.0 * repulsion * k * inv_h) * diff;
      }
      phi.row(i) = acc * inv_n;
    }
  }
  return phi;
}

ParticleMatrix particle_scores(const ParticleMatrix& particles,
                               const TargetDensity& target, Minibatch batch) {
  if (particles.cols() != target.dim()) {
    throw std::invalid_argument("particle_scores: particle dimension " +
                                std::to_string(particles.cols()) +
                                " does not match target dimension " +
                                std::to_string(target.dim()));
  }
  ParticleMatrix scores(particles.rows(), particles.cols());
#pragma omp parallel for schedule(static)
  for (Eigen::Index i = 0; i < particles.rows(); ++i) {
    scores.row(i) = target.score(particles.row(i).transpose(), batch).transpose();
  }
  return scores;
}

SteinGradient stein_gradient(const ParticleMatrix& particles,
                             const TargetDensity& target, BandwidthChoice h,
                             Minibatch batch) {
  return stein_gradient_entropy(particles, target, h, 0.0, batch);
}

SteinGradient stein_gradient_entropy(const ParticleMatrix& particles,
                                     const TargetDensity& target,
                                     BandwidthChoice h, double alpha,
                                     Minibatch batch) {
  if (!(alpha >= 0.0)) {
    throw std::invalid_argument("stein_gradient_entropy: alpha must be >= 0");
  }
  if (particles.rows() < 1) {
    throw std::invalid_argument("stein_gradient: need at least one particle");
  }
  const Bandwidth bw = h ? *h : median_bandwidth(particles);
  return stein_kernel(particles, particle_scores(particles, target, batch), bw,
                      1.0 + alpha);
}

ParticleMatrix svgd_run(const ParticleMatrix& init, const TargetDensity& target,
                        const SvgdOptions& options, const SvgdObserver& observer) {
  if (options.steps < 0) throw std::invalid_argument("svgd_run: steps must be >= 0");
  ParticleMatrix z = init;
  if (!z.allFinite()) throw NonFiniteError("svgd_run", 0);
  ParticleMatrix grad_sq;
  if (options.adagrad) grad_sq = ParticleMatrix::Zero(z.rows(), z.cols());
  if (observer) observer(0, z);

  for (int it = 0; it < options.steps; ++it) {
    const SteinGradient phi =
        stein_gradient_entropy(z, target, std::nullopt, options.alpha);
    if (options.adagrad) {
      grad_sq.array() += phi.array().square();
      z.array() += options.step_size * phi.array() /
                   (options.adagrad_fudge + grad_sq.array().sqrt());
    } else {
      z += options.step_size * phi;
    }
    if (!z.allFinite()) throw NonFiniteError("svgd_run", it + 1);
    if (observer) observer(it + 1, z);
  }
  return z;
}

}  // namespace amortized
