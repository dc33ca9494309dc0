#pragma once

#include <functional>
#include <optional>

#include "amortized/kernels.hpp"
#include "amortized/target.hpp"

namespace amortized {

// Fixed bandwidth, or nullopt for the median heuristic on the current particles.
using BandwidthChoice = std::optional<Bandwidth>;

/// phi(z_i) = (1/n) sum_j [ scores_j k(z_j, z_i) + repulsion * grad_{z_j} k(z_j, z_i) ].
/// Parallel over i; every row is computed by one thread with a fixed
/// summation order, so the result does not depend on the thread count.
SteinGradient stein_kernel(const ParticleMatrix& particles,
                           const ParticleMatrix& scores, Bandwidth h,
                           double repulsion = 1.0);

// Scores of every particle (row-wise), evaluated in parallel.
ParticleMatrix particle_scores(const ParticleMatrix& particles,
                               const TargetDensity& target,
                               Minibatch batch = {});

SteinGradient stein_gradient(const ParticleMatrix& particles,
                             const TargetDensity& target,
                             BandwidthChoice h = std::nullopt,
                             Minibatch batch = {});

// Entropy-regularized variant: the repulsive term is weighted by (1 + alpha).
SteinGradient stein_gradient_entropy(const ParticleMatrix& particles,
                                     const TargetDensity& target,
                                     BandwidthChoice h, double alpha,
                                     Minibatch batch = {});

struct SvgdOptions {
  int steps = 100;
  double step_size = 1e-2;
  double alpha = 0.0;
  // Per-coordinate AdaGrad scaling of phi; off for constant-step runs.
  bool adagrad = false;
  double adagrad_fudge = 1e-6;
};

// Called with (iteration, particles) before the first update and after each
// update; iteration counts completed updates.
using SvgdObserver = std::function<void(int, const ParticleMatrix&)>;

/// Iterates z_i <- z_i + eps * phi(z_i) with the median bandwidth recomputed
/// every step. Throws NonFiniteError carrying the failing iteration.
ParticleMatrix svgd_run(const ParticleMatrix& init, const TargetDensity& target,
                        const SvgdOptions& options,
                        const SvgdObserver& observer = {});

}  // namespace amortized
