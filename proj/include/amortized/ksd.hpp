#pragma once

#include "amortized/kernels.hpp"
#include "amortized/target.hpp"

namespace amortized {

struct KsdEstimate {
  double value = 0.0;  // U-statistic; may be negative
  Eigen::Index n = 0;
};

// Stein kernel kappa_p(z, z') for the RBF kernel, from precomputed scores.
double kappa_from_scores(const VecRef& z, const VecRef& z2, const VecRef& s,
                         const VecRef& s2, Bandwidth h);

double kappa_p(const VecRef& z, const VecRef& z2, const TargetDensity& target,
               Bandwidth h);

/// Gradient of kappa_p with respect to its first argument. The Hessian of
/// log p enters through target.score_jvp.
Vector kappa_grad_first(const VecRef& z, const VecRef& z2,
                        const TargetDensity& target, Bandwidth h);

/// (1 / (n(n-1))) sum_{i != j} kappa_p(z_i, z_j). Requires n >= 2.
KsdEstimate ksd_u_statistic(const ParticleMatrix& samples,
                            const TargetDensity& target, Bandwidth h);

/// Row i holds -2/(n(n-1)) sum_{j != i} grad_{z_i} kappa_p(z_i, z_j), the
/// descent direction on the U-statistic with respect to each sample.
/// Requires n >= 2. Uses one Hessian-vector product per row.
ParticleMatrix ksd_descent_field(const ParticleMatrix& samples,
                                 const TargetDensity& target, Bandwidth h);

}  // namespace amortized
