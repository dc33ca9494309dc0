#pragma once

// Straight-line serial versions of the pair kernels. They follow the textbook
// formulas term by term and exist to cross-check the OpenMP kernels in tests
// and benchmarks; library code does not call them.

#include "amortized/kernels.hpp"
#include "amortized/ksd.hpp"
#include "amortized/target.hpp"

namespace amortized::serial {

Bandwidth median_bandwidth(const ParticleMatrix& particles);

SteinGradient stein_gradient(const ParticleMatrix& particles,
                             const TargetDensity& target, Bandwidth h,
                             double repulsion = 1.0);

KsdEstimate ksd_u_statistic(const ParticleMatrix& samples,
                            const TargetDensity& target, Bandwidth h);

ParticleMatrix ksd_descent_field(const ParticleMatrix& samples,
                                 const TargetDensity& target, Bandwidth h);

}  // namespace amortized::serial
