#pragma once

#include <string>
#include <vector>

#include "amortized/targets.hpp"

namespace amortized {

enum class MomentKind { Identity, Square, Cosine };

/// Test function h applied coordinatewise: x, x^2 or cos(w x + b).
struct MomentSpec {
  MomentKind kind = MomentKind::Identity;
  double w = 0.0;
  double b = 0.0;
};

std::string to_string(MomentKind kind);
MomentKind parse_moment_kind(const std::string& tag);  // identity|square|cosine

// Fills in w ~ N(0, 1), b ~ Uniform(0, 2 pi) for COSINE; other kinds pass through.
MomentSpec draw_moment_spec(MomentKind kind, Rng& rng);

// E[h(z_j)] for each coordinate j, in closed form.
Vector exact_moments_gmm(const GaussianMixture& gmm, const MomentSpec& spec);

/// Enumerates all 2^l hidden configurations: the marginal is a mixture of
/// N(Bh + b, I) with weights proportional to exp(c'h + ||Bh + b||^2 / 2).
/// Throws when l exceeds max_hidden.
Vector exact_moments_rbm(const GaussBernoulliRBM& rbm, const MomentSpec& spec,
                         int max_hidden = 20);

// Dispatches on the concrete target; throws if no closed form is known.
Vector exact_moments(const TargetDensity& target, const MomentSpec& spec);

Vector empirical_moments(const ParticleMatrix& samples, const MomentSpec& spec);

// Squared error of the sample estimate against the exact moments, averaged
// over coordinates.
double moment_mse(const ParticleMatrix& samples, const Vector& exact,
                  const MomentSpec& spec);

}  // namespace amortized
