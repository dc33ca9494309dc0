#include "amortized/moments.hpp"

#include <cmath>
#include <numbers>
#include <stdexcept>

namespace amortized {

std::string to_string(MomentKind kind) {
  switch (kind) {
    case MomentKind::Identity: return "identity";
    case MomentKind::Square: return "square";
    case MomentKind::Cosine: return "cosine";
  }
  return "unknown";
}

MomentKind parse_moment_kind(const std::string& tag) {
  if (tag == "identity") return MomentKind::Identity;
  if (tag == "square") return MomentKind::Square;
  if (tag == "cosine") return MomentKind::Cosine;
  throw std::invalid_argument("unknown moment spec '" + tag +
                              "' (expected identity|square|cosine)");
}

MomentSpec draw_moment_spec(MomentKind kind, Rng& rng) {
  MomentSpec spec{kind, 0.0, 0.0};
  if (kind == MomentKind::Cosine) {
    std::normal_distribution<double> normal(0.0, 1.0);
    std::uniform_real_distribution<double> phase(0.0, 2.0 * std::numbers::pi);
    spec.w = normal(rng);
    spec.b = phase(rng);
  }
  return spec;
}

namespace {

// E[h(x)] for x ~ N(mean, var), coordinatewise.
Vector gaussian_moment(const Vector& mean, double var, const MomentSpec& spec) {
  switch (spec.kind) {
    case MomentKind::Identity:
      return mean;
    case MomentKind::Square:
      return (mean.array().square() + var).matrix();
    case MomentKind::Cosine: {
      const double damp = std::exp(-0.5 * spec.w * spec.w * var);
      return (damp * (spec.w * mean.array() + spec.b).cos()).matrix();
    }
  }
  throw std::logic_error("gaussian_moment: bad kind");
}

}  // namespace

Vector exact_moments_gmm(const GaussianMixture& gmm, const MomentSpec& spec) {
  const double var = gmm.sigma() * gmm.sigma();
  Vector acc = Vector::Zero(gmm.dim());
  for (Eigen::Index k = 0; k < gmm.components(); ++k) {
    acc += gaussian_moment(gmm.means().row(k).transpose(), var, spec);
  }
  return acc / static_cast<double>(gmm.components());
}

Vector exact_moments_rbm(const GaussBernoulliRBM& rbm, const MomentSpec& spec,
                         int max_hidden) {
  const Eigen::Index l = rbm.hidden();
  if (l > max_hidden) {
    throw std::invalid_argument("exact_moments_rbm: " + std::to_string(l) +
                                " hidden units exceed the enumeration cap of " +
                                std::to_string(max_hidden));
  }
  const std::size_t configs = std::size_t{1} << l;
  std::vector<double> log_w(configs);
  std::vector<Vector> centers(configs);
  Vector h(l);
  for (std::size_t mask = 0; mask < configs; ++mask) {
    for (Eigen::Index i = 0; i < l; ++i) h[i] = (mask >> i) & 1U ? 1.0 : -1.0;
    centers[mask] = rbm.B() * h + rbm.b();
    log_w[mask] = rbm.c().dot(h) + 0.5 * centers[mask].squaredNorm();
  }
  double top = log_w[0];
  for (double v : log_w) top = std::max(top, v);
  double norm = 0.0;
  for (double& v : log_w) {
    v = std::exp(v - top);
    norm += v;
  }
  Vector acc = Vector::Zero(rbm.dim());
  for (std::size_t mask = 0; mask < configs; ++mask) {
    acc += (log_w[mask] / norm) * gaussian_moment(centers[mask], 1.0, spec);
  }
  return acc;
}

Vector exact_moments(const TargetDensity& target, const MomentSpec& spec) {
  if (const auto* gmm = dynamic_cast<const GaussianMixture*>(&target)) {
    return exact_moments_gmm(*gmm, spec);
  }
  if (const auto* rbm = dynamic_cast<const GaussBernoulliRBM*>(&target)) {
    return exact_moments_rbm(*rbm, spec);
  }
  throw std::invalid_argument("exact_moments: no closed-form moments for this target");
}

Vector empirical_moments(const ParticleMatrix& samples, const MomentSpec& spec) {
  if (samples.rows() < 1) throw std::invalid_argument("empirical_moments: no samples");
  switch (spec.kind) {
    case MomentKind::Identity:
      return samples.colwise().mean().transpose();
    case MomentKind::Square:
      return samples.array().square().colwise().mean().transpose();
    case MomentKind::Cosine:
      return (spec.w * samples.array() + spec.b).cos().colwise().mean().transpose();
  }
  throw std::logic_error("empirical_moments: bad kind");
}

double moment_mse(const ParticleMatrix& samples, const Vector& exact,
                  const MomentSpec& spec) {
  const Vector est = empirical_moments(samples, spec);
  if (est.size() != exact.size()) throw std::invalid_argument("moment_mse: dimension mismatch");
  return (est - exact).squaredNorm() / static_cast<double>(est.size());
}

}  // namespace amortized
