#include "amortized/affine_sampler.hpp"

#include <stdexcept>

namespace amortized {

AffineSampler::AffineSampler(Vector mu, Vector log_sigma)
    : mu_(std::move(mu)), log_sigma_(std::move(log_sigma)) {
  if (mu_.size() < 1 || mu_.size() != log_sigma_.size()) {
    throw std::invalid_argument("AffineSampler: mu and log_sigma must match, d >= 1");
  }
  if (!mu_.allFinite() || !log_sigma_.allFinite()) {
    throw std::invalid_argument("AffineSampler: parameters must be finite");
  }
}

Vector AffineSampler::params() const {
  Vector p(num_params());
  p << mu_, log_sigma_;
  return p;
}

void AffineSampler::set_params(const VecRef& params) {
  if (params.size() != num_params()) {
    throw std::invalid_argument("AffineSampler::set_params: wrong parameter count");
  }
  if (!params.allFinite()) throw NonFiniteError("AffineSampler::set_params", 0);
  mu_ = params.head(dim());
  log_sigma_ = params.tail(dim());
}

SeedBundle AffineSampler::draw_seed(const TargetDensity&, Rng& rng) const {
  SeedBundle seed;
  seed.z0 = standard_normal_vector(dim(), rng);
  return seed;
}

ExecutionTape AffineSampler::forward(const TargetDensity& target,
                                     const SeedBundle& seed) const {
  if (target.dim() != dim() || seed.z0.size() != dim()) {
    throw std::invalid_argument("AffineSampler::forward: dimension mismatch");
  }
  ExecutionTape tape;
  tape.states.resize(2, dim());
  tape.states.row(0) = seed.z0.transpose();
  tape.states.row(1) = (mu_ + sigma().cwiseProduct(seed.z0)).transpose();
  tape.seed = seed;
  tape.block_end = {1};
  tape.target = &target;
  return tape;
}

Vector AffineSampler::backprop(const ExecutionTape& tape, const VecRef& upstream,
                               int block) const {
  if (block != 0) throw std::out_of_range("AffineSampler: single block only");
  if (upstream.size() != dim()) {
    throw std::invalid_argument("AffineSampler::backprop: upstream has wrong size");
  }
  Vector grad(num_params());
  grad.head(dim()) = upstream;
  grad.tail(dim()) = sigma().cwiseProduct(tape.seed.z0).cwiseProduct(upstream);
  return grad;
}

Vector AffineSampler::output_score(const VecRef& z) const {
  const Vector var = (2.0 * log_sigma_).array().exp();
  return -(z - mu_).cwiseQuotient(var);
}

}  // namespace amortized
