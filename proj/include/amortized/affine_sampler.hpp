#pragma once

#include "amortized/sampler_model.hpp"

namespace amortized {

/// z = mu + exp(log_sigma) * xi with xi ~ N(0, I). Its output density is a
/// known Gaussian, which makes it the instrument for checking amortized
/// updates against exact answers. Parameters are laid out as [mu, log_sigma].
class AffineSampler final : public SamplerModel {
 public:
  AffineSampler(Vector mu, Vector log_sigma);

  std::unique_ptr<SamplerModel> clone() const override {
    return std::make_unique<AffineSampler>(*this);
  }

  Eigen::Index dim() const override { return mu_.size(); }
  Eigen::Index num_params() const override { return 2 * mu_.size(); }
  Vector params() const override;
  void set_params(const VecRef& params) override;
  int num_blocks() const override { return 1; }

  SeedBundle draw_seed(const TargetDensity& target, Rng& rng) const override;
  ExecutionTape forward(const TargetDensity& target,
                        const SeedBundle& seed) const override;
  Vector backprop(const ExecutionTape& tape, const VecRef& upstream,
                  int block) const override;

  const Vector& mu() const { return mu_; }
  const Vector& log_sigma() const { return log_sigma_; }
  Vector sigma() const { return log_sigma_.array().exp(); }

  // grad_z log q(z) of the sampler's own Gaussian output density.
  Vector output_score(const VecRef& z) const;

 private:
  Vector mu_;
  Vector log_sigma_;
};

}  // namespace amortized
