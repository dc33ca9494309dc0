#pragma once

#include <utility>

#include "amortized/sampler_model.hpp"

namespace amortized {

// Distribution of the initial state z^0: N(mean, stddev^2 I).
struct InitDist {
  double mean = 0.0;
  double stddev = 1.0;
};

/// T steps of Langevin dynamics viewed as a T-layer stochastic network,
///   z^{t+1} = z^t + eta^t * grad log p(z^t) + sqrt(2 eta^t) * xi^t,
/// with eta^t = exp(lambda^t) learned per step and per coordinate (or one
/// scalar per step in scalar mode). Layers are grouped into blocks of
/// block_size; a trailing block may be shorter.
class LangevinSampler final : public SamplerModel {
 public:
  LangevinSampler(int steps, Eigen::Index dim, int block_size = 5,
                  double init_log_step = -6.907755278982137,  // log(1e-3)
                  bool scalar_step = false, InitDist init = {});

  std::unique_ptr<SamplerModel> clone() const override {
    return std::make_unique<LangevinSampler>(*this);
  }

  Eigen::Index dim() const override { return dim_; }
  Eigen::Index num_params() const override { return log_step_.size(); }
  Vector params() const override;
  void set_params(const VecRef& params) override;
  int num_blocks() const override;

  SeedBundle draw_seed(const TargetDensity& target, Rng& rng) const override;
  ExecutionTape forward(const TargetDensity& target,
                        const SeedBundle& seed) const override;
  Vector backprop(const ExecutionTape& tape, const VecRef& upstream,
                  int block) const override;
  Vector sample(const TargetDensity& target, const SeedBundle& seed) const override;

  int steps() const { return steps_; }
  int block_size() const { return block_size_; }
  bool scalar_step() const { return scalar_step_; }
  const InitDist& init() const { return init_; }

  // steps x d, or steps x 1 in scalar mode.
  const Eigen::MatrixXd& log_step() const { return log_step_; }
  void set_log_step(const Eigen::MatrixXd& log_step);

  // eta^t broadcast to d coordinates.
  Vector step_size(int t) const;

  // Half-open layer range [first, last) of block b.
  std::pair<int, int> block_range(int block) const;

 private:
  int steps_;
  Eigen::Index dim_;
  int block_size_;
  bool scalar_step_;
  InitDist init_;
  Eigen::MatrixXd log_step_;
};

/// Ascent direction on the step-size parameters: for each block, the Stein
/// variational gradient of the block outputs (entropy-weighted when
/// alpha > 0) is back-propagated through that block only and summed over
/// the batch. Works for any SamplerModel; the affine sampler has one block.
Vector param_grad(const SamplerModel& model, const TargetDensity& target,
                  const std::vector<ExecutionTape>& tapes, double alpha = 0.0,
                  Minibatch stein_batch = {});

}  // namespace amortized
