#pragma once

#include <cstddef>
#include <memory>

#include "amortized/types.hpp"

namespace amortized {

/// Unnormalized target density p(z) on R^d, specified through its score.
///
/// Targets built from data (Bayesian logistic regression) accept a minibatch
/// of data indices; the score and Hessian-vector product are then the
/// subsampled estimators. Other targets ignore the minibatch. Implementations
/// are immutable after construction and safe for concurrent reads.
class TargetDensity {
 public:
  virtual ~TargetDensity() = default;

  virtual Eigen::Index dim() const = 0;

  // log p(z) up to an additive constant, always evaluated on all data.
  virtual double log_density_unnorm(const VecRef& z) const = 0;

  // grad_z log p(z).
  virtual Vector score(const VecRef& z, Minibatch batch = {}) const = 0;

  // Hessian of log p at z applied to v. The default differentiates score()
  // by central differences; concrete targets override with closed forms.
  virtual Vector score_jvp(const VecRef& z, const VecRef& v,
                           Minibatch batch = {}) const;

  // Number of data points the score sums over; 0 for data-free targets.
  virtual std::size_t num_data() const { return 0; }

  // Minibatch size a stochastic-gradient sampler should use; 0 means exact.
  virtual std::size_t minibatch_size() const { return 0; }

  // Central-difference Hessian-vector product, kept as an oracle even when
  // score_jvp is overridden. Step is rel_step * (1 + ||z||_inf) along v/||v||.
  Vector score_jvp_fd(const VecRef& z, const VecRef& v, Minibatch batch = {},
                      double rel_step = 1e-5) const;

 protected:
  void check_dim(const VecRef& z, const char* where) const;
};

using TargetPtr = std::shared_ptr<const TargetDensity>;

}  // namespace amortized
