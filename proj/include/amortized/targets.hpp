#pragma once

#include <cstddef>
#include <vector>

#include "amortized/target.hpp"

namespace amortized {

/// Equal-weight isotropic Gaussian mixture (1/K) sum_k N(z; mean_k, sigma^2 I).
/// A single component gives a plain Gaussian target.
class GaussianMixture final : public TargetDensity {
 public:
  // means is K x d, one component mean per row.
  GaussianMixture(Eigen::MatrixXd means, double sigma);

  Eigen::Index dim() const override { return means_.cols(); }
  double log_density_unnorm(const VecRef& z) const override;
  Vector score(const VecRef& z, Minibatch batch = {}) const override;
  Vector score_jvp(const VecRef& z, const VecRef& v,
                   Minibatch batch = {}) const override;

  const Eigen::MatrixXd& means() const { return means_; }
  double sigma() const { return sigma_; }
  Eigen::Index components() const { return means_.rows(); }

 private:
  // Posterior component responsibilities at z (softmax via log-sum-exp).
  Vector responsibilities(const VecRef& z) const;

  Eigen::MatrixXd means_;
  double sigma_;
};

/// Gaussian-Bernoulli RBM marginal over z with hidden units h in {-1,+1}^l:
/// log p(z) = b'z - ||z||^2/2 + sum_i log(2 cosh((B'z + c)_i)) + const.
class GaussBernoulliRBM final : public TargetDensity {
 public:
  GaussBernoulliRBM(Eigen::MatrixXd B, Vector b, Vector c);

  Eigen::Index dim() const override { return B_.rows(); }
  double log_density_unnorm(const VecRef& z) const override;
  Vector score(const VecRef& z, Minibatch batch = {}) const override;
  Vector score_jvp(const VecRef& z, const VecRef& v,
                   Minibatch batch = {}) const override;

  const Eigen::MatrixXd& B() const { return B_; }
  const Vector& b() const { return b_; }
  const Vector& c() const { return c_; }
  Eigen::Index hidden() const { return B_.cols(); }

 private:
  Eigen::MatrixXd B_;  // d x l
  Vector b_;
  Vector c_;
};

/// Bayesian logistic regression posterior with an isotropic Gaussian prior
/// N(0, prior_precision^-1 I). Labels are {0, 1}. When with_bias is set a
/// constant feature is appended, so dim() = features + 1.
class BayesLogReg final : public TargetDensity {
 public:
  BayesLogReg(const Eigen::MatrixXd& X, Vector y, double prior_precision,
              bool with_bias, std::size_t minibatch_size);

  Eigen::Index dim() const override { return X_.cols(); }
  double log_density_unnorm(const VecRef& z) const override;
  // (N / |B|) sum_{i in B} (y_i - s(x_i'z)) x_i - prior_precision z.
  Vector score(const VecRef& z, Minibatch batch = {}) const override;
  Vector score_jvp(const VecRef& z, const VecRef& v,
                   Minibatch batch = {}) const override;
  std::size_t num_data() const override {
    return static_cast<std::size_t>(X_.rows());
  }
  std::size_t minibatch_size() const override { return minibatch_size_; }

  // Design matrix including the bias column when enabled.
  const Eigen::MatrixXd& design() const { return X_; }
  const Vector& labels() const { return y_; }
  double prior_precision() const { return prior_precision_; }
  bool with_bias() const { return with_bias_; }

  // Augments raw features the same way the constructor does.
  Eigen::MatrixXd augment(const Eigen::MatrixXd& raw) const;

 private:
  Eigen::MatrixXd X_;
  Vector y_;
  double prior_precision_;
  bool with_bias_;
  std::size_t minibatch_size_;
};

/// p(z)^(1 / (1 + alpha)); the score is the inner score divided by 1 + alpha.
class TemperedTarget final : public TargetDensity {
 public:
  TemperedTarget(TargetPtr inner, double alpha);

  Eigen::Index dim() const override { return inner_->dim(); }
  double log_density_unnorm(const VecRef& z) const override;
  Vector score(const VecRef& z, Minibatch batch = {}) const override;
  Vector score_jvp(const VecRef& z, const VecRef& v,
                   Minibatch batch = {}) const override;
  std::size_t num_data() const override { return inner_->num_data(); }
  std::size_t minibatch_size() const override {
    return inner_->minibatch_size();
  }

  double alpha() const { return alpha_; }

 private:
  TargetPtr inner_;
  double alpha_;
};

double sigmoid(double x);

}  // namespace amortized
