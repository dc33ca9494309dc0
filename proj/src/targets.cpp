#include "amortized/targets.hpp"

#include <cmath>
#include <stdexcept>
#include <string>

namespace amortized {

namespace {

double softplus(double x) {
  return std::max(x, 0.0) + std::log1p(std::exp(-std::abs(x)));
}

double log_two_cosh(double u) {
  const double a = std::abs(u);
  return a + std::log1p(std::exp(-2.0 * a));
}

}  // namespace

double sigmoid(double x) {
  if (x >= 0.0) return 1.0 / (1.0 + std::exp(-x));
  const double e = std::exp(x);
  return e / (1.0 + e);
}

// ---------------------------------------------------------------------------
// GaussianMixture

GaussianMixture::GaussianMixture(Eigen::MatrixXd means, double sigma)
    : means_(std::move(means)), sigma_(sigma) {
  if (means_.rows() < 1 || means_.cols() < 1) {
    throw std::invalid_argument("GaussianMixture: need K >= 1 and d >= 1");
  }
  if (!(sigma_ > 0.0) || !std::isfinite(sigma_)) {
    throw std::invalid_argument("GaussianMixture: sigma must be positive");
  }
}

Vector GaussianMixture::responsibilities(const VecRef& z) const {
  const double inv_two_var = 0.5 / (sigma_ * sigma_);
  Vector logits(means_.rows());
  for (Eigen::Index k = 0; k < means_.rows(); ++k) {
    logits[k] = -(means_.row(k).transpose() - z).squaredNorm() * inv_two_var;
  }
  const double top = logits.maxCoeff();
  Vector w = (logits.array() - top).exp();
  return w / w.sum();
}

double GaussianMixture::log_density_unnorm(const VecRef& z) const {
  check_dim(z, "GaussianMixture::log_density_unnorm");
  const double inv_two_var = 0.5 / (sigma_ * sigma_);
  Vector logits(means_.rows());
  for (Eigen::Index k = 0; k < means_.rows(); ++k) {
    logits[k] = -(means_.row(k).transpose() - z).squaredNorm() * inv_two_var;
  }
  const double top = logits.maxCoeff();
  return top + std::log((logits.array() - top).exp().sum());
}

Vector GaussianMixture::score(const VecRef& z, Minibatch) const {
  check_dim(z, "GaussianMixture::score");
  const Vector w = responsibilities(z);
  const Vector mixed_mean = means_.transpose() * w;
  return (mixed_mean - z) / (sigma_ * sigma_);
}

Vector GaussianMixture::score_jvp(const VecRef& z, const VecRef& v,
                                  Minibatch) const {
  check_dim(z, "GaussianMixture::score_jvp");
  check_dim(v, "GaussianMixture::score_jvp");
  const Vector w = responsibilities(z);
  const double var = sigma_ * sigma_;
  // offsets.row(k) = mean_k - z
  const Eigen::MatrixXd offsets = means_.rowwise() - z.transpose();
  const Vector m = offsets.transpose() * w;
  const Vector proj = offsets * v;
  const Vector second = offsets.transpose() * (w.array() * proj.array()).matrix();
  return -v / var + (second - m * m.dot(v)) / (var * var);
}

// ---------------------------------------------------------------------------
// GaussBernoulliRBM

GaussBernoulliRBM::GaussBernoulliRBM(Eigen::MatrixXd B, Vector b, Vector c)
    : B_(std::move(B)), b_(std::move(b)), c_(std::move(c)) {
  if (B_.rows() < 1 || B_.cols() < 1) {
    throw std::invalid_argument("GaussBernoulliRBM: need d >= 1 and l >= 1");
  }
  if (b_.size() != B_.rows() || c_.size() != B_.cols()) {
    throw std::invalid_argument("GaussBernoulliRBM: inconsistent shapes");
  }
}

double GaussBernoulliRBM::log_density_unnorm(const VecRef& z) const {
  check_dim(z, "GaussBernoulliRBM::log_density_unnorm");
  const Vector u = B_.transpose() * z + c_;
  double hidden = 0.0;
  for (Eigen::Index i = 0; i < u.size(); ++i) hidden += log_two_cosh(u[i]);
  return b_.dot(z) - 0.5 * z.squaredNorm() + hidden;
}

Vector GaussBernoulliRBM::score(const VecRef& z, Minibatch) const {
  check_dim(z, "GaussBernoulliRBM::score");
  const Vector u = B_.transpose() * z + c_;
  return b_ - z + B_ * u.array().tanh().matrix();
}

Vector GaussBernoulliRBM::score_jvp(const VecRef& z, const VecRef& v,
                                    Minibatch) const {
  check_dim(z, "GaussBernoulliRBM::score_jvp");
  check_dim(v, "GaussBernoulliRBM::score_jvp");
  const Vector t = (B_.transpose() * z + c_).array().tanh();
  const Vector sech2 = 1.0 - t.array().square();
  return -v + B_ * (sech2.array() * (B_.transpose() * v).array()).matrix();
}

// ---------------------------------------------------------------------------
// BayesLogReg

BayesLogReg::BayesLogReg(const Eigen::MatrixXd& X, Vector y,
                         double prior_precision, bool with_bias,
                         std::size_t minibatch_size)
    : y_(std::move(y)),
      prior_precision_(prior_precision),
      with_bias_(with_bias),
      minibatch_size_(minibatch_size) {
  if (X.rows() < 1 || X.cols() < 1) {
    throw std::invalid_argument("BayesLogReg: need N >= 1 and p >= 1");
  }
  if (y_.size() != X.rows()) {
    throw std::invalid_argument("BayesLogReg: label count does not match rows");
  }
  for (Eigen::Index i = 0; i < y_.size(); ++i) {
    if (y_[i] != 0.0 && y_[i] != 1.0) {
      throw std::invalid_argument("BayesLogReg: labels must be 0 or 1");
    }
  }
  if (!(prior_precision_ > 0.0)) {
    throw std::invalid_argument("BayesLogReg: prior precision must be positive");
  }
  X_ = augment(X);
}

Eigen::MatrixXd BayesLogReg::augment(const Eigen::MatrixXd& raw) const {
  if (!with_bias_) return raw;
  Eigen::MatrixXd out(raw.rows(), raw.cols() + 1);
  out.leftCols(raw.cols()) = raw;
  out.col(raw.cols()).setOnes();
  return out;
}

double BayesLogReg::log_density_unnorm(const VecRef& z) const {
  check_dim(z, "BayesLogReg::log_density_unnorm");
  const Vector a = X_ * z;
  double ll = 0.0;
  for (Eigen::Index i = 0; i < a.size(); ++i) {
    ll -= y_[i] > 0.5 ? softplus(-a[i]) : softplus(a[i]);
  }
  return ll - 0.5 * prior_precision_ * z.squaredNorm();
}

Vector BayesLogReg::score(const VecRef& z, Minibatch batch) const {
  check_dim(z, "BayesLogReg::score");
  Vector g = -prior_precision_ * z;
  if (batch.is_all()) {
    const Vector a = X_ * z;
    Vector r(a.size());
    for (Eigen::Index i = 0; i < a.size(); ++i) r[i] = y_[i] - sigmoid(a[i]);
    g.noalias() += X_.transpose() * r;
    return g;
  }
  const auto idx = batch.indices();
  if (idx.empty()) throw std::invalid_argument("BayesLogReg::score: empty minibatch");
  Vector acc = Vector::Zero(z.size());
  for (std::size_t i : idx) {
    if (i >= num_data()) throw std::out_of_range("BayesLogReg::score: index out of range");
    const auto row = X_.row(static_cast<Eigen::Index>(i));
    const double r = y_[static_cast<Eigen::Index>(i)] - sigmoid(row.dot(z));
    acc += r * row.transpose();
  }
  g += (static_cast<double>(num_data()) / static_cast<double>(idx.size())) * acc;
  return g;
}

Vector BayesLogReg::score_jvp(const VecRef& z, const VecRef& v,
                              Minibatch batch) const {
  check_dim(z, "BayesLogReg::score_jvp");
  check_dim(v, "BayesLogReg::score_jvp");
  Vector hv = -prior_precision_ * v;
  if (batch.is_all()) {
    const Vector a = X_ * z;
    const Vector xv = X_ * v;
    Vector w(a.size());
    for (Eigen::Index i = 0; i < a.size(); ++i) {
      const double s = sigmoid(a[i]);
      w[i] = s * (1.0 - s) * xv[i];
    }
    hv.noalias() -= X_.transpose() * w;
    return hv;
  }
  const auto idx = batch.indices();
  if (idx.empty()) throw std::invalid_argument("BayesLogReg::score_jvp: empty minibatch");
  Vector acc = Vector::Zero(z.size());
  for (std::size_t i : idx) {
    if (i >= num_data()) throw std::out_of_range("BayesLogReg::score_jvp: index out of range");
    const auto row = X_.row(static_cast<Eigen::Index>(i));
    const double s = sigmoid(row.dot(z));
    acc += (s * (1.0 - s) * row.dot(v)) * row.transpose();
  }
  hv -= (static_cast<double>(num_data()) / static_cast<double>(idx.size())) * acc;
  return hv;
}

// ---------------------------------------------------------------------------
// TemperedTarget

TemperedTarget::TemperedTarget(TargetPtr inner, double alpha)
    : inner_(std::move(inner)), alpha_(alpha) {
  if (!inner_) throw std::invalid_argument("TemperedTarget: null inner target");
  if (!(alpha_ >= 0.0) || !std::isfinite(alpha_)) {
    throw std::invalid_argument("TemperedTarget: alpha must be >= 0");
  }
}

double TemperedTarget::log_density_unnorm(const VecRef& z) const {
  return inner_->log_density_unnorm(z) / (1.0 + alpha_);
}

Vector TemperedTarget::score(const VecRef& z, Minibatch batch) const {
  return inner_->score(z, batch) / (1.0 + alpha_);
}

Vector TemperedTarget::score_jvp(const VecRef& z, const VecRef& v,
                                 Minibatch batch) const {
  return inner_->score_jvp(z, v, batch) / (1.0 + alpha_);
}

}  // namespace amortized
