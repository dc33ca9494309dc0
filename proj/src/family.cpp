#include "amortized/family.hpp"

#include <cstring>
#include <stdexcept>

namespace amortized {

std::uint64_t hash_doubles(const double* data, std::size_t count,
                           std::uint64_t seed) {
  std::uint64_t h = seed;
  const auto* bytes = reinterpret_cast<const unsigned char*>(data);
  for (std::size_t i = 0; i < count * sizeof(double); ++i) {
    h ^= bytes[i];
    h *= 0x100000001b3ULL;
  }
  return h;
}

std::string family_name(const FamilySpec& spec) {
  struct {
    std::string operator()(const GmmFamily&) const { return "gmm"; }
    std::string operator()(const RbmFamily&) const { return "rbm"; }
    std::string operator()(const LogRegFamily&) const { return "logreg"; }
  } visitor;
  return std::visit(visitor, spec);
}

Eigen::Index family_dim(const FamilySpec& spec) {
  struct {
    Eigen::Index operator()(const GmmFamily& f) const { return f.dim; }
    Eigen::Index operator()(const RbmFamily& f) const { return f.dim; }
    Eigen::Index operator()(const LogRegFamily& f) const {
      return f.features + (f.with_bias ? 1 : 0);
    }
  } visitor;
  return std::visit(visitor, spec);
}

std::shared_ptr<const GaussianMixture> draw_gmm(const GmmFamily& spec, Rng& rng) {
  std::uniform_real_distribution<double> unif(-spec.mean_range, spec.mean_range);
  Eigen::MatrixXd means(spec.components, spec.dim);
  for (Eigen::Index k = 0; k < spec.components; ++k) {
    for (Eigen::Index j = 0; j < spec.dim; ++j) means(k, j) = unif(rng);
  }
  return std::make_shared<const GaussianMixture>(std::move(means), spec.sigma);
}

std::shared_ptr<const GaussBernoulliRBM> draw_rbm(const RbmFamily& spec, Rng& rng) {
  std::normal_distribution<double> normal(0.0, 1.0);
  std::bernoulli_distribution coin(0.5);
  Eigen::MatrixXd B(spec.dim, spec.hidden);
  for (Eigen::Index i = 0; i < spec.dim; ++i) {
    for (Eigen::Index j = 0; j < spec.hidden; ++j) {
      B(i, j) = coin(rng) ? spec.weight : -spec.weight;
    }
  }
  Vector b(spec.dim), c(spec.hidden);
  for (Eigen::Index i = 0; i < spec.dim; ++i) b[i] = normal(rng);
  for (Eigen::Index j = 0; j < spec.hidden; ++j) c[j] = normal(rng);
  return std::make_shared<const GaussBernoulliRBM>(std::move(B), std::move(b),
                                                   std::move(c));
}

namespace {

FamilyDraw draw_logreg(const LogRegFamily& spec, Rng& rng) {
  if (spec.train_size < 1 || spec.features < 1) {
    throw std::invalid_argument("LogRegFamily: need train_size >= 1 and features >= 1");
  }
  std::normal_distribution<double> normal(0.0, 1.0);
  const Vector w_true = standard_normal_vector(spec.features, rng);
  auto make_split = [&](Eigen::Index rows, Eigen::MatrixXd& X, Vector& y) {
    X.resize(rows, spec.features);
    y.resize(rows);
    for (Eigen::Index i = 0; i < rows; ++i) {
      for (Eigen::Index j = 0; j < spec.features; ++j) X(i, j) = normal(rng);
      std::bernoulli_distribution label(sigmoid(X.row(i).dot(w_true)));
      y[i] = label(rng) ? 1.0 : 0.0;
    }
  };
  Eigen::MatrixXd X_train, X_test;
  Vector y_train, y_test;
  make_split(spec.train_size, X_train, y_train);
  make_split(spec.test_size, X_test, y_test);

  auto target = std::make_shared<const BayesLogReg>(
      X_train, y_train, spec.prior_precision, spec.with_bias, spec.minibatch);
  FamilyDraw draw;
  draw.theta_hash = hash_doubles(w_true.data(), static_cast<std::size_t>(w_true.size()));
  draw.test = TestSet{target->augment(X_test), std::move(y_test)};
  draw.target = std::move(target);
  return draw;
}

}  // namespace

FamilyDraw draw_family_params(const FamilySpec& spec, Rng& rng) {
  if (const auto* gmm = std::get_if<GmmFamily>(&spec)) {
    auto t = draw_gmm(*gmm, rng);
    FamilyDraw draw;
    draw.theta_hash = hash_doubles(t->means().data(),
                                   static_cast<std::size_t>(t->means().size()));
    draw.target = std::move(t);
    return draw;
  }
  if (const auto* rbm = std::get_if<RbmFamily>(&spec)) {
    auto t = draw_rbm(*rbm, rng);
    FamilyDraw draw;
    std::uint64_t h = hash_doubles(t->B().data(), static_cast<std::size_t>(t->B().size()));
    h = hash_doubles(t->b().data(), static_cast<std::size_t>(t->b().size()), h);
    h = hash_doubles(t->c().data(), static_cast<std::size_t>(t->c().size()), h);
    draw.theta_hash = h;
    draw.target = std::move(t);
    return draw;
  }
  return draw_logreg(std::get<LogRegFamily>(spec), rng);
}

}  // namespace amortized
