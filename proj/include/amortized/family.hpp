#pragma once

#include <cstdint>
#include <optional>
#include <string>
#include <variant>

#include "amortized/targets.hpp"

namespace amortized {

struct GmmFamily {
  Eigen::Index dim = 2;
  Eigen::Index components = 10;
  double sigma = 0.1;
  double mean_range = 1.0;  // means ~ Uniform(-range, range)
};

struct RbmFamily {
  Eigen::Index dim = 100;
  Eigen::Index hidden = 10;
  double weight = 0.1;  // B entries uniform on {-weight, +weight}
};

// Synthetic stand-in for a collection of related classification datasets:
// w* ~ N(0, I), x ~ N(0, I), y ~ Bernoulli(sigmoid(x'w*)).
struct LogRegFamily {
  Eigen::Index features = 20;
  Eigen::Index train_size = 1000;
  Eigen::Index test_size = 1000;
  double prior_precision = 1.0;
  bool with_bias = true;
  std::size_t minibatch = 100;
};

using FamilySpec = std::variant<GmmFamily, RbmFamily, LogRegFamily>;

// Held-out classification data attached to a logistic-regression draw, with
// features already augmented to match the target's dimension.
struct TestSet {
  Eigen::MatrixXd X;
  Vector y;
};

struct FamilyDraw {
  TargetPtr target;
  std::uint64_t theta_hash = 0;
  std::optional<TestSet> test;
};

std::string family_name(const FamilySpec& spec);
Eigen::Index family_dim(const FamilySpec& spec);

FamilyDraw draw_family_params(const FamilySpec& spec, Rng& rng);

std::shared_ptr<const GaussianMixture> draw_gmm(const GmmFamily& spec, Rng& rng);
std::shared_ptr<const GaussBernoulliRBM> draw_rbm(const RbmFamily& spec, Rng& rng);

// FNV-1a over the raw bytes of a matrix; identifies a drawn parameter set.
std::uint64_t hash_doubles(const double* data, std::size_t count,
                           std::uint64_t seed = 0xcbf29ce484222325ULL);

}  // namespace amortized
