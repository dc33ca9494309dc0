#pragma once

#include <cstddef>
#include <cstdint>
#include <random>
#include <span>
#include <stdexcept>
#include <string>

#include <Eigen/Dense>

namespace amortized {

using Vector = Eigen::VectorXd;
using VecRef = Eigen::Ref<const Eigen::VectorXd>;

// Row i is particle z_i; rows are contiguous so a row binds to VecRef without a copy.
using ParticleMatrix =
    Eigen::Matrix<double, Eigen::Dynamic, Eigen::Dynamic, Eigen::RowMajor>;
using SteinGradient = ParticleMatrix;

using Rng = std::mt19937_64;

// Data indices used by a stochastic score. Default-constructed means all data;
// an explicit index set must be non-empty.
class Minibatch {
 public:
  Minibatch() = default;
  explicit Minibatch(std::span<const std::size_t> indices)
      : indices_(indices), all_(false) {}

  bool is_all() const { return all_; }
  std::span<const std::size_t> indices() const { return indices_; }

 private:
  std::span<const std::size_t> indices_;
  bool all_ = true;
};

// Thrown when an iterate stops being finite; carries the iteration that broke.
class NonFiniteError : public std::runtime_error {
 public:
  NonFiniteError(const std::string& where, long iteration)
      : std::runtime_error(where + ": non-finite value at iteration " +
                           std::to_string(iteration)),
        iteration_(iteration) {}
  long iteration() const { return iteration_; }

 private:
  long iteration_;
};

// splitmix64 finalizer; derives independent child streams from a root seed.
inline std::uint64_t derive_seed(std::uint64_t root, std::uint64_t index) {
  std::uint64_t x = root + 0x9E3779B97F4A7C15ULL * (index + 1);
  x = (x ^ (x >> 30)) * 0xBF58476D1CE4E5B9ULL;
  x = (x ^ (x >> 27)) * 0x94D049BB133111EBULL;
  return x ^ (x >> 31);
}

inline Vector standard_normal_vector(Eigen::Index d, Rng& rng) {
  std::normal_distribution<double> normal(0.0, 1.0);
  Vector v(d);
  for (Eigen::Index i = 0; i < d; ++i) v[i] = normal(rng);
  return v;
}

}  // namespace amortized
