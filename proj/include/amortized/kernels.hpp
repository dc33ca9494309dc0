#pragma once

#include "amortized/types.hpp"

namespace amortized {

// Squared-distance scale h of the RBF kernel exp(-||x - y||^2 / h).
class Bandwidth {
 public:
  explicit Bandwidth(double h);
  double value() const { return h_; }

 private:
  double h_;
};

double rbf_eval(const VecRef& x, const VecRef& y, Bandwidth h);

// Gradient of rbf_eval with respect to its first argument.
Vector rbf_grad_first(const VecRef& x, const VecRef& y, Bandwidth h);

/// Median heuristic h = med^2 / ln(n), med the median pairwise Euclidean
/// distance. Falls back to h = 1 when n <= 1 or med == 0. An even number of
/// pairs takes the mean of the two central order statistics.
Bandwidth median_bandwidth(const ParticleMatrix& particles);

}  // namespace amortized
