#include "amortized/kernels.hpp"

#include <algorithm>
#include <cmath>
#include <stdexcept>
#include <vector>

namespace amortized {

Bandwidth::Bandwidth(double h) : h_(h) {
  if (!(h > 0.0) || !std::isfinite(h)) {
    throw std::invalid_argument("Bandwidth: h must be positive and finite, got " +
                                std::to_string(h));
  }
}

namespace {

void check_same_dim(const VecRef& x, const VecRef& y) {
  if (x.size() != y.size()) {
    throw std::invalid_argument("rbf kernel: dimension mismatch (" +
                                std::to_string(x.size()) + " vs " +
                                std::to_string(y.size()) + ")");
  }
}

}  // namespace

double rbf_eval(const VecRef& x, const VecRef& y, Bandwidth h) {
  check_same_dim(x, y);
  return std::exp(-(x - y).squaredNorm() / h.value());
}

Vector rbf_grad_first(const VecRef& x, const VecRef& y, Bandwidth h) {
  check_same_dim(x, y);
  const double k = std::exp(-(x - y).squaredNorm() / h.value());
  return (-2.0 * k / h.value()) * (x - y);
}

Bandwidth median_bandwidth(const ParticleMatrix& particles) {
  const Eigen::Index n = particles.rows();
  if (n <= 1) return Bandwidth(1.0);

  const std::size_t pairs = static_cast<std::size_t>(n) * (n - 1) / 2;
  std::vector<double> dist(pairs);
#pragma omp parallel for schedule(dynamic, 16)
  for (Eigen::Index i = 0; i < n; ++i) {
    // Row i owns pairs (i, j > i); offset = sum_{r<i} (n-1-r).
    std::size_t offset = static_cast<std::size_t>(i) * (2 * n - i - 1) / 2;
    for (Eigen::Index j = i + 1; j < n; ++j) {
      dist[offset++] = (particles.row(i) - particles.row(j)).norm();
    }
  }

  const std::size_t mid = pairs / 2;
  std::nth_element(dist.begin(), dist.begin() + mid, dist.end());
  double med = dist[mid];
  if (pairs % 2 == 0) {
    const double lower = *std::max_element(dist.begin(), dist.begin() + mid);
    med = 0.5 * (lower + med);
  }

  const double log_n = std::log(static_cast<double>(n));
  if (!(med > 0.0) || !(log_n > 0.0)) return Bandwidth(1.0);
  const double h = med * med / log_n;
  if (!(h > 0.0) || !std::isfinite(h)) return Bandwidth(1.0);
  return Bandwidth(h);
}

}  // namespace amortized
