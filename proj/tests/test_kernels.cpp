#include <gtest/gtest.h>

#include <algorithm>
#include <cmath>
#include <limits>
#include <numeric>

#include "amortized/kernels.hpp"
#include "test_support.hpp"

using namespace amortized;
using amortized::testing::fd_gradient;
using amortized::testing::rel_error;

namespace {

Vector vec(std::initializer_list<double> v) {
  Vector out(static_cast<Eigen::Index>(v.size()));
  std::copy(v.begin(), v.end(), out.data());
  return out;
}

ParticleMatrix line(std::initializer_list<double> v) {
  ParticleMatrix p(static_cast<Eigen::Index>(v.size()), 1);
  std::copy(v.begin(), v.end(), p.data());
  return p;
}

}  // namespace

TEST(Bandwidth, RejectsNonPositiveAndNonFinite) {
  EXPECT_THROW(Bandwidth(0.0), std::invalid_argument);
  EXPECT_THROW(Bandwidth(-1.0), std::invalid_argument);
  EXPECT_THROW(Bandwidth(std::nan("")), std::invalid_argument);
  EXPECT_THROW(Bandwidth{std::numeric_limits<double>::infinity()}, std::invalid_argument);
  EXPECT_EQ(Bandwidth(2.5).value(), 2.5);
}

TEST(RbfEval, EqualPointsGiveOne) {
  Rng rng(1);
  for (Eigen::Index d : {1, 3, 7}) {
    const Vector x = standard_normal_vector(d, rng);
    EXPECT_EQ(rbf_eval(x, x, Bandwidth(0.3)), 1.0);
  }
}

TEST(RbfEval, HalfAtLogTwoDistance) {
  const double h = 1.7;
  EXPECT_NEAR(rbf_eval(vec({0.0}), vec({std::sqrt(h * std::log(2.0))}), Bandwidth(h)), 0.5,
              1e-15);
}

TEST(RbfEval, TwoDimensionalValue) {
  // ||(1,2)||^2 / 10 = 0.5
  EXPECT_NEAR(rbf_eval(vec({0, 0}), vec({1, 2}), Bandwidth(10.0)), 0.60653065971263342, 1e-15);
}

TEST(RbfEval, SymmetricAndRejectsMismatch) {
  Rng rng(2);
  for (int k = 0; k < 50; ++k) {
    const Vector x = standard_normal_vector(4, rng), y = standard_normal_vector(4, rng);
    EXPECT_EQ(rbf_eval(x, y, Bandwidth(1.3)), rbf_eval(y, x, Bandwidth(1.3)));
  }
  EXPECT_THROW(rbf_eval(vec({0, 0}), vec({0}), Bandwidth(1.0)), std::invalid_argument);
  EXPECT_THROW(rbf_grad_first(vec({0, 0}), vec({0}), Bandwidth(1.0)), std::invalid_argument);
}

TEST(RbfGrad, ZeroAtCoincidentPoints) {
  const Vector x = vec({0.3, -1.2});
  EXPECT_EQ(rbf_grad_first(x, x, Bandwidth(2.0)).norm(), 0.0);
}

TEST(RbfGrad, OneDimensionalValue) {
  const Vector g = rbf_grad_first(vec({1.0}), vec({0.0}), Bandwidth(2.0));
  EXPECT_NEAR(g[0], -0.60653065971263342, 1e-15);
  const Vector fd = fd_gradient(
      [](const Vector& x) { return rbf_eval(x, vec({0.0}), Bandwidth(2.0)); }, vec({1.0}), 1e-5);
  EXPECT_NEAR(fd[0], g[0], 1e-9);
}

TEST(RbfGrad, Antisymmetric) {
  Rng rng(3);
  for (int k = 0; k < 50; ++k) {
    const Vector x = standard_normal_vector(3, rng), y = standard_normal_vector(3, rng);
    const Vector gxy = rbf_grad_first(x, y, Bandwidth(0.8));
    const Vector gyx = rbf_grad_first(y, x, Bandwidth(0.8));
    EXPECT_LT((gxy + gyx).norm(), 1e-15);
  }
}

TEST(RbfGrad, MatchesCentralDifferences) {
  Rng rng(4);
  std::uniform_real_distribution<double> unif(0.5, 5.0);
  double worst = 0.0;
  for (int k = 0; k < 100; ++k) {
    const Vector x = standard_normal_vector(3, rng), y = standard_normal_vector(3, rng);
    const Bandwidth h(unif(rng));
    const Vector fd =
        fd_gradient([&](const Vector& v) { return rbf_eval(v, y, h); }, x, 1e-5);
    worst = std::max(worst, rel_error(rbf_grad_first(x, y, h), fd));
  }
  EXPECT_LE(worst, 1e-6);
}

TEST(MedianBandwidth, TwoParticles) {
  EXPECT_NEAR(median_bandwidth(line({0, 1})).value(), 1.0 / std::log(2.0), 1e-15);
}

TEST(MedianBandwidth, ThreeCollinear) {
  // distances {1, 1, 2}
  EXPECT_NEAR(median_bandwidth(line({0, 1, 2})).value(), 0.91023922662683739, 1e-15);
}

TEST(MedianBandwidth, EvenPairCountAveragesMiddle) {
  // distances {1, 3, 7, 2, 6, 4}: middle pair 3 and 4
  const double med = 3.5;
  EXPECT_NEAR(median_bandwidth(line({0, 1, 3, 7})).value(), med * med / std::log(4.0), 1e-13);
}

TEST(MedianBandwidth, Fallbacks) {
  EXPECT_EQ(median_bandwidth(line({0.4, 0.4, 0.4})).value(), 1.0);
  EXPECT_EQ(median_bandwidth(line({2.0})).value(), 1.0);
  EXPECT_EQ(median_bandwidth(ParticleMatrix(0, 3)).value(), 1.0);
}

TEST(MedianBandwidth, PermutationAndTranslationInvariant) {
  Rng rng(5);
  const ParticleMatrix p = amortized::testing::normal_particles(31, 3, rng);
  const double h = median_bandwidth(p).value();

  std::vector<Eigen::Index> order(31);
  std::iota(order.begin(), order.end(), 0);
  std::shuffle(order.begin(), order.end(), rng);
  ParticleMatrix permuted(31, 3);
  for (Eigen::Index i = 0; i < 31; ++i) permuted.row(i) = p.row(order[static_cast<std::size_t>(i)]);
  EXPECT_EQ(median_bandwidth(permuted).value(), h);

  ParticleMatrix shifted = p;
  shifted.rowwise() += Eigen::RowVector3d(10.0, -3.0, 0.5);
  EXPECT_NEAR(median_bandwidth(shifted).value(), h, 1e-12 * h);
}
