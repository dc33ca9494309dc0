#include <gtest/gtest.h>

#include <cmath>
#include <numeric>
#include <set>

#include "amortized/family.hpp"
#include "amortized/targets.hpp"
#include "test_support.hpp"

using namespace amortized;
using namespace amortized::testing;

namespace {

// Every concrete target at a moderate size, for the shared property checks.
std::vector<std::pair<std::string, TargetPtr>> all_targets() {
  Rng rng(11);
  Eigen::MatrixXd means(3, 4);
  means.setRandom();
  auto gmm = std::make_shared<const GaussianMixture>(means, 0.7);
  auto rbm = random_rbm(4, 3, rng);
  auto logreg = random_logreg(20, 3, rng);
  return {{"gmm", gmm},
          {"rbm", rbm},
          {"logreg", logreg},
          {"tempered_gmm", std::make_shared<const TemperedTarget>(gmm, 0.5)}};
}

}  // namespace

TEST(GmmScore, SingleComponent) {
  const Vector mu = Vector::LinSpaced(3, -1.0, 1.0);
  const auto g = gaussian(mu, 0.1);
  const Vector z = Vector::Constant(3, 0.25);
  EXPECT_LT((g->score(z) - (mu - z) / 0.01).norm(), 1e-12);
}

TEST(GmmScore, SymmetricPairVanishesAtOrigin) {
  Eigen::MatrixXd means(2, 1);
  means << -0.7, 0.7;
  const GaussianMixture gmm(means, 0.3);
  EXPECT_EQ(gmm.score(Vector::Zero(1))[0], 0.0);
}

TEST(GmmScore, MatchesLogSumExpDifferences) {
  Eigen::MatrixXd means(2, 1);
  means << -1.0, 1.0;
  const GaussianMixture gmm(means, 0.1);
  const Vector z = Vector::Constant(1, 0.9);
  const Vector fd = fd_gradient([&](const Vector& v) { return gmm.log_density_unnorm(v); }, z, 1e-6);
  EXPECT_LE(rel_error(gmm.score(z), fd), 1e-5);
}

TEST(GmmScore, IdenticalComponentsMatchSingle) {
  Rng rng(12);
  const Vector mu = standard_normal_vector(3, rng);
  for (int k : {2, 3, 4, 10}) {
    const GaussianMixture many(Eigen::MatrixXd(mu.transpose().replicate(k, 1)), 0.4);
    const auto one = gaussian(mu, 0.4);
    for (int r = 0; r < 10; ++r) {
      const Vector z = standard_normal_vector(3, rng);
      const Vector a = many.score(z), b = one->score(z);
      for (Eigen::Index j = 0; j < 3; ++j) EXPECT_NEAR(a[j], b[j], 1e-13 * (1.0 + std::abs(b[j])));
    }
  }
}

TEST(GmmScore, StableFarFromModes) {
  Eigen::MatrixXd means(2, 2);
  means << -1, 0, 1, 0;
  const GaussianMixture gmm(means, 0.1);
  const Vector z = Vector::Constant(2, 40.0);
  EXPECT_TRUE(gmm.score(z).allFinite());
  EXPECT_TRUE(std::isfinite(gmm.log_density_unnorm(z)));
}

TEST(RbmScore, ZeroCouplingIsGaussian) {
  Rng rng(13);
  const Vector b = standard_normal_vector(4, rng), c = standard_normal_vector(2, rng);
  const GaussBernoulliRBM rbm(Eigen::MatrixXd::Zero(4, 2), b, c);
  const Vector z = standard_normal_vector(4, rng);
  EXPECT_LT((rbm.score(z) - (b - z)).norm(), 1e-15);
}

TEST(RbmScore, OriginGivesCouplingTimesTanh) {
  Rng rng(14);
  Eigen::MatrixXd B = Eigen::MatrixXd::Random(4, 3);
  const Vector c = standard_normal_vector(3, rng);
  const GaussBernoulliRBM rbm(B, Vector::Zero(4), c);
  const Vector want = B * c.array().tanh().matrix();
  EXPECT_LT((rbm.score(Vector::Zero(4)) - want).norm(), 1e-14);
}

TEST(RbmScore, MatchesDifferences) {
  Rng rng(15);
  const auto rbm = random_rbm(4, 3, rng, 1.0);
  for (int k = 0; k < 10; ++k) {
    const Vector z = standard_normal_vector(4, rng);
    const Vector fd =
        fd_gradient([&](const Vector& v) { return rbm->log_density_unnorm(v); }, z, 1e-6);
    EXPECT_LE(rel_error(rbm->score(z), fd), 1e-6);
  }
}

TEST(RbmScore, StableForLargeActivations) {
  const GaussBernoulliRBM rbm(Eigen::MatrixXd::Constant(2, 1, 50.0), Vector::Zero(2),
                              Vector::Zero(1));
  const Vector z = Vector::Constant(2, 30.0);
  EXPECT_TRUE(std::isfinite(rbm.log_density_unnorm(z)));
  EXPECT_TRUE(rbm.score(z).allFinite());
}

TEST(LogRegScore, SinglePointAtOrigin) {
  const BayesLogReg t(Eigen::MatrixXd::Ones(1, 1), Vector::Ones(1), 1.0, false, 0);
  EXPECT_EQ(t.score(Vector::Zero(1))[0], 0.5);
}

TEST(LogRegScore, AllMatchesExplicitFullIndexSet) {
  Rng rng(16);
  const auto t = random_logreg(30, 4, rng);
  std::vector<std::size_t> all(30);
  std::iota(all.begin(), all.end(), 0);
  const Vector z = standard_normal_vector(t->dim(), rng);
  EXPECT_LT((t->score(z) - t->score(z, Minibatch(all))).norm(), 1e-12);
}

TEST(LogRegScore, MatchesDifferencesOfFullPosterior) {
  Rng rng(17);
  const auto t = random_logreg(20, 3, rng);
  for (int k = 0; k < 10; ++k) {
    const Vector z = standard_normal_vector(t->dim(), rng);
    const Vector fd =
        fd_gradient([&](const Vector& v) { return t->log_density_unnorm(v); }, z, 1e-6);
    EXPECT_LE(rel_error(t->score(z), fd), 1e-6);
  }
}

TEST(LogRegScore, PartitionAverageEqualsFullData) {
  Rng rng(18);
  const auto t = random_logreg(40, 3, rng, true, 10);
  const Vector z = standard_normal_vector(t->dim(), rng);
  Vector mean = Vector::Zero(t->dim());
  for (std::size_t start = 0; start < 40; start += 10) {
    std::vector<std::size_t> block(10);
    std::iota(block.begin(), block.end(), start);
    mean += t->score(z, Minibatch(block)) / 4.0;
  }
  EXPECT_LT(rel_error(mean, t->score(z)), 1e-12);
}

TEST(LogRegScore, BadMinibatchesThrow) {
  Rng rng(19);
  const auto t = random_logreg(5, 2, rng);
  const Vector z = Vector::Zero(t->dim());
  std::vector<std::size_t> none;
  std::vector<std::size_t> out_of_range{7};
  EXPECT_THROW(t->score(z, Minibatch(none)), std::invalid_argument);
  EXPECT_THROW(t->score(z, Minibatch(out_of_range)), std::out_of_range);
  EXPECT_THROW(t->score_jvp(z, z, Minibatch(none)), std::invalid_argument);
}

TEST(LogReg, RejectsNonBinaryLabels) {
  Vector y(2);
  y << 0.0, -1.0;
  EXPECT_THROW(BayesLogReg(Eigen::MatrixXd::Ones(2, 1), y, 1.0, true, 0), std::invalid_argument);
}

TEST(LogReg, BiasColumnAppended) {
  Rng rng(20);
  const auto t = random_logreg(6, 3, rng, true);
  EXPECT_EQ(t->dim(), 4);
  EXPECT_TRUE((t->design().col(3).array() == 1.0).all());
}

TEST(TemperedScore, ZeroAlphaIsIdentity) {
  Rng rng(21);
  const auto rbm = random_rbm(3, 2, rng);
  const TemperedTarget t(rbm, 0.0);
  const Vector z = standard_normal_vector(3, rng);
  EXPECT_EQ(t.score(z), rbm->score(z));
}

TEST(TemperedScore, AlphaOneHalvesEveryCoordinate) {
  Rng rng(22);
  const auto rbm = random_rbm(3, 2, rng);
  const TemperedTarget t(rbm, 1.0);
  const Vector z = standard_normal_vector(3, rng);
  const Vector inner = rbm->score(z), half = t.score(z);
  for (Eigen::Index j = 0; j < 3; ++j) EXPECT_EQ(half[j], 0.5 * inner[j]);
}

TEST(TemperedScore, MatchesDifferencesOfScaledLogDensity) {
  Rng rng(23);
  const auto rbm = random_rbm(3, 2, rng);
  const TemperedTarget t(rbm, 2.5);
  const Vector z = standard_normal_vector(3, rng);
  const Vector fd = fd_gradient(
      [&](const Vector& v) { return rbm->log_density_unnorm(v) / 3.5; }, z, 1e-6);
  EXPECT_LE(rel_error(t.score(z), fd), 1e-6);
  EXPECT_THROW(TemperedTarget(rbm, -0.1), std::invalid_argument);
}

TEST(TargetProperties, ScoreMatchesLogDensityDifferences) {
  for (const auto& [name, t] : all_targets()) {
    Rng rng(24);
    double worst = 0.0;
    for (int k = 0; k < 50; ++k) {
      const Vector z = standard_normal_vector(t->dim(), rng);
      const Vector fd =
          fd_gradient([&](const Vector& v) { return t->log_density_unnorm(v); }, z, 1e-6);
      worst = std::max(worst, rel_error(t->score(z), fd));
    }
    EXPECT_LE(worst, 1e-4) << name;
  }
}

TEST(TargetProperties, HessianProductSymmetricAndConsistent) {
  for (const auto& [name, t] : all_targets()) {
    Rng rng(25);
    const FdOnly fallback(t);
    for (int k = 0; k < 50; ++k) {
      const Vector z = standard_normal_vector(t->dim(), rng);
      const Vector u = standard_normal_vector(t->dim(), rng);
      const Vector v = standard_normal_vector(t->dim(), rng);
      const double uhv = u.dot(t->score_jvp(z, v)), vhu = v.dot(t->score_jvp(z, u));
      EXPECT_LE(rel_error(uhv, vhu, 1e-8), 1e-3) << name;
      EXPECT_LE(rel_error(t->score_jvp(z, v), t->score_jvp_fd(z, v), 1e-8), 1e-3) << name;
      EXPECT_LE(rel_error(fallback.score_jvp(z, v), t->score_jvp(z, v), 1e-8), 1e-3) << name;
    }
  }
}

TEST(TargetProperties, HessianProductLinearInDirection) {
  for (const auto& [name, t] : all_targets()) {
    Rng rng(26);
    const Vector z = standard_normal_vector(t->dim(), rng);
    const Vector u = standard_normal_vector(t->dim(), rng);
    const Vector v = standard_normal_vector(t->dim(), rng);
    const Vector lhs = t->score_jvp(z, 2.0 * u - 3.0 * v);
    const Vector rhs = 2.0 * t->score_jvp(z, u) - 3.0 * t->score_jvp(z, v);
    EXPECT_LE(rel_error(lhs, rhs), 1e-12) << name;
  }
}

TEST(TargetProperties, LogRegMinibatchHessianMatchesDifferences) {
  Rng rng(27);
  const auto t = random_logreg(30, 3, rng, true, 5);
  std::vector<std::size_t> batch{3, 7, 7, 12, 29};
  const Vector z = standard_normal_vector(t->dim(), rng);
  const Vector v = standard_normal_vector(t->dim(), rng);
  EXPECT_LE(rel_error(t->score_jvp(z, v, Minibatch(batch)),
                      t->score_jvp_fd(z, v, Minibatch(batch))),
            1e-6);
}

TEST(TargetProperties, DimensionMismatchThrows) {
  for (const auto& [name, t] : all_targets()) {
    const Vector wrong = Vector::Zero(t->dim() + 1);
    EXPECT_THROW(t->score(wrong), std::invalid_argument) << name;
    EXPECT_THROW(t->log_density_unnorm(wrong), std::invalid_argument) << name;
  }
}

TEST(FamilyDraw, GmmMeansInRangeWithFixedSigma) {
  Rng rng(28);
  for (int k = 0; k < 20; ++k) {
    const auto g = draw_gmm(GmmFamily{}, rng);
    EXPECT_EQ(g->components(), 10);
    EXPECT_EQ(g->sigma(), 0.1);
    EXPECT_LE(g->means().cwiseAbs().maxCoeff(), 1.0);
  }
}

TEST(FamilyDraw, RbmCouplingsArePlusMinusOneTenth) {
  Rng rng(29);
  const auto r = draw_rbm(RbmFamily{}, rng);
  EXPECT_EQ(r->dim(), 100);
  EXPECT_EQ(r->hidden(), 10);
  std::set<double> values(r->B().data(), r->B().data() + r->B().size());
  EXPECT_EQ(values, (std::set<double>{-0.1, 0.1}));
}

TEST(FamilyDraw, DeterministicInSeed) {
  for (const FamilySpec spec : {FamilySpec{GmmFamily{}}, FamilySpec{RbmFamily{20, 10, 0.1}},
                                FamilySpec{LogRegFamily{}}}) {
    Rng a(30), b(30);
    const FamilyDraw da = draw_family_params(spec, a), db = draw_family_params(spec, b);
    EXPECT_EQ(da.theta_hash, db.theta_hash);
    const Vector z = Vector::Constant(da.target->dim(), 0.3);
    EXPECT_EQ(da.target->score(z), db.target->score(z));
  }
}

TEST(FamilyDraw, LogRegCarriesAugmentedTestSet) {
  Rng rng(31);
  const FamilyDraw d = draw_family_params(LogRegFamily{5, 50, 40, 1.0, true, 10}, rng);
  ASSERT_TRUE(d.test.has_value());
  EXPECT_EQ(d.target->dim(), 6);
  EXPECT_EQ(d.test->X.rows(), 40);
  EXPECT_EQ(d.test->X.cols(), 6);
  EXPECT_EQ(d.target->minibatch_size(), 10u);
  EXPECT_EQ(d.target->num_data(), 50u);
}
