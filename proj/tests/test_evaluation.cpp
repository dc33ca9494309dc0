#include <gtest/gtest.h>

#include <cmath>
#include <numeric>

#include "amortized/baselines.hpp"
#include "amortized/evaluation.hpp"
#include "amortized/moments.hpp"
#include "test_support.hpp"

using namespace amortized;
using namespace amortized::testing;

namespace {

// Exact i.i.d. draws from a Gaussian mixture target.
SampleSource exact_gmm_source() {
  return [](const TargetDensity& target, std::size_t n, Rng& rng) {
    const auto& gmm = dynamic_cast<const GaussianMixture&>(target);
    std::uniform_int_distribution<Eigen::Index> pick(0, gmm.components() - 1);
    std::normal_distribution<double> normal(0.0, gmm.sigma());
    ParticleMatrix z(static_cast<Eigen::Index>(n), gmm.dim());
    for (Eigen::Index i = 0; i < z.rows(); ++i) {
      const Eigen::Index k = pick(rng);
      for (Eigen::Index j = 0; j < z.cols(); ++j) z(i, j) = gmm.means()(k, j) + normal(rng);
    }
    return z;
  };
}

double mean_and_se(const std::vector<double>& v, double& se) {
  const double n = static_cast<double>(v.size());
  const double mean = std::accumulate(v.begin(), v.end(), 0.0) / n;
  double var = 0.0;
  for (double x : v) var += (x - mean) * (x - mean);
  se = std::sqrt(var / (n - 1.0) / n);
  return mean;
}

}  // namespace

TEST(PowerDecay, Values) {
  EXPECT_EQ(power_decay_step(0, 1, 0.55, 0), 1.0);
  EXPECT_NEAR(power_decay_step(-2, 1, 0.55, 0), 0.01, 1e-17);
  EXPECT_NEAR(power_decay_step(0, 1, 0.55, 9), 0.28183829312644537, 1e-15);
  EXPECT_THROW(power_decay_step(0, 0, 0.55, 0), std::domain_error);
  EXPECT_FALSE((PowerDecaySchedule{0, 0, 0.55, 15}.valid()));
  EXPECT_TRUE((PowerDecaySchedule{0, 1, 0.55, 15}.valid()));
}

TEST(PowerDecay, SamplerFollowsSchedule) {
  const PowerDecaySchedule sched{-1, 3, 0.55, 6};
  const LangevinSampler s = schedule_sampler(sched, 4);
  const auto eta = sched.step_sizes();
  for (int t = 0; t < 6; ++t) {
    EXPECT_NEAR(s.step_size(t)[0], eta[static_cast<std::size_t>(t)], 1e-15);
    EXPECT_NEAR(s.step_size(t)[3], eta[static_cast<std::size_t>(t)], 1e-15);
  }
  EXPECT_TRUE(s.scalar_step());
}

TEST(GmmMoments, ClosedForms) {
  const auto one = gaussian(Vector::Zero(1), 0.1);
  EXPECT_NEAR(exact_moments_gmm(*one, {MomentKind::Identity})[0], 0.0, 1e-17);
  EXPECT_NEAR(exact_moments_gmm(*one, {MomentKind::Square})[0], 0.01, 1e-17);
  Eigen::MatrixXd means(2, 1);
  means << -1, 1;
  const GaussianMixture two(means, 0.1);
  EXPECT_NEAR(exact_moments_gmm(two, {MomentKind::Identity})[0], 0.0, 1e-17);
  EXPECT_NEAR(exact_moments_gmm(two, {MomentKind::Square})[0], 1.01, 1e-15);
}

TEST(GmmMoments, CosineMatchesMonteCarlo) {
  const auto t = gaussian(Vector::Zero(1), 1.0);
  const MomentSpec spec{MomentKind::Cosine, 1.0, 0.0};
  EXPECT_NEAR(exact_moments_gmm(*t, spec)[0], 0.60653065971263342, 1e-15);
  Rng rng(1);
  std::normal_distribution<double> normal(0.0, 1.0);
  const int n = 2000000;
  double sum = 0.0, sq = 0.0;
  for (int i = 0; i < n; ++i) {
    const double c = std::cos(normal(rng));
    sum += c;
    sq += c * c;
  }
  const double mean = sum / n;
  const double se = std::sqrt((sq / n - mean * mean) / n);
  EXPECT_LE(std::abs(mean - 0.60653065971263342), 3.0 * se);
}

TEST(RbmMoments, DecoupledIsGaussian) {
  Rng rng(2);
  const Vector b = standard_normal_vector(3, rng);
  const GaussBernoulliRBM rbm(Eigen::MatrixXd::Zero(3, 2), b, Vector::Zero(2));
  EXPECT_LT((exact_moments_rbm(rbm, {MomentKind::Identity}) - b).norm(), 1e-14);
  EXPECT_LT((exact_moments_rbm(rbm, {MomentKind::Square}) -
             (Vector::Ones(3) + b.cwiseAbs2()))
                .norm(),
            1e-14);
}

TEST(RbmMoments, SingleHiddenUnitSymmetric) {
  const GaussBernoulliRBM rbm(Eigen::MatrixXd::Constant(1, 1, 0.1), Vector::Zero(1), Vector::Zero(1));
  EXPECT_NEAR(exact_moments_rbm(rbm, {MomentKind::Identity})[0], 0.0, 1e-16);
  EXPECT_NEAR(exact_moments_rbm(rbm, {MomentKind::Square})[0], 1.01, 1e-14);
}

TEST(RbmMoments, EnumerationCap) {
  Rng rng(3);
  const auto rbm = random_rbm(2, 4, rng);
  EXPECT_THROW(exact_moments_rbm(*rbm, {MomentKind::Identity}, 3), std::invalid_argument);
}

TEST(RbmMoments, AgreeWithLongMetropolisAdjustedLangevinChain) {
  Rng rng(4);
  const auto rbm = random_rbm(5, 3, rng, 0.8);
  const double eps = 0.3;
  auto log_q = [&](const Vector& to, const Vector& from) {
    return -(to - from - eps * rbm->score(from)).squaredNorm() / (4.0 * eps);
  };
  std::uniform_real_distribution<double> unif(0.0, 1.0);
  Vector z = rbm->b();
  const int burn = 10000, steps = 1000000, thin = 10, batches = 50;
  std::vector<Vector> batch_means(batches, Vector::Zero(5));
  const int per_batch = steps / thin / batches;
  int kept = 0;
  for (int s = 0; s < burn + steps; ++s) {
    const Vector prop = z + eps * rbm->score(z) + std::sqrt(2.0 * eps) * standard_normal_vector(5, rng);
    const double log_a = rbm->log_density_unnorm(prop) - rbm->log_density_unnorm(z) +
                         log_q(z, prop) - log_q(prop, z);
    if (std::log(unif(rng)) < log_a) z = prop;
    if (s >= burn && (s - burn) % thin == 0) {
      batch_means[static_cast<std::size_t>(kept / per_batch)] += z / per_batch;
      ++kept;
    }
  }
  const Vector exact = exact_moments_rbm(*rbm, {MomentKind::Identity});
  for (Eigen::Index j = 0; j < 5; ++j) {
    std::vector<double> col;
    for (const auto& m : batch_means) col.push_back(m[j]);
    double se = 0.0;
    const double mean = mean_and_se(col, se);
    EXPECT_LE(std::abs(mean - exact[j]), 3.0 * se) << j;
  }
}

TEST(MseTable, ExactSamplerScalesLikeOneOverN) {
  const GmmFamily family{1, 1, 0.5, 1.0};
  MseOptions opt;
  opt.specs = {MomentKind::Identity};
  opt.sample_sizes = {100, 1000, 10000};
  opt.trials = 40;
  const auto rows = mse_table(exact_gmm_source(), family, opt, "exact", 0);
  ASSERT_EQ(rows.size(), 120u);
  std::vector<double> log_n, log_mse;
  for (std::size_t n : opt.sample_sizes) {
    const double mse = mean_value(rows, "identity", n);
    EXPECT_NEAR(mse * static_cast<double>(n), 0.25, 0.25 * 0.5) << n;
    log_n.push_back(std::log(static_cast<double>(n)));
    log_mse.push_back(std::log(mse));
  }
  const double slope = (log_mse[2] - log_mse[0]) / (log_n[2] - log_n[0]);
  EXPECT_GE(slope, -1.2);
  EXPECT_LE(slope, -0.8);
  EXPECT_LT(mean_value(rows, "identity", 10000), mean_value(rows, "identity", 100));
}

TEST(MseTable, PointMassAtMeanHasZeroIdentityError) {
  SampleSource point = [](const TargetDensity& t, std::size_t n, Rng&) {
    const auto& g = dynamic_cast<const GaussianMixture&>(t);
    ParticleMatrix z(static_cast<Eigen::Index>(n), g.dim());
    z.rowwise() = g.means().row(0);
    return z;
  };
  MseOptions opt;
  opt.specs = {MomentKind::Identity};
  opt.sample_sizes = {1};
  opt.trials = 5;
  for (const auto& r : mse_table(point, GmmFamily{2, 1, 0.1, 1.0}, opt, "point", 0)) {
    EXPECT_EQ(r.value, 0.0);
  }
}

TEST(MseTable, TrialsDependOnlyOnTheirIndex) {
  MseOptions opt;
  opt.sample_sizes = {50};
  opt.trials = 5;
  const auto five = mse_table(exact_gmm_source(), GmmFamily{}, opt, "exact", 0);
  opt.trials = 3;
  const auto three = mse_table(exact_gmm_source(), GmmFamily{}, opt, "exact", 0);
  for (std::size_t i = 0; i < three.size(); ++i) {
    EXPECT_EQ(three[i].value, five[i].value);
    EXPECT_EQ(three[i].trial, five[i].trial);
    EXPECT_EQ(three[i].spec, five[i].spec);
  }
  // Reported means do not depend on row order.
  auto shuffled = five;
  std::reverse(shuffled.begin(), shuffled.end());
  EXPECT_EQ(mean_value(shuffled, "square", 50), mean_value(five, "square", 50));
}

TEST(MseTable, CosineSpecSharedAcrossMethods) {
  // Same seed: the cosine (w, b) and the parameters match for any source,
  // so the exact-source and point-source tables differ only in samples.
  MseOptions opt;
  opt.specs = {MomentKind::Cosine};
  opt.sample_sizes = {200};
  opt.trials = 3;
  const auto a = mse_table(exact_gmm_source(), GmmFamily{}, opt, "a", 0);
  const auto b = mse_table(exact_gmm_source(), GmmFamily{}, opt, "b", 0);
  for (std::size_t i = 0; i < a.size(); ++i) EXPECT_EQ(a[i].value, b[i].value);
}

TEST(Classify, SeparableDataWithConcentratedPosterior) {
  TestSet test{Eigen::MatrixXd(2, 1), Vector(2)};
  test.X << -1.0, 1.0;
  test.y << 0.0, 1.0;
  ParticleMatrix w = ParticleMatrix::Constant(10, 1, 50.0);
  EXPECT_EQ(predict_scores(w, test).accuracy, 1.0);
}

TEST(Classify, PointMassSampleCountIrrelevant) {
  Rng rng(5);
  const FamilyDraw d = draw_family_params(LogRegFamily{4, 30, 30, 1.0, true, 0}, rng);
  const Vector w = standard_normal_vector(5, rng);
  ParticleMatrix one(1, 5), many(20, 5);
  one.row(0) = w.transpose();
  many.rowwise() = w.transpose();
  const ClassifyResult a = predict_scores(one, *d.test), b = predict_scores(many, *d.test);
  EXPECT_EQ(a.accuracy, b.accuracy);
  EXPECT_NEAR(a.log_likelihood, b.log_likelihood, 1e-12);
}

TEST(Classify, RandomGuessingIsNearHalf) {
  std::vector<double> acc;
  for (int s = 0; s < 50; ++s) {
    Rng rng(100 + s);
    const FamilyDraw d = draw_family_params(LogRegFamily{5, 10, 400, 1.0, true, 0}, rng);
    const ParticleMatrix w = normal_particles(1, 6, rng, 0.0, 1000.0);
    acc.push_back(predict_scores(w, *d.test).accuracy);
  }
  double se = 0.0;
  const double mean = mean_and_se(acc, se);
  EXPECT_LE(std::abs(mean - 0.5), 3.0 * se);
}

TEST(Classify, ShapeErrors) {
  TestSet test{Eigen::MatrixXd::Ones(3, 2), Vector::Ones(3)};
  EXPECT_THROW(predict_scores(ParticleMatrix::Zero(4, 3), test), std::invalid_argument);
  EXPECT_THROW(predict_scores(ParticleMatrix(0, 2), test), std::invalid_argument);
}

TEST(GridSearch, SingleCellWins) {
  GridOptions opt;
  opt.a_min = opt.a_max = -2;
  opt.b_min = opt.b_max = 3;
  opt.train_draws = 2;
  opt.samples = 50;
  const GridResult r = grid_search_baseline(GmmFamily{1, 10, 0.1, 1.0}, 5, opt);
  EXPECT_EQ(r.best_a, -2);
  EXPECT_EQ(r.best_b, 3);
  EXPECT_EQ(r.cells.size(), 1u);
}

TEST(GridSearch, WinnerIsMinimalValidAndReproducible) {
  GridOptions opt;
  opt.train_draws = 3;
  opt.samples = 200;
  const GridResult r = grid_search_baseline(GmmFamily{1, 10, 0.1, 1.0}, 15, opt);
  EXPECT_EQ(r.cells.size(), 90u);
  int best_count = 0;
  for (const auto& c : r.cells) {
    if (c.b == 0) EXPECT_FALSE(c.valid);
    if (!c.valid || c.diverged) continue;
    EXPECT_GE(c.score, r.best_score);
    if (c.score == r.best_score) ++best_count;
  }
  EXPECT_EQ(best_count, 1);
  EXPECT_NE(r.best_b, 0);
  const GridResult again = grid_search_baseline(GmmFamily{1, 10, 0.1, 1.0}, 15, opt);
  EXPECT_EQ(again.best_a, r.best_a);
  EXPECT_EQ(again.best_b, r.best_b);
  EXPECT_EQ(again.best_score, r.best_score);
}

TEST(GridSearch, AllInvalidThrows) {
  GridOptions opt;
  opt.b_min = opt.b_max = 0;
  opt.a_min = opt.a_max = 0;
  EXPECT_THROW(grid_search_baseline(GmmFamily{}, 5, opt), std::runtime_error);
}

TEST(Refine, ExtraStepsMoveTowardTarget) {
  const auto t = gaussian(Vector::Zero(1), 1.0);
  SampleSource far = [](const TargetDensity&, std::size_t n, Rng&) {
    return ParticleMatrix::Constant(static_cast<Eigen::Index>(n), 1, 5.0);
  };
  const SampleSource refined = refined_source(far, std::vector<double>(20, 0.2));
  Rng rng(6);
  const ParticleMatrix z = refined(*t, 500, rng);
  EXPECT_LT(std::abs(z.mean()), 0.5);
  EXPECT_EQ(refined_source(far, {})(*t, 3, rng)(0, 0), 5.0);
}
