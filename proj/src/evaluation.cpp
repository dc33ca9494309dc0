#include "amortized/evaluation.hpp"

#include <cmath>
#include <memory>
#include <stdexcept>

#include "amortized/langevin.hpp"

namespace amortized {

SampleSource model_source(const SamplerModel& model) {
  std::shared_ptr<const SamplerModel> copy = model.clone();
  return [copy](const TargetDensity& target, std::size_t n, Rng& rng) {
    return draw_samples(*copy, target, n, rng);
  };
}

SampleSource refined_source(SampleSource base, std::vector<double> step_sizes) {
  if (step_sizes.empty()) return base;
  return [base = std::move(base), step_sizes = std::move(step_sizes)](
             const TargetDensity& target, std::size_t n, Rng& rng) {
    ParticleMatrix z = base(target, n, rng);
    const int steps = static_cast<int>(step_sizes.size());
    LangevinSampler chain(steps, target.dim(), steps, 0.0, /*scalar_step=*/true);
    Eigen::MatrixXd log_step(steps, 1);
    for (int t = 0; t < steps; ++t) log_step(t, 0) = std::log(step_sizes[static_cast<std::size_t>(t)]);
    chain.set_log_step(log_step);
    const std::uint64_t root = rng();
    std::exception_ptr failure;
#pragma omp parallel for schedule(static)
    for (long i = 0; i < static_cast<long>(n); ++i) {
      try {
        Rng local(derive_seed(root, static_cast<std::uint64_t>(i)));
        SeedBundle seed = chain.draw_seed(target, local);
        seed.z0 = z.row(i).transpose();
        z.row(i) = chain.sample(target, seed).transpose();
      } catch (...) {
#pragma omp critical(refine_failure)
        if (!failure) failure = std::current_exception();
      }
    }
    if (failure) std::rethrow_exception(failure);
    return z;
  };
}

namespace {

constexpr std::uint64_t kSampleStream = 0x5A3D1E00ULL;

void append_trial(std::vector<ResultRow>& rows, const SampleSource& source,
                  const TargetDensity& target, Rng& spec_rng, std::uint64_t sample_root,
                  const MseOptions& options, const std::string& family,
                  const std::string& method, int steps, int trial) {
  std::vector<MomentSpec> specs;
  for (MomentKind kind : options.specs) specs.push_back(draw_moment_spec(kind, spec_rng));
  std::vector<Vector> exact;
  for (const auto& spec : specs) exact.push_back(exact_moments(target, spec));

  for (std::size_t n : options.sample_sizes) {
    Rng sample_rng(derive_seed(sample_root, n));
    const ParticleMatrix z = source(target, n, sample_rng);
    for (std::size_t s = 0; s < specs.size(); ++s) {
      rows.push_back({family, method, steps, to_string(specs[s].kind), n, trial,
                      moment_mse(z, exact[s], specs[s])});
    }
  }
}

void check_options(const MseOptions& options) {
  if (options.trials < 1) throw std::invalid_argument("mse_table: trials must be >= 1");
  if (options.sample_sizes.empty()) throw std::invalid_argument("mse_table: no sample sizes");
  for (std::size_t n : options.sample_sizes) {
    if (n < 1) throw std::invalid_argument("mse_table: sample sizes must be >= 1");
  }
}

}  // namespace

std::vector<ResultRow> mse_table(const SampleSource& source, const FamilySpec& family,
                                 const MseOptions& options, const std::string& method,
                                 int steps) {
  check_options(options);
  std::vector<ResultRow> rows;
  for (int t = 0; t < options.trials; ++t) {
    const std::uint64_t trial_seed = derive_seed(options.seed, static_cast<std::uint64_t>(t));
    Rng trial_rng(trial_seed);
    const FamilyDraw draw = draw_family_params(family, trial_rng);
    append_trial(rows, source, *draw.target, trial_rng, trial_seed ^ kSampleStream, options,
                 family_name(family), method, steps, t);
  }
  return rows;
}

std::vector<ResultRow> mse_on_target(const SampleSource& source,
                                     const TargetDensity& target,
                                     const MseOptions& options,
                                     const std::string& family,
                                     const std::string& method, int steps) {
  check_options(options);
  std::vector<ResultRow> rows;
  for (int t = 0; t < options.trials; ++t) {
    const std::uint64_t trial_seed = derive_seed(options.seed, static_cast<std::uint64_t>(t));
    Rng trial_rng(trial_seed);
    append_trial(rows, source, target, trial_rng, trial_seed ^ kSampleStream, options,
                 family, method, steps, t);
  }
  return rows;
}

double mean_value(const std::vector<ResultRow>& rows, const std::string& spec,
                  std::size_t n) {
  double total = 0.0;
  std::size_t count = 0;
  for (const auto& r : rows) {
    if (r.spec == spec && r.n == n) {
      total += r.value;
      ++count;
    }
  }
  if (count == 0) throw std::invalid_argument("mean_value: no rows for spec " + spec);
  return total / static_cast<double>(count);
}

ClassifyResult predict_scores(const ParticleMatrix& weights, const TestSet& test) {
  if (test.X.rows() == 0) throw std::invalid_argument("classify: empty test set");
  if (weights.rows() == 0) throw std::invalid_argument("classify: no weight samples");
  if (weights.cols() != test.X.cols()) {
    throw std::invalid_argument("classify: weight dimension does not match features");
  }
  // logits(i, s) = x_i' z_s
  const Eigen::MatrixXd logits = test.X * weights.transpose();
  ClassifyResult out;
  const double floor = 1e-300;
  for (Eigen::Index i = 0; i < test.X.rows(); ++i) {
    double p = 0.0;
    for (Eigen::Index s = 0; s < logits.cols(); ++s) p += sigmoid(logits(i, s));
    p /= static_cast<double>(logits.cols());
    const bool positive = test.y[i] > 0.5;
    if ((p > 0.5) == positive) out.accuracy += 1.0;
    out.log_likelihood += std::log(std::max(positive ? p : 1.0 - p, floor));
  }
  const auto count = static_cast<double>(test.X.rows());
  out.accuracy /= count;
  out.log_likelihood /= count;
  return out;
}

ClassifyResult classify_eval(const SampleSource& source,
                             const std::vector<FamilyDraw>& datasets, std::size_t n,
                             std::uint64_t seed) {
  if (datasets.empty()) throw std::invalid_argument("classify_eval: no datasets");
  ClassifyResult total;
  for (std::size_t k = 0; k < datasets.size(); ++k) {
    const auto& draw = datasets[k];
    if (!draw.test) throw std::invalid_argument("classify_eval: dataset without test split");
    Rng rng(derive_seed(seed, k));
    const ParticleMatrix z = source(*draw.target, n, rng);
    const ClassifyResult r = predict_scores(z, *draw.test);
    total.accuracy += r.accuracy;
    total.log_likelihood += r.log_likelihood;
  }
  total.accuracy /= static_cast<double>(datasets.size());
  total.log_likelihood /= static_cast<double>(datasets.size());
  return total;
}

}  // namespace amortized
