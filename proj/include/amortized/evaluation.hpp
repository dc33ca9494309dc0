#pragma once

#include <cstdint>
#include <functional>
#include <string>
#include <vector>

#include "amortized/family.hpp"
#include "amortized/moments.hpp"
#include "amortized/sampler_model.hpp"

namespace amortized {

// Draws n samples approximating the given target.
using SampleSource =
    std::function<ParticleMatrix(const TargetDensity&, std::size_t, Rng&)>;

// Wraps a sampler model. The model is copied, so later training does not
// change the source.
SampleSource model_source(const SamplerModel& model);

// Appends `steps` extra Langevin steps with the given per-step sizes
// (scalar, broadcast over coordinates) to every sample of `base`.
SampleSource refined_source(SampleSource base, std::vector<double> step_sizes);

/// One row of an MSE or classification table:
/// (family, method, T, spec, n, trial, value).
struct ResultRow {
  std::string family;
  std::string method;
  int steps = 0;
  std::string spec;
  std::size_t n = 0;
  int trial = 0;
  double value = 0.0;
};

struct MseOptions {
  std::vector<MomentKind> specs{MomentKind::Identity, MomentKind::Square,
                                MomentKind::Cosine};
  std::vector<std::size_t> sample_sizes{1000};
  int trials = 20;
  std::uint64_t seed = 1;
};

/// Per trial: draws held-out parameters, draws n samples per size, and
/// records the coordinate-averaged squared error of each moment estimate.
/// Trial t uses streams derived from (seed, t) only: parameters and COSINE
/// (w, b) are identical for every method evaluated with the same seed.
std::vector<ResultRow> mse_table(const SampleSource& source, const FamilySpec& family,
                                 const MseOptions& options, const std::string& method,
                                 int steps);

/// Same protocol on a single fixed target: held-out parameters are replaced
/// by `target`, trials differ only in the sample and COSINE draws.
std::vector<ResultRow> mse_on_target(const SampleSource& source,
                                     const TargetDensity& target,
                                     const MseOptions& options,
                                     const std::string& family,
                                     const std::string& method, int steps);

// Mean of `value` over the rows matching spec and n.
double mean_value(const std::vector<ResultRow>& rows, const std::string& spec,
                  std::size_t n);

struct ClassifyResult {
  double accuracy = 0.0;
  double log_likelihood = 0.0;  // mean per test point
};

/// Bayesian model averaging: predicts with the mean of sigmoid(x'z_i) over
/// the weight samples z_i.
ClassifyResult predict_scores(const ParticleMatrix& weights, const TestSet& test);

/// Draws n posterior samples per dataset and averages test accuracy and
/// log-likelihood over the datasets. Every draw must carry a test set.
ClassifyResult classify_eval(const SampleSource& source,
                             const std::vector<FamilyDraw>& datasets, std::size_t n,
                             std::uint64_t seed);

}  // namespace amortized
