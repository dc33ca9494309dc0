#include "amortized/sampler_model.hpp"

#include <stdexcept>

namespace amortized {

Vector SamplerModel::sample(const TargetDensity& target, const SeedBundle& seed) const {
  return forward(target, seed).output().transpose();
}

std::vector<SeedBundle> draw_seeds(const SamplerModel& model,
                                   const TargetDensity& target, std::size_t m,
                                   Rng& rng) {
  std::vector<SeedBundle> seeds;
  seeds.reserve(m);
  for (std::size_t i = 0; i < m; ++i) seeds.push_back(model.draw_seed(target, rng));
  return seeds;
}

std::vector<ExecutionTape> forward_batch(const SamplerModel& model,
                                         const TargetDensity& target,
                                         const std::vector<SeedBundle>& seeds) {
  std::vector<ExecutionTape> tapes(seeds.size());
  const auto m = static_cast<long>(seeds.size());
  // Exceptions must not escape an OpenMP region; rethrow the first after it.
  std::exception_ptr failure;
#pragma omp parallel for schedule(static)
  for (long i = 0; i < m; ++i) {
    try {
      tapes[static_cast<std::size_t>(i)] =
          model.forward(target, seeds[static_cast<std::size_t>(i)]);
    } catch (...) {
#pragma omp critical(forward_batch_failure)
      if (!failure) failure = std::current_exception();
    }
  }
  if (failure) std::rethrow_exception(failure);
  return tapes;
}

ParticleMatrix block_outputs(const std::vector<ExecutionTape>& tapes, int block) {
  if (tapes.empty()) throw std::invalid_argument("block_outputs: empty batch");
  ParticleMatrix out(static_cast<Eigen::Index>(tapes.size()), tapes.front().states.cols());
  for (std::size_t i = 0; i < tapes.size(); ++i) {
    out.row(static_cast<Eigen::Index>(i)) = tapes[i].block_output(block);
  }
  return out;
}

Vector project_fields(const SamplerModel& model,
                      const std::vector<ExecutionTape>& tapes,
                      const std::vector<ParticleMatrix>& fields) {
  if (static_cast<int>(fields.size()) != model.num_blocks()) {
    throw std::invalid_argument("project_fields: need one field per block");
  }
  const auto m = static_cast<long>(tapes.size());
  std::vector<Vector> per_seed(tapes.size(), Vector::Zero(model.num_params()));
#pragma omp parallel for schedule(static)
  for (long i = 0; i < m; ++i) {
    const auto& tape = tapes[static_cast<std::size_t>(i)];
    Vector& acc = per_seed[static_cast<std::size_t>(i)];
    for (int b = 0; b < model.num_blocks(); ++b) {
      acc += model.backprop(tape, fields[static_cast<std::size_t>(b)].row(i).transpose(), b);
    }
  }
  Vector total = Vector::Zero(model.num_params());
  for (const auto& g : per_seed) total += g;
  return total;
}

ParticleMatrix draw_samples(const SamplerModel& model, const TargetDensity& target,
                            std::size_t n, Rng& rng) {
  const std::uint64_t base = rng();
  ParticleMatrix out(static_cast<Eigen::Index>(n), model.dim());
  std::exception_ptr failure;
#pragma omp parallel for schedule(static)
  for (long i = 0; i < static_cast<long>(n); ++i) {
    try {
      Rng local(derive_seed(base, static_cast<std::uint64_t>(i)));
      const SeedBundle seed = model.draw_seed(target, local);
      out.row(i) = model.sample(target, seed).transpose();
    } catch (...) {
#pragma omp critical(draw_samples_failure)
      if (!failure) failure = std::current_exception();
    }
  }
  if (failure) std::rethrow_exception(failure);
  return out;
}

}  // namespace amortized
