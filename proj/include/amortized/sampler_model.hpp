#pragma once

#include <cstddef>
#include <memory>
#include <vector>

#include "amortized/target.hpp"

namespace amortized {

/// Random inputs of one sampler evaluation. For the Langevin network these
/// are the initial state, the per-step Gaussian noise and, for targets with
/// data, the per-step minibatch indices. The affine sampler uses z0 as its
/// standard-normal input and ignores the rest.
struct SeedBundle {
  Vector z0;
  ParticleMatrix xi;                                // steps x d
  std::vector<std::vector<std::size_t>> minibatch;  // per step; empty = exact
};

/// Everything the reverse pass needs from one forward evaluation.
/// states.row(0) is the input and states.row(block_end[b]) is the output of
/// block b; the last block's output is the sampler output. The target is not
/// owned and must outlive the tape.
struct ExecutionTape {
  ParticleMatrix states;
  ParticleMatrix scores;
  SeedBundle seed;
  std::vector<int> block_end;
  const TargetDensity* target = nullptr;

  int num_blocks() const { return static_cast<int>(block_end.size()); }
  auto block_output(int b) const { return states.row(block_end.at(b)); }
  auto output() const { return states.row(block_end.back()); }
};

/// A simulator z = f(xi; eta) with parameters eta and random seed xi,
/// differentiable in eta through a recorded tape.
class SamplerModel {
 public:
  virtual ~SamplerModel() = default;
  virtual std::unique_ptr<SamplerModel> clone() const = 0;

  virtual Eigen::Index dim() const = 0;
  virtual Eigen::Index num_params() const = 0;
  virtual Vector params() const = 0;
  virtual void set_params(const VecRef& params) = 0;
  virtual int num_blocks() const = 0;

  virtual SeedBundle draw_seed(const TargetDensity& target, Rng& rng) const = 0;

  // Deterministic in (params, seed). Throws NonFiniteError on overflow.
  virtual ExecutionTape forward(const TargetDensity& target,
                                const SeedBundle& seed) const = 0;

  /// J_b^T upstream, where J_b is the Jacobian of block b's output with
  /// respect to the parameters of block b only. Returns a full-length
  /// parameter vector that is zero outside block b.
  virtual Vector backprop(const ExecutionTape& tape, const VecRef& upstream,
                          int block) const = 0;

  // Sampler output only, without recording a tape.
  virtual Vector sample(const TargetDensity& target, const SeedBundle& seed) const;
};

std::vector<SeedBundle> draw_seeds(const SamplerModel& model,
                                   const TargetDensity& target, std::size_t m,
                                   Rng& rng);

// One tape per seed, evaluated in parallel.
std::vector<ExecutionTape> forward_batch(const SamplerModel& model,
                                         const TargetDensity& target,
                                         const std::vector<SeedBundle>& seeds);

ParticleMatrix block_outputs(const std::vector<ExecutionTape>& tapes, int block);

/// sum_b sum_i J_{b,i}^T fields[b].row(i): projects per-block particle
/// velocity fields onto the parameters. Per-seed products run in parallel and
/// are summed in seed order.
Vector project_fields(const SamplerModel& model,
                      const std::vector<ExecutionTape>& tapes,
                      const std::vector<ParticleMatrix>& fields);

/// n independent sampler outputs. Seed i is drawn from a stream derived from
/// one value taken from rng, so the result does not depend on thread count.
ParticleMatrix draw_samples(const SamplerModel& model, const TargetDensity& target,
                            std::size_t n, Rng& rng);

}  // namespace amortized
