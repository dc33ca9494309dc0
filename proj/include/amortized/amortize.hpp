#pragma once

#include <cstdint>
#include <functional>
#include <memory>
#include <string>
#include <vector>

#include "amortized/family.hpp"
#include "amortized/sampler_model.hpp"

namespace amortized {

enum class UpdateRule { Chain, Full, Linearized, Aksd };

std::string to_string(UpdateRule rule);
UpdateRule parse_update_rule(const std::string& tag);  // chain|full|linearized|aksd

enum class OuterOptimizer { Sgd, Adam };

struct TrainConfig {
  std::size_t batch = 100;        // m
  double step = 1e-3;             // outer step epsilon
  UpdateRule rule = UpdateRule::Chain;
  int inner_steps = 1;            // L, FULL only
  double inner_step = 0.5;        // gamma, FULL only
  double ridge = 1e-6;            // LINEARIZED only
  Eigen::Index dense_cap = 2000;  // LINEARIZED parameter-count cap
  double alpha = 0.0;             // entropy weight on the repulsive term
  OuterOptimizer optimizer = OuterOptimizer::Sgd;
  int iterations = 1000;
  std::uint64_t seed = 1;
  std::size_t eval_batch = 100;   // held-out seeds for the KSD monitor
  int eval_every = 10;
  bool record_time = false;       // wall-clock column; off keeps logs reproducible

  void validate() const;
};

// ---------------------------------------------------------------------------
// Single-batch update rules. Seeds are fixed for the whole update.

/// eta + eps * sum_i d_eta f(xi_i) phi(z_i), blockwise for layered samplers.
Vector update_chain(const SamplerModel& model, const TargetDensity& target,
                    const std::vector<SeedBundle>& seeds, double step,
                    double alpha = 0.0, Minibatch stein_batch = {});

/// Freezes z'_i = z_i + eps * phi(z_i) and runs inner_steps gradient steps
/// of size inner_step on sum_i ||f(xi_i; eta) - z'_i||^2 from the current eta.
Vector update_full(const SamplerModel& model, const TargetDensity& target,
                   const std::vector<SeedBundle>& seeds, double step,
                   int inner_steps, double inner_step, double alpha = 0.0,
                   Minibatch stein_batch = {});

/// eta + eps * delta with delta = argmin sum_i ||J_i delta - phi(z_i)||^2 + ridge ||delta||^2.
Vector update_linearized(const SamplerModel& model, const TargetDensity& target,
                         const std::vector<SeedBundle>& seeds, double step,
                         double ridge, Eigen::Index dense_cap = 2000,
                         double alpha = 0.0, Minibatch stein_batch = {});

/// Ridge-regularized least squares (J'J + ridge I) delta = J' rhs via the
/// normal equations. Throws if ridge == 0 and J'J is singular.
Vector solve_projection(const Eigen::MatrixXd& jacobian, const Vector& rhs, double ridge);

/// Stacked Jacobian rows d_eta f for every block, seed and output coordinate,
/// in (block, seed, coordinate) order.
Eigen::MatrixXd stacked_jacobian(const SamplerModel& model,
                                 const std::vector<ExecutionTape>& tapes);

/// Parameter increment of amortized KSD descent:
///   -eps * 2/(m(m-1)) sum_{i != j} J_i' grad_{z_i} kappa_p(z_i, z_j),
/// with the median bandwidth computed once per block and held fixed.
Vector amortized_ksd_update(const SamplerModel& model, const TargetDensity& target,
                            const std::vector<SeedBundle>& seeds, double step);

// ---------------------------------------------------------------------------
// Training loops

using TargetProvider = std::function<FamilyDraw(Rng&)>;

TargetProvider fixed_target(TargetPtr target);
TargetProvider family_provider(FamilySpec spec);

struct MetricRow {
  int iteration = 0;
  UpdateRule rule = UpdateRule::Chain;
  double ksd = 0.0;
  double seconds = 0.0;
  std::uint64_t theta_hash = 0;
};

struct TrainLog {
  std::vector<MetricRow> rows;
};

/// Runs cfg.iterations updates. Each iteration draws a target from the
/// provider (a fresh family member, or the same fixed target) and a fresh
/// seed batch, then applies cfg.rule. Every eval_every iterations, and at
/// iteration 0 and the last iteration, logs the U-statistic KSD of outputs
/// from a fixed evaluation seed stream. Deterministic in cfg.seed.
TrainLog train(SamplerModel& model, const TargetProvider& provider,
               const TrainConfig& cfg);

// Held-out KSD of m sampler outputs from a seed stream fixed by eval_seed.
double held_out_ksd(const SamplerModel& model, const TargetDensity& target,
                    std::size_t m, std::uint64_t eval_seed);

}  // namespace amortized
