#pragma once

#include <cstdint>
#include <limits>
#include <vector>

#include "amortized/evaluation.hpp"
#include "amortized/langevin.hpp"

namespace amortized {

/// 10^a / (t + b)^gamma. Throws std::domain_error when t + b <= 0.
double power_decay_step(int a, int b, double gamma, int t);

struct PowerDecaySchedule {
  int a = 0;
  int b = 1;
  double gamma = 0.55;
  int steps = 15;

  bool valid() const;  // t + b > 0 for every t in [0, steps)
  std::vector<double> step_sizes() const;
};

// Plain Langevin sampler (scalar step per layer, one block) following the schedule.
LangevinSampler schedule_sampler(const PowerDecaySchedule& schedule, Eigen::Index dim,
                                 InitDist init = {});

struct GridOptions {
  int a_min = -6, a_max = 2;
  int b_min = 0, b_max = 9;
  double gamma = 0.55;
  int train_draws = 10;
  std::size_t samples = 1000;
  std::uint64_t seed = 1;
  InitDist init = {};
};

struct GridCell {
  int a = 0;
  int b = 0;
  double score = std::numeric_limits<double>::infinity();
  bool valid = false;     // schedule defined at every step
  bool diverged = false;  // produced non-finite states
};

struct GridResult {
  int best_a = 0;
  int best_b = 0;
  double best_score = 0.0;
  std::vector<GridCell> cells;  // row-major over (a, b)
};

/// Scores each valid (a, b) on train_draws family members: the mean of the
/// IDENTITY and SQUARE moment MSEs for families with exact moments, and
/// 1 - mean test accuracy for logistic regression. Lower is better; ties
/// go to the smaller a, then the smaller b. All cells share the same family
/// draws and sample streams. Throws if no cell is usable.
GridResult grid_search_baseline(const FamilySpec& family, int steps,
                                const GridOptions& options);

}  // namespace amortized
