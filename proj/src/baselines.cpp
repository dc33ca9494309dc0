#include "amortized/baselines.hpp"

#include <cmath>
#include <stdexcept>
#include <string>

namespace amortized {

double power_decay_step(int a, int b, double gamma, int t) {
  if (t < 0) throw std::domain_error("power_decay_step: t must be >= 0");
  if (t + b <= 0) {
    throw std::domain_error("power_decay_step: t + b must be positive (t=" +
                            std::to_string(t) + ", b=" + std::to_string(b) + ")");
  }
  return std::pow(10.0, a) / std::pow(static_cast<double>(t + b), gamma);
}

bool PowerDecaySchedule::valid() const { return steps >= 1 && b > 0; }

std::vector<double> PowerDecaySchedule::step_sizes() const {
  std::vector<double> eta;
  for (int t = 0; t < steps; ++t) eta.push_back(power_decay_step(a, b, gamma, t));
  return eta;
}

LangevinSampler schedule_sampler(const PowerDecaySchedule& schedule, Eigen::Index dim,
                                 InitDist init) {
  if (!schedule.valid()) throw std::domain_error("schedule_sampler: invalid schedule");
  LangevinSampler sampler(schedule.steps, dim, schedule.steps, 0.0, /*scalar_step=*/true, init);
  const auto eta = schedule.step_sizes();
  Eigen::MatrixXd log_step(schedule.steps, 1);
  for (int t = 0; t < schedule.steps; ++t) log_step(t, 0) = std::log(eta[static_cast<std::size_t>(t)]);
  sampler.set_log_step(log_step);
  return sampler;
}

GridResult grid_search_baseline(const FamilySpec& family, int steps,
                                const GridOptions& options) {
  if (options.a_min > options.a_max || options.b_min > options.b_max) {
    throw std::invalid_argument("grid_search_baseline: empty grid");
  }
  if (options.train_draws < 1 || options.samples < 1) {
    throw std::invalid_argument("grid_search_baseline: need draws and samples >= 1");
  }
  const bool classification = std::holds_alternative<LogRegFamily>(family);
  const Eigen::Index dim = family_dim(family);

  std::vector<FamilyDraw> draws;
  {
    Rng rng(options.seed);
    for (int k = 0; k < options.train_draws; ++k) draws.push_back(draw_family_params(family, rng));
  }
  std::vector<std::vector<MomentSpec>> spec_sets;
  std::vector<std::vector<Vector>> exact;
  if (!classification) {
    for (const auto& draw : draws) {
      spec_sets.push_back({{MomentKind::Identity}, {MomentKind::Square}});
      exact.push_back({});
      for (const auto& spec : spec_sets.back()) {
        exact.back().push_back(exact_moments(*draw.target, spec));
      }
    }
  }

  GridResult result;
  bool found = false;
  for (int a = options.a_min; a <= options.a_max; ++a) {
    for (int b = options.b_min; b <= options.b_max; ++b) {
      GridCell cell{a, b};
      const PowerDecaySchedule schedule{a, b, options.gamma, steps};
      cell.valid = schedule.valid();
      if (cell.valid) {
        try {
          const LangevinSampler sampler = schedule_sampler(schedule, dim, options.init);
          double total = 0.0;
          for (std::size_t k = 0; k < draws.size(); ++k) {
            Rng rng(derive_seed(options.seed ^ 0x6A1DULL, k));
            const ParticleMatrix z = draw_samples(sampler, *draws[k].target, options.samples, rng);
            if (classification) {
              total += 1.0 - predict_scores(z, *draws[k].test).accuracy;
            } else {
              double mse = 0.0;
              for (std::size_t s = 0; s < spec_sets[k].size(); ++s) {
                mse += moment_mse(z, exact[k][s], spec_sets[k][s]);
              }
              total += mse / static_cast<double>(spec_sets[k].size());
            }
          }
          cell.score = total / static_cast<double>(draws.size());
          if (!std::isfinite(cell.score)) cell.diverged = true;
        } catch (const NonFiniteError&) {
          cell.diverged = true;
        }
      }
      if (cell.valid && !cell.diverged && (!found || cell.score < result.best_score)) {
        // Strict improvement keeps the earliest (smallest a, then b) on ties.
        found = true;
        result.best_a = a;
        result.best_b = b;
        result.best_score = cell.score;
      }
      result.cells.push_back(cell);
    }
  }
  if (!found) throw std::runtime_error("grid_search_baseline: every grid cell is invalid");
  return result;
}

}  // namespace amortized
