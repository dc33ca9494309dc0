#include "amortized/amortize.hpp"

#include <chrono>
#include <cmath>
#include <stdexcept>

#include "amortized/kernels.hpp"
#include "amortized/ksd.hpp"
#include "amortized/langevin.hpp"
#include "amortized/svgd.hpp"

namespace amortized {

std::string to_string(UpdateRule rule) {
  switch (rule) {
    case UpdateRule::Chain: return "chain";
    case UpdateRule::Full: return "full";
    case UpdateRule::Linearized: return "linearized";
    case UpdateRule::Aksd: return "aksd";
  }
  return "unknown";
}

UpdateRule parse_update_rule(const std::string& tag) {
  if (tag == "chain") return UpdateRule::Chain;
  if (tag == "full") return UpdateRule::Full;
  if (tag == "linearized") return UpdateRule::Linearized;
  if (tag == "aksd") return UpdateRule::Aksd;
  throw std::invalid_argument("unknown update rule '" + tag +
                              "' (expected chain|full|linearized|aksd)");
}

void TrainConfig::validate() const {
  if (batch < 1) throw std::invalid_argument("train: batch must be >= 1");
  if (rule == UpdateRule::Aksd && batch < 2) {
    throw std::invalid_argument("train: the aksd rule needs batch >= 2");
  }
  if (!(step > 0.0) || !std::isfinite(step)) {
    throw std::invalid_argument("train: step must be positive");
  }
  if (inner_steps < 1) throw std::invalid_argument("train: inner_steps must be >= 1");
  if (!(inner_step > 0.0)) throw std::invalid_argument("train: inner_step must be positive");
  if (!(ridge >= 0.0)) throw std::invalid_argument("train: ridge must be >= 0");
  if (!(alpha >= 0.0)) throw std::invalid_argument("train: alpha must be >= 0");
  if (iterations < 0) throw std::invalid_argument("train: iterations must be >= 0");
  if (eval_batch < 2) throw std::invalid_argument("train: eval_batch must be >= 2");
  if (eval_every < 1) throw std::invalid_argument("train: eval_every must be >= 1");
  if (optimizer == OuterOptimizer::Adam &&
      (rule == UpdateRule::Full || rule == UpdateRule::Linearized)) {
    throw std::invalid_argument("train: adam applies to the chain and aksd rules only");
  }
}

namespace {

void require_seeds(const std::vector<SeedBundle>& seeds, std::size_t minimum,
                   const char* where) {
  if (seeds.size() < minimum) {
    throw std::invalid_argument(std::string(where) + ": need at least " +
                                std::to_string(minimum) + " seeds");
  }
}

std::vector<ParticleMatrix> stein_fields(const SamplerModel& model,
                                         const TargetDensity& target,
                                         const std::vector<ExecutionTape>& tapes,
                                         double alpha, Minibatch stein_batch) {
  std::vector<ParticleMatrix> fields;
  for (int b = 0; b < model.num_blocks(); ++b) {
    fields.push_back(stein_gradient_entropy(block_outputs(tapes, b), target,
                                            std::nullopt, alpha, stein_batch));
  }
  return fields;
}

Vector aksd_direction(const SamplerModel& model, const TargetDensity& target,
                      const std::vector<ExecutionTape>& tapes) {
  std::vector<ParticleMatrix> fields;
  for (int b = 0; b < model.num_blocks(); ++b) {
    const ParticleMatrix outputs = block_outputs(tapes, b);
    const Bandwidth h = median_bandwidth(outputs);
    fields.push_back(ksd_descent_field(outputs, target, h));
  }
  return project_fields(model, tapes, fields);
}

}  // namespace

Vector update_chain(const SamplerModel& model, const TargetDensity& target,
                    const std::vector<SeedBundle>& seeds, double step,
                    double alpha, Minibatch stein_batch) {
  require_seeds(seeds, 1, "update_chain");
  const auto tapes = forward_batch(model, target, seeds);
  return model.params() + step * param_grad(model, target, tapes, alpha, stein_batch);
}

Vector update_full(const SamplerModel& model, const TargetDensity& target,
                   const std::vector<SeedBundle>& seeds, double step,
                   int inner_steps, double inner_step, double alpha,
                   Minibatch stein_batch) {
  require_seeds(seeds, 1, "update_full");
  if (inner_steps < 1) throw std::invalid_argument("update_full: inner_steps must be >= 1");
  const auto tapes = forward_batch(model, target, seeds);
  const auto phi = stein_fields(model, target, tapes, alpha, stein_batch);
  std::vector<ParticleMatrix> goals;
  for (int b = 0; b < model.num_blocks(); ++b) {
    goals.push_back(block_outputs(tapes, b) + step * phi[static_cast<std::size_t>(b)]);
  }

  auto work = model.clone();
  for (int l = 0; l < inner_steps; ++l) {
    const auto inner = l == 0 ? tapes : forward_batch(*work, target, seeds);
    std::vector<ParticleMatrix> residual;
    for (int b = 0; b < model.num_blocks(); ++b) {
      residual.push_back(goals[static_cast<std::size_t>(b)] - block_outputs(inner, b));
    }
    // The squared loss has gradient -2 sum_i J_i' (z'_i - f(xi_i)).
    const Vector next =
        work->params() + (2.0 * inner_step) * project_fields(*work, inner, residual);
    if (!next.allFinite()) throw NonFiniteError("update_full inner solve", l);
    work->set_params(next);
  }
  return work->params();
}

Eigen::MatrixXd stacked_jacobian(const SamplerModel& model,
                                 const std::vector<ExecutionTape>& tapes) {
  const Eigen::Index d = model.dim();
  const auto m = static_cast<Eigen::Index>(tapes.size());
  Eigen::MatrixXd J(model.num_blocks() * m * d, model.num_params());
  const Vector zero = Vector::Zero(d);
#pragma omp parallel for schedule(static)
  for (Eigen::Index i = 0; i < m; ++i) {
    Vector unit = zero;
    for (int b = 0; b < model.num_blocks(); ++b) {
      for (Eigen::Index k = 0; k < d; ++k) {
        unit.setZero();
        unit[k] = 1.0;
        J.row((b * m + i) * d + k) =
            model.backprop(tapes[static_cast<std::size_t>(i)], unit, b).transpose();
      }
    }
  }
  return J;
}

Vector solve_projection(const Eigen::MatrixXd& jacobian, const Vector& rhs, double ridge) {
  if (jacobian.rows() != rhs.size()) {
    throw std::invalid_argument("solve_projection: rhs length does not match Jacobian rows");
  }
  if (!(ridge >= 0.0)) throw std::invalid_argument("solve_projection: ridge must be >= 0");
  Eigen::MatrixXd normal = jacobian.transpose() * jacobian;
  normal.diagonal().array() += ridge;
  const Vector b = jacobian.transpose() * rhs;
  if (ridge == 0.0) {
    Eigen::FullPivLU<Eigen::MatrixXd> lu(normal);
    if (!lu.isInvertible()) {
      throw std::runtime_error("solve_projection: singular normal matrix with zero ridge");
    }
    return lu.solve(b);
  }
  Eigen::LDLT<Eigen::MatrixXd> ldlt(normal);
  if (ldlt.info() != Eigen::Success) {
    throw std::runtime_error("solve_projection: normal matrix factorization failed");
  }
  return ldlt.solve(b);
}

Vector update_linearized(const SamplerModel& model, const TargetDensity& target,
                         const std::vector<SeedBundle>& seeds, double step,
                         double ridge, Eigen::Index dense_cap, double alpha,
                         Minibatch stein_batch) {
  require_seeds(seeds, 1, "update_linearized");
  if (model.num_params() > dense_cap) {
    throw std::invalid_argument("update_linearized: " + std::to_string(model.num_params()) +
                                " parameters exceed the dense-solve cap of " +
                                std::to_string(dense_cap));
  }
  const auto tapes = forward_batch(model, target, seeds);
  const auto phi = stein_fields(model, target, tapes, alpha, stein_batch);
  const Eigen::MatrixXd J = stacked_jacobian(model, tapes);
  const Eigen::Index d = model.dim();
  const auto m = static_cast<Eigen::Index>(seeds.size());
  Vector rhs(J.rows());
  for (int b = 0; b < model.num_blocks(); ++b) {
    for (Eigen::Index i = 0; i < m; ++i) {
      rhs.segment((b * m + i) * d, d) = phi[static_cast<std::size_t>(b)].row(i).transpose();
    }
  }
  return model.params() + step * solve_projection(J, rhs, ridge);
}

Vector amortized_ksd_update(const SamplerModel& model, const TargetDensity& target,
                            const std::vector<SeedBundle>& seeds, double step) {
  require_seeds(seeds, 2, "amortized_ksd_update");
  const auto tapes = forward_batch(model, target, seeds);
  return step * aksd_direction(model, target, tapes);
}

// ---------------------------------------------------------------------------

TargetProvider fixed_target(TargetPtr target) {
  if (!target) throw std::invalid_argument("fixed_target: null target");
  FamilyDraw draw;
  draw.target = std::move(target);
  return [draw](Rng&) { return draw; };
}

TargetProvider family_provider(FamilySpec spec) {
  return [spec](Rng& rng) { return draw_family_params(spec, rng); };
}

double held_out_ksd(const SamplerModel& model, const TargetDensity& target,
                    std::size_t m, std::uint64_t eval_seed) {
  Rng rng(eval_seed);
  const ParticleMatrix z = draw_samples(model, target, m, rng);
  return ksd_u_statistic(z, target, median_bandwidth(z)).value;
}

namespace {

struct AdamState {
  Vector first, second;
  int t = 0;

  Vector step(const Vector& grad, double lr) {
    constexpr double beta1 = 0.9, beta2 = 0.999, eps = 1e-8;
    if (first.size() != grad.size()) {
      first = Vector::Zero(grad.size());
      second = Vector::Zero(grad.size());
    }
    ++t;
    first = beta1 * first + (1.0 - beta1) * grad;
    second = beta2 * second + (1.0 - beta2) * grad.cwiseAbs2();
    const double c1 = 1.0 - std::pow(beta1, t);
    const double c2 = 1.0 - std::pow(beta2, t);
    return lr * (first / c1).cwiseQuotient(((second / c2).cwiseSqrt().array() + eps).matrix());
  }
};

}  // namespace

TrainLog train(SamplerModel& model, const TargetProvider& provider,
               const TrainConfig& cfg) {
  cfg.validate();
  Rng rng(cfg.seed);
  const std::uint64_t eval_seed = derive_seed(cfg.seed, 0xE7A1ULL);
  const auto start = std::chrono::steady_clock::now();
  AdamState adam;
  TrainLog log;

  auto record = [&](int iteration, const FamilyDraw& draw) {
    MetricRow row;
    row.iteration = iteration;
    row.rule = cfg.rule;
    row.theta_hash = draw.theta_hash;
    row.ksd = held_out_ksd(model, *draw.target, cfg.eval_batch, eval_seed);
    if (cfg.record_time) {
      row.seconds = std::chrono::duration<double>(std::chrono::steady_clock::now() - start).count();
    }
    log.rows.push_back(row);
  };

  FamilyDraw draw = provider(rng);
  record(0, draw);
  for (int it = 1; it <= cfg.iterations; ++it) {
    if (it > 1) draw = provider(rng);
    const TargetDensity& target = *draw.target;
    const auto seeds = draw_seeds(model, target, cfg.batch, rng);

    std::vector<std::size_t> batch_idx;
    Minibatch stein_batch;
    const std::size_t N = target.num_data();
    const std::size_t M = target.minibatch_size();
    if (N > 0 && M > 0 && M < N) {
      std::uniform_int_distribution<std::size_t> pick(0, N - 1);
      batch_idx.resize(M);
      for (auto& i : batch_idx) i = pick(rng);
      stein_batch = Minibatch(batch_idx);
    }

    Vector next;
    try {
      switch (cfg.rule) {
        case UpdateRule::Chain:
        case UpdateRule::Aksd: {
          const auto tapes = forward_batch(model, target, seeds);
          const Vector dir = cfg.rule == UpdateRule::Chain
                                 ? param_grad(model, target, tapes, cfg.alpha, stein_batch)
                                 : aksd_direction(model, target, tapes);
          next = model.params() + (cfg.optimizer == OuterOptimizer::Adam
                                       ? adam.step(dir, cfg.step)
                                       : Vector(cfg.step * dir));
          break;
        }
        case UpdateRule::Full:
          next = update_full(model, target, seeds, cfg.step, cfg.inner_steps,
                             cfg.inner_step, cfg.alpha, stein_batch);
          break;
        case UpdateRule::Linearized:
          next = update_linearized(model, target, seeds, cfg.step, cfg.ridge,
                                   cfg.dense_cap, cfg.alpha, stein_batch);
          break;
      }
      if (!next.allFinite()) throw NonFiniteError("train", it);
      model.set_params(next);
    } catch (const NonFiniteError&) {
      throw NonFiniteError("train", it);
    } catch (const std::invalid_argument& e) {
      // set_params rejects step sizes whose exponent overflows.
      if (next.size() > 0 && !next.array().exp().allFinite()) throw NonFiniteError("train", it);
      throw;
    }

    if (it % cfg.eval_every == 0 || it == cfg.iterations) record(it, draw);
  }
  return log;
}

}  // namespace amortized
