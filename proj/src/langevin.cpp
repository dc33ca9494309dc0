#include "amortized/langevin.hpp"

#include <cmath>
#include <stdexcept>
#include <string>

#include "amortized/svgd.hpp"

namespace amortized {

LangevinSampler::LangevinSampler(int steps, Eigen::Index dim, int block_size,
                                 double init_log_step, bool scalar_step,
                                 InitDist init)
    : steps_(steps),
      dim_(dim),
      block_size_(block_size),
      scalar_step_(scalar_step),
      init_(init) {
  if (steps_ < 1) throw std::invalid_argument("LangevinSampler: steps must be >= 1");
  if (dim_ < 1) throw std::invalid_argument("LangevinSampler: dim must be >= 1");
  if (block_size_ < 1 || block_size_ > steps_) {
    throw std::invalid_argument("LangevinSampler: block size must be in [1, steps]");
  }
  if (!(init_.stddev >= 0.0)) {
    throw std::invalid_argument("LangevinSampler: init stddev must be >= 0");
  }
  log_step_ = Eigen::MatrixXd::Constant(steps_, scalar_step_ ? 1 : dim_, init_log_step);
  set_log_step(log_step_);
}

Vector LangevinSampler::params() const {
  // Row-major flattening: step t occupies [t * cols, (t + 1) * cols).
  Vector p(log_step_.size());
  const Eigen::Index cols = log_step_.cols();
  for (Eigen::Index t = 0; t < log_step_.rows(); ++t) {
    p.segment(t * cols, cols) = log_step_.row(t).transpose();
  }
  return p;
}

void LangevinSampler::set_params(const VecRef& params) {
  if (params.size() != log_step_.size()) {
    throw std::invalid_argument("LangevinSampler::set_params: wrong parameter count");
  }
  Eigen::MatrixXd next(log_step_.rows(), log_step_.cols());
  const Eigen::Index cols = log_step_.cols();
  for (Eigen::Index t = 0; t < next.rows(); ++t) {
    next.row(t) = params.segment(t * cols, cols).transpose();
  }
  set_log_step(next);
}

void LangevinSampler::set_log_step(const Eigen::MatrixXd& log_step) {
  if (log_step.rows() != steps_ || log_step.cols() != (scalar_step_ ? 1 : dim_)) {
    throw std::invalid_argument("LangevinSampler: log-step matrix has wrong shape");
  }
  if (!log_step.allFinite() || !log_step.array().exp().allFinite()) {
    throw std::invalid_argument("LangevinSampler: log step sizes must give finite steps");
  }
  log_step_ = log_step;
}

int LangevinSampler::num_blocks() const {
  return (steps_ + block_size_ - 1) / block_size_;
}

std::pair<int, int> LangevinSampler::block_range(int block) const {
  if (block < 0 || block >= num_blocks()) {
    throw std::out_of_range("LangevinSampler: block index " + std::to_string(block) +
                            " out of range");
  }
  return {block * block_size_, std::min(steps_, (block + 1) * block_size_)};
}

Vector LangevinSampler::step_size(int t) const {
  if (scalar_step_) return Vector::Constant(dim_, std::exp(log_step_(t, 0)));
  return log_step_.row(t).transpose().array().exp();
}

SeedBundle LangevinSampler::draw_seed(const TargetDensity& target, Rng& rng) const {
  SeedBundle seed;
  std::normal_distribution<double> normal(0.0, 1.0);
  seed.z0.resize(dim_);
  for (Eigen::Index j = 0; j < dim_; ++j) seed.z0[j] = init_.mean + init_.stddev * normal(rng);
  seed.xi.resize(steps_, dim_);
  for (int t = 0; t < steps_; ++t) {
    for (Eigen::Index j = 0; j < dim_; ++j) seed.xi(t, j) = normal(rng);
  }
  const std::size_t N = target.num_data();
  const std::size_t M = target.minibatch_size();
  if (N > 0 && M > 0 && M < N) {
    std::uniform_int_distribution<std::size_t> pick(0, N - 1);
    seed.minibatch.resize(static_cast<std::size_t>(steps_));
    for (auto& batch : seed.minibatch) {
      batch.resize(M);
      for (auto& idx : batch) idx = pick(rng);
    }
  }
  return seed;
}

namespace {

Minibatch step_batch(const SeedBundle& seed, int t) {
  if (seed.minibatch.empty()) return Minibatch{};
  return Minibatch(seed.minibatch[static_cast<std::size_t>(t)]);
}

void check_seed(const SeedBundle& seed, int steps, Eigen::Index dim) {
  if (seed.z0.size() != dim || seed.xi.rows() != steps || seed.xi.cols() != dim) {
    throw std::invalid_argument("LangevinSampler: seed shape does not match sampler");
  }
  if (!seed.minibatch.empty() && seed.minibatch.size() != static_cast<std::size_t>(steps)) {
    throw std::invalid_argument("LangevinSampler: need one minibatch per step");
  }
}

}  // namespace

ExecutionTape LangevinSampler::forward(const TargetDensity& target,
                                       const SeedBundle& seed) const {
  if (target.dim() != dim_) {
    throw std::invalid_argument("LangevinSampler::forward: target dimension mismatch");
  }
  check_seed(seed, steps_, dim_);
  ExecutionTape tape;
  tape.states.resize(steps_ + 1, dim_);
  tape.scores.resize(steps_, dim_);
  tape.seed = seed;
  tape.target = &target;
  for (int b = 0; b < num_blocks(); ++b) tape.block_end.push_back(block_range(b).second);

  tape.states.row(0) = seed.z0.transpose();
  for (int t = 0; t < steps_; ++t) {
    const Vector eta = step_size(t);
    const Vector z = tape.states.row(t).transpose();
    const Vector s = target.score(z, step_batch(seed, t));
    tape.scores.row(t) = s.transpose();
    const Vector next = z + eta.cwiseProduct(s) +
                        (2.0 * eta).cwiseSqrt().cwiseProduct(seed.xi.row(t).transpose());
    if (!next.allFinite()) throw NonFiniteError("LangevinSampler::forward", t);
    tape.states.row(t + 1) = next.transpose();
  }
  return tape;
}

Vector LangevinSampler::sample(const TargetDensity& target, const SeedBundle& seed) const {
  if (target.dim() != dim_) {
    throw std::invalid_argument("LangevinSampler::sample: target dimension mismatch");
  }
  check_seed(seed, steps_, dim_);
  Vector z = seed.z0;
  for (int t = 0; t < steps_; ++t) {
    const Vector eta = step_size(t);
    const Vector s = target.score(z, step_batch(seed, t));
    // Same association as forward() so both paths agree bit for bit.
    z = z + eta.cwiseProduct(s) +
        (2.0 * eta).cwiseSqrt().cwiseProduct(seed.xi.row(t).transpose());
    if (!z.allFinite()) throw NonFiniteError("LangevinSampler::sample", t);
  }
  return z;
}

Vector LangevinSampler::backprop(const ExecutionTape& tape, const VecRef& upstream,
                                 int block) const {
  const auto [first, last] = block_range(block);
  if (upstream.size() != dim_) {
    throw std::invalid_argument("LangevinSampler::backprop: upstream has wrong size");
  }
  if (tape.target == nullptr || tape.states.rows() != steps_ + 1) {
    throw std::invalid_argument("LangevinSampler::backprop: tape does not match sampler");
  }
  const Eigen::Index cols = log_step_.cols();
  Vector grad = Vector::Zero(log_step_.size());
  Vector adjoint = upstream;  // d out / d z^{t+1}
  for (int t = last - 1; t >= first; --t) {
    const Vector eta = step_size(t);
    // d z^{t+1} / d lambda^t = eta * s(z^t) + 0.5 * sqrt(2 eta) * xi^t
    const Vector local = eta.cwiseProduct(tape.scores.row(t).transpose()) +
                         0.5 * (2.0 * eta).cwiseSqrt().cwiseProduct(
                                   tape.seed.xi.row(t).transpose());
    const Vector g = local.cwiseProduct(adjoint);
    if (scalar_step_) {
      grad[t] = g.sum();
    } else {
      grad.segment(t * cols, cols) = g;
    }
    if (t > first) {
      // (I + diag(eta) H)^T a = a + H (eta * a), H symmetric.
      adjoint += tape.target->score_jvp(tape.states.row(t).transpose(),
                                        eta.cwiseProduct(adjoint),
                                        step_batch(tape.seed, t));
    }
  }
  return grad;
}

Vector param_grad(const SamplerModel& model, const TargetDensity& target,
                  const std::vector<ExecutionTape>& tapes, double alpha,
                  Minibatch stein_batch) {
  if (tapes.empty()) throw std::invalid_argument("param_grad: need m >= 1 tapes");
  std::vector<ParticleMatrix> fields;
  fields.reserve(static_cast<std::size_t>(model.num_blocks()));
  for (int b = 0; b < model.num_blocks(); ++b) {
    fields.push_back(stein_gradient_entropy(block_outputs(tapes, b), target,
                                            std::nullopt, alpha, stein_batch));
  }
  return project_fields(model, tapes, fields);
}

}  // namespace amortized
