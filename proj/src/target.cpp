#include "amortized/target.hpp"

#include <stdexcept>
#include <string>

namespace amortized {

Vector TargetDensity::score_jvp(const VecRef& z, const VecRef& v,
                                Minibatch batch) const {
  return score_jvp_fd(z, v, batch);
}

Vector TargetDensity::score_jvp_fd(const VecRef& z, const VecRef& v,
                                   Minibatch batch, double rel_step) const {
  check_dim(z, "score_jvp_fd");
  check_dim(v, "score_jvp_fd");
  const double vnorm = v.norm();
  if (vnorm == 0.0) return Vector::Zero(z.size());
  const double eps = rel_step * (1.0 + z.lpNorm<Eigen::Infinity>());
  const Vector dir = v / vnorm;
  const Vector plus = score(z + eps * dir, batch);
  const Vector minus = score(z - eps * dir, batch);
  return (plus - minus) * (vnorm / (2.0 * eps));
}

void TargetDensity::check_dim(const VecRef& z, const char* where) const {
  if (z.size() != dim()) {
    throw std::invalid_argument(std::string(where) + ": expected dimension " +
                                std::to_string(dim()) + ", got " +
                                std::to_string(z.size()));
  }
}

}  // namespace amortized
