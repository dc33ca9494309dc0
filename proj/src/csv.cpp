#include "amortized/csv.hpp"

#include <cstdio>

namespace amortized {

std::string format_double(double value) {
  char buf[32];
  const int len = std::snprintf(buf, sizeof buf, "%.17g", value);
  return std::string(buf, static_cast<std::size_t>(len));
}

void write_particles_csv(std::ostream& out, const ParticleMatrix& particles) {
  for (Eigen::Index j = 0; j < particles.cols(); ++j) {
    out << (j ? ",z" : "z") << j;
  }
  out << '\n';
  for (Eigen::Index i = 0; i < particles.rows(); ++i) {
    for (Eigen::Index j = 0; j < particles.cols(); ++j) {
      if (j) out << ',';
      out << format_double(particles(i, j));
    }
    out << '\n';
  }
}

void write_metrics_csv(std::ostream& out, const TrainLog& log) {
  out << "iteration,rule,ksd_u,seconds,theta_hash\n";
  for (const auto& row : log.rows) {
    out << row.iteration << ',' << to_string(row.rule) << ',' << format_double(row.ksd) << ','
        << format_double(row.seconds) << ',' << row.theta_hash << '\n';
  }
}

void write_results_csv(std::ostream& out, const std::vector<ResultRow>& rows) {
  out << "family,method,T,spec,n,trial,value\n";
  for (const auto& r : rows) {
    out << r.family << ',' << r.method << ',' << r.steps << ',' << r.spec << ',' << r.n << ','
        << r.trial << ',' << format_double(r.value) << '\n';
  }
}

}  // namespace amortized
