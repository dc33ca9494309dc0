#pragma once

#include <ostream>
#include <string>
#include <vector>

#include "amortized/amortize.hpp"
#include "amortized/evaluation.hpp"

namespace amortized {

// "%.17g": enough digits to round-trip any double.
std::string format_double(double value);

// Header z0,...,z{d-1}; one row per particle.
void write_particles_csv(std::ostream& out, const ParticleMatrix& particles);

// iteration,rule,ksd_u,seconds,theta_hash
void write_metrics_csv(std::ostream& out, const TrainLog& log);

// family,method,T,spec,n,trial,value
void write_results_csv(std::ostream& out, const std::vector<ResultRow>& rows);

// Opens `path` in binary mode (so '\n' stays LF) and hands the stream to `write`.
template <typename Writer>
void write_file(const std::string& path, Writer&& write);

}  // namespace amortized

#include <fstream>
#include <stdexcept>

namespace amortized {

template <typename Writer>
void write_file(const std::string& path, Writer&& write) {
  std::ofstream out(path, std::ios::binary | std::ios::trunc);
  if (!out) throw std::runtime_error("cannot open '" + path + "' for writing");
  write(out);
  out.flush();
  if (!out) throw std::runtime_error("write to '" + path + "' failed");
}

}  // namespace amortized
