#pragma once

#include <cstdint>
#include <optional>
#include <stdexcept>
#include <string>
#include <vector>

#include "amortized/amortize.hpp"
#include "amortized/baselines.hpp"
#include "amortized/evaluation.hpp"
#include "amortized/family.hpp"
#include "amortized/langevin.hpp"
#include "amortized/svgd.hpp"

namespace amortized {

// Raised for anything wrong with the run configuration; maps to exit code 2.
class ConfigError : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

struct SamplerConfig {
  int steps = 15;
  int block_size = 5;
  double init_log_step = -6.907755278982137;  // log(1e-3)
  bool scalar_step = false;
  InitDist init{};
};

// Optional real dataset replacing the synthetic logistic-regression family.
struct LibsvmSource {
  std::string train;
  std::string test;
};

struct EvalConfig {
  std::optional<std::string> checkpoint;          // trained sampler to evaluate
  std::optional<PowerDecaySchedule> schedule;     // or a fixed power-decay chain
  MseOptions mse{};                               // seed is derived from the root seed
  int datasets = 8;                               // held-out logistic-regression draws
  std::size_t samples = 1000;                     // posterior samples per dataset
  int refine_steps = 0;
  PowerDecaySchedule refine{-3, 1, 0.55, 0};      // steps is taken from refine_steps
};

struct SvgdDemoConfig {
  std::size_t particles = 100;
  SvgdOptions options{};
  std::vector<int> snapshots{};  // iterations to dump; the final state is always written
  InitDist init{};
};

struct RunConfig {
  std::uint64_t seed = 1;
  std::string out = "out";
  FamilySpec family = GmmFamily{};
  std::optional<LibsvmSource> libsvm;
  SamplerConfig sampler{};
  TrainConfig train{};
  EvalConfig eval{};
  GridOptions baseline{};
  SvgdDemoConfig svgd{};

  // Range checks across sections; throws ConfigError.
  void validate() const;
};

/// Parses a JSON document. Every key is optional and falls back to the
/// defaults above; unknown keys and mistyped values throw ConfigError.
RunConfig parse_config(const std::string& text);
RunConfig load_config(const std::string& path);

// Fully resolved form, accepted back by parse_config.
std::string config_to_json(const RunConfig& cfg);

}  // namespace amortized
