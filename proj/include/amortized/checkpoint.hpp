#pragma once

#include <string>

#include "amortized/langevin.hpp"

namespace amortized {

inline constexpr int kCheckpointFormatVersion = 1;

class CheckpointError : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

/// JSON record {format_version, model, steps, dim, block_size, scalar_step,
/// init, log_step}. Doubles are written in shortest round-trip form, so
/// save followed by load reproduces log_step bit for bit.
std::string checkpoint_to_json(const LangevinSampler& sampler);
LangevinSampler checkpoint_from_json(const std::string& text);

void save_checkpoint(const std::string& path, const LangevinSampler& sampler);
// Throws CheckpointError on a missing field, wrong shape or unknown format_version.
LangevinSampler load_checkpoint(const std::string& path);

}  // namespace amortized
