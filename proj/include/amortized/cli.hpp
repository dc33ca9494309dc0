#pragma once

#include <iosfwd>
#include <string>
#include <vector>

namespace amortized {

inline constexpr int kExitOk = 0;
inline constexpr int kExitRuntime = 1;
inline constexpr int kExitConfig = 2;

/// Entry point of the amortized-sampler tool. `args` excludes the program
/// name; the first element is the subcommand (svgd-demo, train, eval,
/// baseline or inspect). Returns 0 on success, 2 on a configuration or
/// usage error, 1 on any failure during the run.
int run_command(const std::vector<std::string>& args, std::ostream& out, std::ostream& err);

}  // namespace amortized
