#pragma once

#include "secjam/scenario.hpp"

#include <iosfwd>
#include <string>
#include <vector>

namespace secjam::cli {

enum ExitCode : int {
  kOk = 0,
  kUsage = 2,          // bad flags, unknown scheme, empty value list
  kConfig = 3,         // unreadable, unparsable or invalid scenario
  kSolverFailure = 4,  // a subproblem solver gave up; partial results are still written
  kOutput = 5,         // results could not be written
};

/// Applies a horizon_s or eve_eps_m override in config-file units.
/// Throws ConfigError when the result does not validate.
Scenario with_override(Scenario s, const std::string& param, double value);

/// Entry point of the `secjam` tool; argv[0] is the program name.
int run(const std::vector<std::string>& args, std::ostream& out, std::ostream& err);

}  // namespace secjam::cli
