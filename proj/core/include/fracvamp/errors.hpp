#pragma once

#include <stdexcept>
#include <string>

namespace fracvamp {

// Invalid user-supplied configuration (bad flag values, inconsistent sizes).
struct ConfigError : std::invalid_argument {
  using std::invalid_argument::invalid_argument;
};

// Numerical breakdown during iteration; carries the iteration index when known.
struct NumericError : std::runtime_error {
  explicit NumericError(const std::string& msg, int iteration = -1)
      : std::runtime_error(msg), iteration(iteration) {}
  int iteration;
};

struct IoError : std::runtime_error {
  using std::runtime_error::runtime_error;
};

}  // namespace fracvamp
