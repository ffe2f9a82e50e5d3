#pragma once

#include <stdexcept>
#include <string>

// Error taxonomy used by the CLI for exit codes: validation failures
// (bad flags, malformed configs or containers) exit with 2, numerical
// failures (divergence, non-convergence, non-finite data) with 3.

namespace pcf {

struct validation_error : std::runtime_error {
  explicit validation_error(const std::string& msg) : std::runtime_error(msg) {}
};

struct numerical_error : std::runtime_error {
  explicit numerical_error(const std::string& msg) : std::runtime_error(msg) {}
};

}  // namespace pcf
