#pragma once

#include <cstdint>
#include <string>

#include "pcf/torus.hpp"

// Flat key = value run configuration shared by the CLI subcommands.
// '#' starts a comment; blank lines are skipped; keys may appear once.
// Unknown keys are rejected with the offending line number.

namespace pcf {

struct RunConfig {
  int n = 128;
  double mu = 1.0;
  std::uint64_t seed = 1;
  double eps = 0.0;
  double kappa = 0.1;   // Wick-area distance exponent window (0, 1 - alpha)
  double alpha = 0.8;   // working regularity, window (2/3, 1)
  double dealias_fraction = 2.0 / 3.0;
  double tol = 1e-8;
  int max_iter = 5000;
  double grad_coeff = 2.0;
  std::string nonlinearity = "zero";
};

RunConfig parse_config_text(const std::string& text);
RunConfig load_config(const std::string& path);

// range checks: n power of two >= 8, mu > 0, eps >= 0, alpha in (2/3, 1),
// kappa in (0, 1 - alpha), tol > 0, max_iter >= 1
void validate_config(const RunConfig& rc);

GridSpec grid_of(const RunConfig& rc);

}  // namespace pcf
