#pragma once

#include <stdexcept>
#include <string>

namespace microgrid {

/// Invalid model or run configuration (parameter out of bounds, bad config key).
struct ConfigError : std::runtime_error {
  using std::runtime_error::runtime_error;
};

/// Malformed runtime input (negative wind speed, series length mismatch, bad CSV row).
struct InputError : std::runtime_error {
  using std::runtime_error::runtime_error;
};

/// Numerical failure inside a solver or root finder.
struct NumericalError : std::runtime_error {
  using std::runtime_error::runtime_error;
};

}  // namespace microgrid
