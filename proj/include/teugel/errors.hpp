#pragma once

#include <stdexcept>
#include <string>

namespace teugel {

/// Invalid configuration or rejected input. CLI maps this to exit code 2.
class ConfigError : public std::invalid_argument {
public:
  using std::invalid_argument::invalid_argument;
};

/// Numerical failure inside a solver. CLI maps this to exit code 3.
class NumericalError : public std::runtime_error {
public:
  using std::runtime_error::runtime_error;
};

}  // namespace teugel
