#pragma once

#include <stdexcept>
#include <string>

namespace funcito {

// Bad argument to a path/functional operation (negative h, horizon overrun, ...).
class DomainError : public std::invalid_argument {
 public:
  explicit DomainError(const std::string& what) : std::invalid_argument(what) {}
};

// A standing model assumption was violated during simulation (e.g. singular sigma).
class SimulationError : public std::runtime_error {
 public:
  explicit SimulationError(const std::string& what) : std::runtime_error(what) {}
};

// A caller broke an API contract (missing analytic jet, too few quadrature nodes, ...).
class ContractError : public std::logic_error {
 public:
  explicit ContractError(const std::string& what) : std::logic_error(what) {}
};

// Malformed experiment spec, unknown functional id, unwritable output, ...
class ConfigError : public std::runtime_error {
 public:
  explicit ConfigError(const std::string& what) : std::runtime_error(what) {}
};

}  // namespace funcito
