#pragma once

#include <stdexcept>

namespace psfcal {

// Physically meaningless input, e.g. focusing at or inside the focal length.
class DomainError : public std::domain_error {
 public:
  using std::domain_error::domain_error;
};

// A required optional lens field is missing or a config value is out of range.
class ConfigError : public std::invalid_argument {
 public:
  using std::invalid_argument::invalid_argument;
};

// Caller broke a precondition (mismatched dimensions, even kernel size, ...).
class ContractViolation : public std::invalid_argument {
 public:
  using std::invalid_argument::invalid_argument;
};

class IoError : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

// Every cell of a search grid was infeasible.
class InfeasibleError : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

}  // namespace psfcal
