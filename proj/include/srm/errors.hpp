#pragma once

#include <stdexcept>
#include <string>

namespace srm {

/// Argument outside the mathematical domain of an operation.
class DomainError : public std::domain_error {
 public:
  using std::domain_error::domain_error;
};

/// Malformed model, scenario or configuration.
class ConfigError : public std::invalid_argument {
 public:
  using std::invalid_argument::invalid_argument;
};

/// A caller broke an operation's precondition (e.g. inadmissible action).
class ContractViolation : public std::logic_error {
 public:
  using std::logic_error::logic_error;
};

/// An exhaustive computation would exceed its configured size cap.
class CapExceeded : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

}  // namespace srm
