#pragma once

#include <stdexcept>
#include <string>

namespace driftlab {

/// Bad user-facing input: unknown keys, out-of-range parameters, domain or
/// preset combinations the lab does not support. Maps to CLI exit code 3.
class ConfigError : public std::runtime_error {
 public:
  explicit ConfigError(const std::string& what) : std::runtime_error(what) {}
};

/// Broken API precondition (mismatched lengths, invalid indices). These are
/// programming errors, not user errors.
class ContractViolation : public std::logic_error {
 public:
  explicit ContractViolation(const std::string& what) : std::logic_error(what) {}
};

/// Runtime numerical failure: NaN in an iterate, singular pivot, divergence.
class NumericalError : public std::runtime_error {
 public:
  explicit NumericalError(const std::string& what) : std::runtime_error(what) {}
};

/// Filesystem trouble while reading configs or writing outputs. Maps to CLI
/// exit code 4.
class IoError : public std::runtime_error {
 public:
  explicit IoError(const std::string& what) : std::runtime_error(what) {}
};

}  // namespace driftlab
