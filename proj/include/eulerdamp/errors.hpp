#pragma once

#include <stdexcept>
#include <string>

namespace eulerdamp {

// Invalid physical input (vacuum density, out-of-range transform argument).
class DomainError : public std::domain_error {
 public:
  explicit DomainError(const std::string& what) : std::domain_error(what) {}
};

// Bad or inconsistent run configuration.
class ConfigError : public std::runtime_error {
 public:
  explicit ConfigError(const std::string& what) : std::runtime_error(what) {}
};

// Numerical failure inside a computation (non-finite state, lost coverage).
class NumericalError : public std::runtime_error {
 public:
  explicit NumericalError(const std::string& what) : std::runtime_error(what) {}
};

}  // namespace eulerdamp
