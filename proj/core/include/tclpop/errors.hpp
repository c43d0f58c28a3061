#pragma once

#include <stdexcept>
#include <string>

namespace tclpop {

/// Invalid parameters or scenario files.
class ConfigError : public std::invalid_argument {
public:
  explicit ConfigError(const std::string& what) : std::invalid_argument(what) {}
};

/// Argument outside the domain of a mathematical function.
class DomainError : public std::domain_error {
public:
  explicit DomainError(const std::string& what) : std::domain_error(what) {}
};

/// A state invariant was found broken at runtime (e.g. a unit escaped [x_L, x_H]).
class IntegrityError : public std::runtime_error {
public:
  explicit IntegrityError(const std::string& what) : std::runtime_error(what) {}
};

/// Explicit time step larger than the scheme's stability bound.
class StepSizeError : public std::runtime_error {
public:
  explicit StepSizeError(const std::string& what) : std::runtime_error(what) {}
};

}  // namespace tclpop
