#pragma once

#include <cstddef>
#include <stdexcept>
#include <string>

namespace sgprm {

// Base for every recoverable, input- or problem-dependent failure. The CLI
// maps these to exit code 1.
class DomainError : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

class InvalidConfigurationError : public DomainError {
 public:
  using DomainError::DomainError;
};

class ParseError : public DomainError {
 public:
  using DomainError::DomainError;
};

class SamplingError : public DomainError {
 public:
  using DomainError::DomainError;
};

class NoPathError : public DomainError {
 public:
  NoPathError(const std::string& what, std::size_t expanded = 0)
      : DomainError(what), expanded_(expanded) {}

  std::size_t expanded() const noexcept { return expanded_; }

 private:
  std::size_t expanded_;
};

}  // namespace sgprm
