#pragma once

#include <stdexcept>
#include <string>

namespace relbelief {

// Violated precondition or an operation undefined on its inputs
// (zero-probability events, psi0 off the grid, unusable cells).
class DomainError : public std::domain_error {
 public:
  using std::domain_error::domain_error;
};

// Malformed or inconsistent run configuration.
class ConfigError : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

}  // namespace relbelief
