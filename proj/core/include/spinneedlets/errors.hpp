#pragma once

#include <stdexcept>
#include <string>

namespace spinneedlets {

// Argument outside the mathematical domain of a function (bad index, pole, ...).
class DomainError : public std::domain_error {
 public:
  using std::domain_error::domain_error;
};

// Inconsistent construction parameters (bandwidth <= 1, flavor/spin clash, ...).
class ConfigError : public std::invalid_argument {
 public:
  using std::invalid_argument::invalid_argument;
};

// Caller misuse: mismatched sizes, coefficients from another frame, empty data.
class UsageError : public std::logic_error {
 public:
  using std::logic_error::logic_error;
};

// Malformed input file or failed read/write.
class IoError : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

}  // namespace spinneedlets
