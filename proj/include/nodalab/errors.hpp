#pragma once

#include <stdexcept>
#include <string>

namespace nodalab {

/// Input outside the domain of an operation (bad chart coordinates, parameters out of range).
class DomainError : public std::domain_error {
 public:
  using std::domain_error::domain_error;
};

/// A numerical procedure failed to reach its tolerance.
class NumericError : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

/// A hyperbolic field spec whose wave count does not pass the covariance self-check.
class CertificationError : public std::runtime_error {
 public:
  CertificationError(const std::string& what, int minimal_waves)
      : std::runtime_error(what), minimal_waves_(minimal_waves) {}
  int minimal_waves() const noexcept { return minimal_waves_; }

 private:
  int minimal_waves_;
};

/// Malformed configuration (CLI or config file).
class ConfigError : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

}  // namespace nodalab
