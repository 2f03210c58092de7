#pragma once

#include <cstddef>
#include <stdexcept>
#include <string>

namespace attctl {

/// Base of every error thrown by the library.
class Error : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

/// A matrix passed to vee() has a symmetric part above tolerance.
class NotSkew : public Error {
 public:
  using Error::Error;
};

/// Projection onto S^3 or SO(3) requested for an input too far from it.
class TooFarFromManifold : public Error {
 public:
  using Error::Error;
};

/// A value violates a domain-type invariant (gains, weights, inertia, ...).
class InvalidArgument : public Error {
 public:
  using Error::Error;
};

/// Integration produced NaN/Inf, or a step moved the attitude so far off its
/// manifold that projection is refused. Carries the step index.
class NonFiniteState : public Error {
 public:
  NonFiniteState(const std::string& what, std::size_t step)
      : Error(what + " (step " + std::to_string(step) + ")"), step_(step) {}

  std::size_t step() const noexcept { return step_; }

 private:
  std::size_t step_;
};

/// Malformed or unknown entry in a scenario file.
class ConfigError : public Error {
 public:
  using Error::Error;
};

}  // namespace attctl
