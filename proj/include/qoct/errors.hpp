#pragma once

#include <stdexcept>
#include <string>

namespace qoct {

/// Base class of every error raised by the library.
class Error : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

class DimensionError : public Error {
 public:
  using Error::Error;
};

class HermiticityError : public Error {
 public:
  using Error::Error;
};

/// A pure state or density matrix violates its normalization/positivity bounds.
class StateError : public Error {
 public:
  using Error::Error;
};

/// A time lies outside the control window.
class DomainError : public Error {
 public:
  using Error::Error;
};

class IndexError : public Error {
 public:
  using Error::Error;
};

/// Time grid, trajectory, or sampled data disagree in extent.
class GridError : public Error {
 public:
  using Error::Error;
};

class UnsupportedTargetError : public Error {
 public:
  using Error::Error;
};

/// Malformed or inconsistent problem configuration.
class ConfigError : public Error {
 public:
  using Error::Error;
};

}  // namespace qoct
