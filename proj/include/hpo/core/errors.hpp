#pragma once

#include <cstddef>
#include <stdexcept>
#include <string>

namespace hpo {

/// Base of every error raised by the library.
class Error : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

/// A precondition on an argument was violated.
class InvalidArgument : public Error {
 public:
  using Error::Error;
};

/// A learner could not be fitted (degenerate data, rejected hyperparameters).
class FitError : public Error {
 public:
  using Error::Error;
};

/// A learner was handed data it does not support (missing values, categoricals, task kind).
class CapabilityError : public Error {
 public:
  using Error::Error;
};

/// Raised by resampled evaluation; carries the index of the failing split.
class SplitError : public Error {
 public:
  SplitError(std::size_t split, const std::string& what)
      : Error("split " + std::to_string(split) + ": " + what), split_(split) {}
  std::size_t split() const noexcept { return split_; }

 private:
  std::size_t split_;
};

/// Inner resampling touched rows outside the outer training set.
class LeakageError : public Error {
 public:
  using Error::Error;
};

/// Two search spaces disagree on names, kinds, bounds or levels.
class IncompatibleSpace : public Error {
 public:
  using Error::Error;
};

/// Run-configuration document failed validation. `field` is a JSON pointer.
class ConfigError : public Error {
 public:
  ConfigError(std::string field, const std::string& what)
      : Error(field + ": " + what), field_(std::move(field)) {}
  const std::string& field() const noexcept { return field_; }

 private:
  std::string field_;
};

}  // namespace hpo
