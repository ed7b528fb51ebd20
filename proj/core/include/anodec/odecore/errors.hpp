#pragma once

#include <cstddef>
#include <stdexcept>
#include <string>

namespace anodec {

/// Base class for every error raised by the library.
class Error : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

/// Sample counts, grid spacing or vector dimensions do not line up.
class ShapeError : public Error {
 public:
  using Error::Error;
};

/// A vector-field stage produced a non-finite value.
class IntegrationError : public Error {
 public:
  IntegrationError(std::size_t step, const std::string& what)
      : Error("integration failure at step " + std::to_string(step) + ": " + what), step_(step) {}

  std::size_t step() const noexcept { return step_; }

 private:
  std::size_t step_;
};

/// A gradient component came out non-finite.
class GradientError : public Error {
 public:
  explicit GradientError(std::size_t index)
      : Error("non-finite gradient component at parameter index " + std::to_string(index)),
        index_(index) {}

  std::size_t parameter_index() const noexcept { return index_; }

 private:
  std::size_t index_;
};

/// Malformed or inconsistent configuration.
class ConfigError : public Error {
 public:
  using Error::Error;
};

}  // namespace anodec
