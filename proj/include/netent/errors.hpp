#pragma once

#include <cstddef>
#include <stdexcept>
#include <string>

namespace netent {

class Error : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

/// Layer shapes that do not chain, or an input of the wrong length.
class DimensionError : public Error {
 public:
  DimensionError(std::size_t layer, const std::string& what)
      : Error("layer " + std::to_string(layer) + ": " + what), layer_(layer) {}
  std::size_t layer() const { return layer_; }

 private:
  std::size_t layer_;
};

class PreconditionError : public Error {
 public:
  using Error::Error;
};

/// An argument outside the admissible domain (radius, magnitude, ...).
class DomainError : public Error {
 public:
  using Error::Error;
};

/// A computation would exceed a configured budget. `count` is the exact
/// size that would have been produced, as a decimal string.
class ResourceError : public Error {
 public:
  ResourceError(const std::string& what, std::string count)
      : Error(what + " (would produce " + count + ")"), count_(std::move(count)) {}
  const std::string& count() const { return count_; }

 private:
  std::string count_;
};

class SolverError : public Error {
 public:
  using Error::Error;
};

}  // namespace netent
