#pragma once

#include <stdexcept>
#include <string>

namespace levylab {

/// Rejected input: bad parameters, malformed config, shape mismatch.
class ValidationError : public std::invalid_argument {
public:
  explicit ValidationError(const std::string& what) : std::invalid_argument(what) {}
};

/// A numeric routine could not reach its requested tolerance.
class NumericFailure : public std::runtime_error {
public:
  NumericFailure(const std::string& what, double achieved_tolerance)
      : std::runtime_error(what + " (achieved tolerance " + std::to_string(achieved_tolerance) + ")"),
        achieved_(achieved_tolerance) {}

  double achieved_tolerance() const noexcept { return achieved_; }

private:
  double achieved_;
};

/// Requested grid would exceed the configured memory cap.
class CapacityError : public std::length_error {
public:
  CapacityError(std::size_t required, std::size_t allowed)
      : std::length_error("grid needs " + std::to_string(required) + " cells, cap is " +
                          std::to_string(allowed)),
        required_(required), allowed_(allowed) {}

  std::size_t required() const noexcept { return required_; }
  std::size_t allowed() const noexcept { return allowed_; }

private:
  std::size_t required_;
  std::size_t allowed_;
};

}  // namespace levylab
