#pragma once

#include <cstddef>
#include <stdexcept>
#include <string>

namespace sra {

/// Malformed or inconsistent input data (bad CSV rows, length mismatches).
class DataError : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

/// Numeric failure: divergence, singular covariance, degenerate component.
class NumericError : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

/// A mixture component whose occupancy fell below the floor.
class DegenerateComponentError : public NumericError {
 public:
  DegenerateComponentError(std::size_t component, double occupancy)
      : NumericError("degenerate mixture component " + std::to_string(component) +
                     " (occupancy " + std::to_string(occupancy) + ")"),
        component_(component) {}

  std::size_t component() const noexcept { return component_; }

 private:
  std::size_t component_;
};

/// A covariance matrix that is not positive definite after flooring.
class SingularCovarianceError : public NumericError {
 public:
  explicit SingularCovarianceError(std::size_t component)
      : NumericError("singular covariance in mixture component " + std::to_string(component)),
        component_(component) {}

  std::size_t component() const noexcept { return component_; }

 private:
  std::size_t component_;
};

}  // namespace sra
