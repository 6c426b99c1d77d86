#pragma once

#include <Eigen/Core>

#include <cstddef>
#include <stdexcept>
#include <string>

namespace gowl {

using Index = Eigen::Index;
using Vector = Eigen::VectorXd;
using Matrix = Eigen::MatrixXd;

/// Coefficient matrix, features x tasks.
using CoefficientMatrix = Matrix;
/// Dual iterate, samples x tasks.
using DualMatrix = Matrix;

/// Thrown for contract violations and malformed inputs.
class Error : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

/// Thrown by readers; carries the 1-based line number when known.
class ParseError : public Error {
 public:
  ParseError(const std::string& msg, std::size_t line)
      : Error(line ? "line " + std::to_string(line) + ": " + msg : msg),
        line_(line) {}
  std::size_t line() const noexcept { return line_; }

 private:
  std::size_t line_;
};

/// Thrown when an iterate becomes non-finite.
/// A file could not be opened or written.
class IoError : public Error {
 public:
  using Error::Error;
};

class DivergenceError : public Error {
 public:
  using Error::Error;
};

enum class LossKind { squared, multinomial };

const char* to_string(LossKind kind);

/// Ordered regularization weights, non-increasing and nonnegative.
class WeightVector {
 public:
  WeightVector() = default;
  explicit WeightVector(Vector values);

  Index size() const noexcept { return values_.size(); }
  double operator[](Index i) const { return values_[i]; }
  const Vector& values() const noexcept { return values_; }

  /// The k largest weights.
  WeightVector head(Index k) const;

 private:
  Vector values_;
};

}  // namespace gowl
