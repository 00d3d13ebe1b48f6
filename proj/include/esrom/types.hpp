#pragma once

#include <Eigen/Dense>

#include <cstdint>
#include <stdexcept>
#include <string>

namespace esrom {

using DenseMatrix = Eigen::MatrixXd;  // column-major, 64-bit floats
using Vector = Eigen::VectorXd;
using Index = Eigen::Index;

/// A single state vector (<= 4 conserved components), stack-allocated.
using State = Eigen::Matrix<double, Eigen::Dynamic, 1, Eigen::ColMajor, 4, 1>;

/// Grid field, points x components.
using StateField = DenseMatrix;

struct Error : std::runtime_error {
  using std::runtime_error::runtime_error;
};

/// Bad or inconsistent configuration (including fingerprint mismatches).
struct ConfigError : Error {
  using Error::Error;
};

/// Filesystem / format problems.
struct IoError : Error {
  using Error::Error;
};

/// Inadmissible thermodynamic state (nonpositive density or pressure).
struct PositivityError : Error {
  PositivityError(const std::string& msg, Index point_, std::string quantity_)
      : Error(msg), point(point_), quantity(std::move(quantity_)) {}
  Index point;           // grid / evaluation point, -1 if unknown
  std::string quantity;  // "density" or "pressure"
};

/// Nonpositive pivot during a Cholesky factorization.
struct SpdError : Error {
  SpdError(const std::string& msg, Index pivot_) : Error(msg), pivot(pivot_) {}
  Index pivot;
};

/// Iteration cap hit; carries the best iterate found so far.
struct ConvergenceError : Error {
  ConvergenceError(const std::string& msg, Vector best_)
      : Error(msg), best(std::move(best_)) {}
  Vector best;
};

}  // namespace esrom
