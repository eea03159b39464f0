#pragma once

#include <Eigen/Dense>

#include <cstddef>
#include <stdexcept>
#include <string>

namespace starcons {

// Agent states are rows, so matrices are stored row-major.
using Matrix = Eigen::Matrix<double, Eigen::Dynamic, Eigen::Dynamic, Eigen::RowMajor>;
using RowVector = Eigen::RowVectorXd;
using Vector = Eigen::VectorXd;
using RowRef = Eigen::Ref<const RowVector>;

/// Rows with Euclidean norm below this are treated as the zero vector.
inline constexpr double kZeroRowThreshold = 1e-300;

class Error : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

/// A caller broke an operation's precondition.
class ContractViolation : public Error {
 public:
  using Error::Error;
};

class ZeroRowError : public ContractViolation {
 public:
  explicit ZeroRowError(std::size_t row)
      : ContractViolation("row " + std::to_string(row) + " is the zero vector"), row_(row) {}
  std::size_t row() const noexcept { return row_; }

 private:
  std::size_t row_;
};

class DimensionMismatch : public Error {
 public:
  using Error::Error;
};

/// An iterative estimate failed to reach its tolerance.
class NonConvergence : public Error {
 public:
  NonConvergence(const std::string& what, double best_residual, std::size_t iterations)
      : Error(what), best_residual_(best_residual), iterations_(iterations) {}
  double best_residual() const noexcept { return best_residual_; }
  std::size_t iterations() const noexcept { return iterations_; }

 private:
  double best_residual_;
  std::size_t iterations_;
};

}  // namespace starcons
