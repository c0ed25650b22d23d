// common.hpp — shared scalar/vector aliases and error types
#pragma once

#include <complex>
#include <stdexcept>
#include <string>

#include <Eigen/Dense>
#include <Eigen/Sparse>

namespace photoion {

using cd = std::complex<double>;
using Vec = Eigen::VectorXcd;
using Mat = Eigen::MatrixXcd;
using RVec = Eigen::VectorXd;
using SpMat = Eigen::SparseMatrix<cd, Eigen::RowMajor>;
using Vec3 = Eigen::Vector3d;

inline constexpr double kPi = 3.14159265358979323846;
inline constexpr cd kI{0.0, 1.0};

// Invalid input or violated precondition (CLI exit 1).
struct ConfigError : std::invalid_argument {
  using std::invalid_argument::invalid_argument;
};

// Iterative method or quadrature did not reach its tolerance (CLI exit 3).
struct ConvergenceError : std::runtime_error {
  using std::runtime_error::runtime_error;
};

// Requested problem size exceeds the configured memory budget (CLI exit 1).
struct BudgetError : std::runtime_error {
  using std::runtime_error::runtime_error;
};

// A runtime invariant check failed (CLI exit 2).
struct ValidationError : std::runtime_error {
  using std::runtime_error::runtime_error;
};

}  // namespace photoion
