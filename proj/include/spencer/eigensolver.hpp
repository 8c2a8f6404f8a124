#pragma once

#include <Eigen/Dense>
#include <Eigen/Sparse>

#include <cstddef>
#include <cstdint>

namespace spencer {

struct EigenOptions {
  /// Problems up to this size use the dense symmetric solver.
  std::size_t dense_limit = 5000;
  /// Initial number of smallest eigenpairs for the iterative solver; grown
  /// until at least one computed eigenvalue lies above the kernel tolerance.
  int nev = 24;
  int max_iterations = 3000;
  /// Relative (to lambda_max) Ritz residual accepted by the iterative solver.
  double residual_tolerance = 1e-11;
  /// Zero-eigenvalue threshold: tol = kernel_tolerance * max(1, lambda_max).
  double kernel_tolerance = 1e-8;
  std::uint64_t seed = 20240917;
};

struct EigenResult {
  Eigen::VectorXd values;   // ascending
  Eigen::MatrixXd vectors;  // orthonormal columns
  double lambda_max = 0.0;
  bool complete = false;    // true when every eigenpair was computed
  int iterations = 0;
};

/// Full decomposition of a dense symmetric matrix.
EigenResult dense_symmetric_eigen(const Eigen::MatrixXd& a);

/// Largest eigenvalue of a symmetric PSD matrix by Lanczos.
double largest_eigenvalue(const Eigen::SparseMatrix<double>& a, std::uint64_t seed, int steps = 80);

/// `nev` smallest eigenpairs of a symmetric PSD sparse matrix by shift-invert
/// subspace iteration with Rayleigh-Ritz. Throws EigensolverFailure.
EigenResult smallest_eigenpairs(const Eigen::SparseMatrix<double>& a, int nev, double lambda_max,
                                const EigenOptions& options);

}  // namespace spencer
