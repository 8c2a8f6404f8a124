#include "spencer/eigensolver.hpp"

#include "spencer/error.hpp"

#include <Eigen/SparseCholesky>

#include <algorithm>
#include <cmath>
#include <random>

namespace spencer {

namespace {

Eigen::MatrixXd orthonormalize(const Eigen::MatrixXd& y) {
  Eigen::HouseholderQR<Eigen::MatrixXd> qr(y);
  return qr.householderQ() * Eigen::MatrixXd::Identity(y.rows(), y.cols());
}

Eigen::MatrixXd random_block(Eigen::Index rows, Eigen::Index cols, std::uint64_t seed) {
  std::mt19937_64 rng(seed);
  std::normal_distribution<double> normal;
  Eigen::MatrixXd x(rows, cols);
  for (Eigen::Index j = 0; j < cols; ++j)
    for (Eigen::Index i = 0; i < rows; ++i) x(i, j) = normal(rng);
  return x;
}

}  // namespace

EigenResult dense_symmetric_eigen(const Eigen::MatrixXd& a) {
  EigenResult r;
  if (a.rows() == 0) {
    r.complete = true;
    return r;
  }
  Eigen::SelfAdjointEigenSolver<Eigen::MatrixXd> eig(a);
  if (eig.info() != Eigen::Success) throw Error(ErrorCode::EigensolverFailure, "dense symmetric eigensolver failed");
  r.values = eig.eigenvalues();
  r.vectors = eig.eigenvectors();
  r.lambda_max = r.values.maxCoeff();
  r.complete = true;
  return r;
}

double largest_eigenvalue(const Eigen::SparseMatrix<double>& a, std::uint64_t seed, int steps) {
  const Eigen::Index n = a.rows();
  if (n == 0) return 0.0;
  steps = static_cast<int>(std::min<Eigen::Index>(steps, n));
  Eigen::MatrixXd basis(n, steps);
  Eigen::VectorXd alpha(steps);
  Eigen::VectorXd beta = Eigen::VectorXd::Zero(steps);
  Eigen::VectorXd q = random_block(n, 1, seed).col(0);
  q.normalize();
  int m = 0;
  for (; m < steps; ++m) {
    basis.col(m) = q;
    Eigen::VectorXd w = a * q;
    alpha[m] = q.dot(w);
    // full reorthogonalisation keeps the small tridiagonal problem honest
    w -= basis.leftCols(m + 1) * (basis.leftCols(m + 1).transpose() * w);
    w -= basis.leftCols(m + 1) * (basis.leftCols(m + 1).transpose() * w);
    const double b = w.norm();
    if (m + 1 < steps) beta[m + 1] = b;
    if (b < 1e-14 * (std::abs(alpha[m]) + 1e-300)) {
      ++m;
      break;
    }
    q = w / b;
  }
  Eigen::MatrixXd t = Eigen::MatrixXd::Zero(m, m);
  for (int i = 0; i < m; ++i) {
    t(i, i) = alpha[i];
    if (i + 1 < m) t(i, i + 1) = t(i + 1, i) = beta[i + 1];
  }
  Eigen::SelfAdjointEigenSolver<Eigen::MatrixXd> eig(t, Eigen::EigenvaluesOnly);
  return eig.eigenvalues().maxCoeff();
}

EigenResult smallest_eigenpairs(const Eigen::SparseMatrix<double>& a, int nev, double lambda_max,
                                const EigenOptions& options) {
  const Eigen::Index n = a.rows();
  EigenResult r;
  r.lambda_max = lambda_max;
  if (n == 0) {
    r.complete = true;
    return r;
  }
  nev = static_cast<int>(std::min<Eigen::Index>(nev, n));
  const Eigen::Index block = std::min<Eigen::Index>(n, nev + std::max(10, nev / 2));

  const double scale = lambda_max > 0.0 ? lambda_max : 1.0;
  const double shift = 1e-6 * scale;
  Eigen::SparseMatrix<double> shifted = a;
  for (Eigen::Index i = 0; i < n; ++i) shifted.coeffRef(i, i) += shift;
  Eigen::SimplicialLDLT<Eigen::SparseMatrix<double>> solver(shifted);
  if (solver.info() != Eigen::Success) throw Error(ErrorCode::EigensolverFailure, "shift-invert factorisation failed");

  Eigen::MatrixXd x = orthonormalize(random_block(n, block, options.seed));
  for (int it = 1; it <= options.max_iterations; ++it) {
    Eigen::MatrixXd y = solver.solve(x);
    if (solver.info() != Eigen::Success) throw Error(ErrorCode::EigensolverFailure, "shift-invert solve failed");
    const Eigen::MatrixXd q = orthonormalize(y);
    const Eigen::MatrixXd aq = a * q;
    Eigen::MatrixXd h = q.transpose() * aq;
    h = 0.5 * (h + h.transpose());
    Eigen::SelfAdjointEigenSolver<Eigen::MatrixXd> ritz(h);
    x = q * ritz.eigenvectors();
    const Eigen::MatrixXd ax = aq * ritz.eigenvectors();

    double worst = 0.0;
    for (int i = 0; i < nev; ++i) worst = std::max(worst, (ax.col(i) - ritz.eigenvalues()[i] * x.col(i)).norm());
    if (worst <= options.residual_tolerance * scale) {
      r.values = ritz.eigenvalues().head(nev);
      r.vectors = x.leftCols(nev);
      r.iterations = it;
      r.complete = nev == n;
      return r;
    }
  }
  throw Error(ErrorCode::EigensolverFailure,
              "subspace iteration did not converge in " + std::to_string(options.max_iterations) + " iterations");
}

}  // namespace spencer
