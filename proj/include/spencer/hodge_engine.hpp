#pragma once

#include "spencer/eigensolver.hpp"
#include "spencer/pair_field.hpp"
#include "spencer/spencer_op.hpp"
#include "spencer/torus_mesh.hpp"

#include <Eigen/Dense>
#include <Eigen/Sparse>

#include <algorithm>
#include <cmath>
#include <cstdint>
#include <memory>
#include <optional>
#include <string>
#include <vector>

namespace spencer {

enum class MetricKind { A, B, Mixed };

/// Metric A weights by w_lambda, metric B by kappa_omega, the mixed metric by
/// alpha w_lambda + (1 - alpha) kappa_omega.
struct MetricChoice {
  MetricKind kind = MetricKind::A;
  double alpha = 0.5;

  std::string tag() const;
  double weight(double w_lambda, double kappa) const {
    switch (kind) {
      case MetricKind::A: return w_lambda;
      case MetricKind::B: return kappa;
      case MetricKind::Mixed: return alpha * w_lambda + (1.0 - alpha) * kappa;
    }
    return w_lambda;
  }

  static MetricChoice a() { return {MetricKind::A, 0.5}; }
  static MetricChoice b() { return {MetricKind::B, 0.5}; }
  static MetricChoice mixed(double alpha) { return {MetricKind::Mixed, alpha}; }
};

/// One summand S^{k,j} = (k-cochains) x Sym^j inside a total-degree space.
/// Coordinates are cell-major: offset + cell * sym_dim + s.
struct Block {
  int k = 0;
  int j = 0;
  std::size_t offset = 0;
  std::size_t cells = 0;
  std::size_t sym_dim = 0;
  std::size_t size() const { return cells * sym_dim; }
};

/// Blocks of S^n for a mesh of dimension dim_m, algebra dimension d and truncation J.
std::vector<Block> block_layout(const TorusMesh& mesh, int d, int truncation, int n);

/// Diagonal mass of S^n: weight(cell) * cell_volume * Sym Gram.
Eigen::VectorXd metric_mass(const PairField& field, int truncation, SymInner inner, const MetricChoice& metric, int n);

struct AssemblyOptions {
  int truncation = 0;
  MetricChoice metric;
  SpencerOptions spencer;
};

/// The total Spencer differential on a torus mesh with its metric data.
///
/// Horizontal blocks are d_k (x) id, vertical blocks are (-1)^k id (x) delta^lambda
/// with lambda sampled at the k-cell barycenter. Vertical output at Sym
/// degree J is dropped (hard truncation).
class SpencerAssembly {
 public:
  SpencerAssembly(std::shared_ptr<const PairField> field, AssemblyOptions options);

  const PairField& field() const { return *field_; }
  const TorusMesh& mesh() const { return field_->mesh(); }
  const AssemblyOptions& options() const { return options_; }
  int truncation() const { return options_.truncation; }

  /// Highest total degree, dim M + J.
  int top_degree() const { return mesh().dim() + truncation(); }
  const std::vector<Block>& blocks(int n) const { return blocks_.at(static_cast<std::size_t>(n)); }
  std::size_t space_dim(int n) const;

  /// D^n : S^n -> S^{n+1}; n in [-1, top_degree]. Out-of-range degrees give zero maps.
  SparseMatrix differential(int n) const;
  /// Horizontal (d x id) or vertical ((-1)^k id x delta) part of D^n.
  const SparseMatrix& horizontal(int n) const { return horizontal_.at(static_cast<std::size_t>(n)); }
  const SparseMatrix& vertical(int n) const { return vertical_.at(static_cast<std::size_t>(n)); }

  const Eigen::VectorXd& mass(int n) const { return mass_.at(static_cast<std::size_t>(n)); }

  /// D^{n*} = M_n^{-1} (D^n)^T M_{n+1}.
  SparseMatrix adjoint(int n) const;
  /// K_n = M_n Delta_n, symmetric positive semidefinite.
  SparseMatrix stiffness(int n) const;
  /// Delta_n u = D^{n-1} D^{n-1*} u + D^{n*} D^n u.
  Eigen::VectorXd apply_laplacian(int n, const Eigen::VectorXd& u) const;

  double inner(int n, const Eigen::VectorXd& u, const Eigen::VectorXd& v) const {
    return u.dot(mass(n).cwiseProduct(v));
  }
  double norm(int n, const Eigen::VectorXd& u) const { return std::sqrt(inner(n, u, u)); }

  /// ||D_h D_v + D_v D_h||_F over all degrees.
  double anticommutation_residual() const;
  /// Frobenius norm of M_{n+2}^{1/2} D^{n+1} D^n M_n^{-1/2} (an operator-norm bound).
  double complex_residual(int n) const;

 private:
  std::shared_ptr<const PairField> field_;
  AssemblyOptions options_;
  std::vector<std::vector<Block>> blocks_;
  std::vector<SparseMatrix> horizontal_;
  std::vector<SparseMatrix> vertical_;
  std::vector<Eigen::VectorXd> mass_;
};

// ---------------------------------------------------------------------------

struct HarmonicSpace {
  int degree = 0;
  Eigen::VectorXd eigenvalues;   // ascending; all of them when spectrum_complete
  Eigen::MatrixXd eigenvectors;  // M-orthonormal columns matching eigenvalues
  bool spectrum_complete = false;
  double lambda_max = 0.0;
  double tolerance = 0.0;
  int dimension = 0;
  double self_adjoint_residual = 0.0;
  double min_eigenvalue = 0.0;
  bool sorted = true;
  bool nonnegative = true;
  /// max |<h_i, h_j>_M - delta_ij| over the harmonic basis.
  double basis_orthonormality = 0.0;

  /// M-orthonormal basis of the kernel.
  Eigen::MatrixXd basis() const { return eigenvectors.leftCols(dimension); }
};

/// Generalised symmetric eigenproblem K u = lambda M u on S^n with kernel
/// extraction at tol = kernel_tolerance * max(1, lambda_max).
HarmonicSpace harmonic_space(const SpencerAssembly& assembly, int n, const EigenOptions& options);

/// P_harm u.
Eigen::VectorXd harmonic_projection(const SpencerAssembly& assembly, const HarmonicSpace& h, const Eigen::VectorXd& u);

struct HodgeDecomposition {
  Eigen::VectorXd harmonic;
  Eigen::VectorXd exact;    // D^{n-1} a
  Eigen::VectorXd coexact;  // D^{n*} b
  Eigen::VectorXd exact_potential;
  Eigen::VectorXd coexact_potential;
  /// ||u - h - exact - coexact||_M / ||u||_M
  double reconstruction_residual = 0.0;
  /// |<x, y>_M| / ||u||_M^2 for each pair
  double harmonic_exact = 0.0;
  double harmonic_coexact = 0.0;
  double exact_coexact = 0.0;
  /// Upper bound for exact_coexact implied by D^n D^{n-1} != 0:
  /// ||D D||_op ||a|| ||b|| / ||u||^2.
  double orthogonality_bound = 0.0;

  double max_orthogonality_defect() const { return std::max({harmonic_exact, harmonic_coexact, exact_coexact}); }
};

HodgeDecomposition hodge_decompose(const SpencerAssembly& assembly, const HarmonicSpace& h, const Eigen::VectorXd& u);

/// v with Delta v = u - P_harm u and v M-orthogonal to the harmonic space.
Eigen::VectorXd green_apply(const SpencerAssembly& assembly, const HarmonicSpace& h, const Eigen::VectorXd& u);

/// ||Delta v - (u - P_harm u)||_M / ||u||_M.
double green_residual(const SpencerAssembly& assembly, const HarmonicSpace& h, const Eigen::VectorXd& u,
                      const Eigen::VectorXd& v);

// ---------------------------------------------------------------------------

struct MetricEquivalence {
  double c1 = 0.0;  // inf w / sup kappa
  double c2 = 0.0;  // sup w / inf kappa
  double w_min = 0.0;
  double w_max = 0.0;
  double kappa_min = 0.0;
  double kappa_max = 0.0;
};

MetricEquivalence metric_equivalence(const PairField& field);

struct SandwichReport {
  int samples = 0;
  double ratio_min = 0.0;  // min ||u||_B^2 / ||u||_A^2
  double ratio_max = 0.0;
  /// c1 ||u||_A^2 <= ||u||_B^2 <= c2 ||u||_A^2 on every sample.
  bool holds_a_outside = false;
  /// c1 ||u||_B^2 <= ||u||_A^2 <= c2 ||u||_B^2 on every sample.
  bool holds_b_outside = false;
};

/// Random-cochain check of both sandwich orientations with slack 1e-12 (relative).
SandwichReport sandwich_check(const PairField& field, int truncation, SymInner inner, int n, int samples,
                              std::uint64_t seed);

struct EllipticEstimate {
  double c_a = 0.0;
  double c_b = 0.0;
  double inf_w = 0.0;
  double sup_w = 0.0;
  double inf_kappa = 0.0;
  double sup_kappa = 0.0;
  double inf_gap = 0.0;
  double lambda1_dd = 0.0;     // first nonzero eigenvalue of d*d on 0-forms
  double lambda1_delta = 0.0;  // smallest nonzero eigenvalue of delta*delta on g, minimised over vertices
  double ratio() const { return c_b > 0.0 ? c_a / c_b : 0.0; }
};

EllipticEstimate elliptic_constant_estimate(const PairField& field, const SpencerOptions& spencer,
                                            const EigenOptions& eigen);

}  // namespace spencer
