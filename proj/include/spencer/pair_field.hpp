#pragma once

#include "spencer/lie_algebra.hpp"
#include "spencer/torus_mesh.hpp"

#include <Eigen/Dense>

#include <functional>
#include <memory>
#include <vector>

namespace spencer {

/// Position -> coefficient vector (length dim g). Used for lambda (dual
/// coefficients) and for each connection component omega_a.
using VectorField = std::function<Eigen::VectorXd(const Point&)>;

enum class WeightKind { Constraint, ConstraintEnhanced, Curvature };

/// Sampled compatible-pair data (lambda, omega) on a trivialised bundle over
/// a torus mesh.
///
/// Every field lives on the half-spacing lattice, so every vertex, edge and
/// face barycenter is a sample point. Base derivatives are periodic central
/// differences on that lattice. Derived quantities (curvature, w_lambda,
/// w^enh, kappa_omega, Cartan residual) are computed once at construction.
class PairField {
 public:
  static PairField sample(std::shared_ptr<const TorusMesh> mesh, std::shared_ptr<const LieAlgebra> alg,
                          const VectorField& lambda, const std::vector<VectorField>& omega);

  /// Fields given at mesh vertices (columns), linearly interpolated to
  /// edge and face barycenters.
  static PairField from_vertex_tables(std::shared_ptr<const TorusMesh> mesh, std::shared_ptr<const LieAlgebra> alg,
                                      const Eigen::MatrixXd& lambda, const std::vector<Eigen::MatrixXd>& omega);

  const TorusMesh& mesh() const { return *mesh_; }
  const LieAlgebra& algebra() const { return *alg_; }
  std::shared_ptr<const TorusMesh> mesh_ptr() const { return mesh_; }
  std::shared_ptr<const LieAlgebra> algebra_ptr() const { return alg_; }

  std::size_t point_count() const { return static_cast<std::size_t>(lambda_.cols()); }
  std::size_t point_of_cell(int k, std::size_t cell) const { return mesh_->half_grid_linear(mesh_->half_grid_index(k, cell)); }

  DualVector lambda_at(std::size_t point) const { return DualVector(lambda_.col(static_cast<Eigen::Index>(point))); }
  DualVector lambda_at_cell(int k, std::size_t cell) const { return lambda_at(point_of_cell(k, cell)); }
  Eigen::VectorXd omega_at(int axis, std::size_t point) const {
    return omega_[static_cast<std::size_t>(axis)].col(static_cast<Eigen::Index>(point));
  }
  /// Omega_12 at a lattice point (zero on T^1).
  Eigen::VectorXd curvature_at(std::size_t point) const { return curvature_.col(static_cast<Eigen::Index>(point)); }
  /// (d lambda + ad*_omega lambda)(partial_a) at a lattice point.
  Eigen::VectorXd covariant_derivative_at(int axis, std::size_t point) const {
    return covariant_[static_cast<std::size_t>(axis)].col(static_cast<Eigen::Index>(point));
  }

  /// Per-lattice-point values.
  const Eigen::VectorXd& weights(WeightKind kind) const;
  const Eigen::VectorXd& cartan_residual_points() const { return cartan_; }

  double weight_at_cell(WeightKind kind, int k, std::size_t cell) const {
    return weights(kind)[static_cast<Eigen::Index>(point_of_cell(k, cell))];
  }

  /// Constraint strength S_lambda = ||lambda||_{g*} per lattice point.
  Eigen::VectorXd constraint_strength() const;

  /// Same lambda and omega with a perturbation added to lambda.
  PairField with_lambda_perturbation(const VectorField& delta) const;
  /// Pointwise transform of (lambda, omega) by constant matrices.
  PairField transformed(const Eigen::MatrixXd& lambda_map, const Eigen::MatrixXd& omega_map) const;

 private:
  PairField(std::shared_ptr<const TorusMesh> mesh, std::shared_ptr<const LieAlgebra> alg, Eigen::MatrixXd lambda,
            std::vector<Eigen::MatrixXd> omega);

  Eigen::MatrixXd central_difference(const Eigen::MatrixXd& f, int axis) const;

  std::shared_ptr<const TorusMesh> mesh_;
  std::shared_ptr<const LieAlgebra> alg_;
  Eigen::MatrixXd lambda_;               // d x P
  std::vector<Eigen::MatrixXd> omega_;   // per axis, d x P
  Eigen::MatrixXd curvature_;            // d x P
  std::vector<Eigen::MatrixXd> covariant_;
  Eigen::VectorXd w_lambda_;
  Eigen::VectorXd w_enhanced_;
  Eigen::VectorXd kappa_;
  Eigen::VectorXd cartan_;
};

/// sample_fields operation.
PairField sample_fields(std::shared_ptr<const TorusMesh> mesh, std::shared_ptr<const LieAlgebra> alg,
                        const VectorField& lambda, const std::vector<VectorField>& omega);

/// Omega_12 = d_1 omega_2 - d_2 omega_1 + [omega_1, omega_2] at every face (d x F).
Eigen::MatrixXd curvature(const PairField& field);

/// w_lambda = 1 + ||lambda||^2 at every vertex.
Eigen::VectorXd weight_constraint(const PairField& field);
/// w^enh = 1 + ||lambda||^2 + sum_a ||d_a lambda + ad*_{omega_a} lambda||^2 at every vertex.
Eigen::VectorXd weight_constraint_enhanced(const PairField& field);
/// kappa = 1 + ||Omega||^2 + sum_a ||d_a Omega||^2 at every vertex.
Eigen::VectorXd weight_curvature(const PairField& field);

struct CartanResidual {
  Eigen::VectorXd per_vertex;
  double l2 = 0.0;  // sqrt(sum_v r_v^2 vol_v)
  double max = 0.0;
};

CartanResidual cartan_residual(const PairField& field);

struct Transversality {
  /// Smallest singular value of v -> (<lambda, omega(v)>, <xi, dpi(v)>).
  double margin = 0.0;
  /// 2 sin(theta/2) for the principal angle theta between V and the part of D
  /// not contained in V.
  double gap = 0.0;
};

/// Tangent space T_xM + g with the Euclidean metric on the base and the
/// Killing metric on g. Throws ZeroCovector for xi = 0.
Transversality transversality_margin(const PairField& field, std::size_t point, const Eigen::VectorXd& xi);

struct TransversalitySummary {
  double min_margin = 0.0;
  double min_gap = 0.0;
};

/// Minimum over all lattice points and `directions` unit covectors.
TransversalitySummary transversality_summary(const PairField& field, int directions = 8);

// ---------------------------------------------------------------------------
// Variational fitting of lambda.

struct FitOptions {
  double alpha = 0.0;
  int max_iterations = 5000;
  double step = 1.0;
  /// Converged once the relative objective decrease of an accepted step drops below this.
  double tolerance = 1e-8;
  /// Converged once the objective itself drops below this.
  double objective_floor = 1e-26;
  int max_halvings = 60;
};

struct FitResult {
  Eigen::MatrixXd lambda;  // d x V
  std::vector<double> objective_trace;  // objective before the first step and after every accepted step
  double final_objective = 0.0;
  double final_residual = 0.0;  // Cartan L2 residual
  int iterations = 0;
};

/// Discretised compatibility functional on the vertex grid:
///   1/2 sum_v vol_v sum_a ||D_a lambda + ad*_{omega_a} lambda||^2
///   + alpha sum_v vol_v dist^2(lambda_v, R mu_v).
class CompatibilityFunctional {
 public:
  CompatibilityFunctional(const TorusMesh& mesh, const LieAlgebra& alg, std::vector<Eigen::MatrixXd> omega,
                          Eigen::MatrixXd target, double alpha);

  double value(const Eigen::MatrixXd& lambda) const;
  Eigen::MatrixXd gradient(const Eigen::MatrixXd& lambda) const;
  /// Cartan residual vectors per axis (d x V each).
  std::vector<Eigen::MatrixXd> residual(const Eigen::MatrixXd& lambda) const;
  double residual_l2(const Eigen::MatrixXd& lambda) const;
  /// Largest relative distance of lambda_v to the line R mu_v.
  double alignment_distance(const Eigen::MatrixXd& lambda) const;

 private:
  Eigen::MatrixXd shift(const Eigen::MatrixXd& f, int axis, int offset) const;

  const TorusMesh& mesh_;
  const LieAlgebra& alg_;
  std::vector<Eigen::MatrixXd> omega_;
  std::vector<std::vector<Eigen::MatrixXd>> coadjoint_;  // per axis, per vertex
  Eigen::MatrixXd target_;
  double alpha_;
  double volume_;
};

/// Backtracking gradient descent. Throws NonConvergence or StepCollapse.
FitResult fit_lambda(const TorusMesh& mesh, const LieAlgebra& alg, const std::vector<Eigen::MatrixXd>& omega,
                     const Eigen::MatrixXd& target, const Eigen::MatrixXd& initial, const FitOptions& options);

}  // namespace spencer
