#pragma once

#include <Eigen/Dense>

#include <string>
#include <vector>

namespace spencer {

/// Element of g* written in the dual of the raw structure-constant basis.
struct DualVector {
  Eigen::VectorXd coeffs;

  DualVector() = default;
  explicit DualVector(Eigen::VectorXd c) : coeffs(std::move(c)) {}

  static DualVector zero(int dim) { return DualVector(Eigen::VectorXd::Zero(dim)); }
  static DualVector basis(int dim, int i) { return DualVector(Eigen::VectorXd::Unit(dim, i)); }

  int dim() const { return static_cast<int>(coeffs.size()); }
  double pair(const Eigen::VectorXd& x) const { return coeffs.dot(x); }
};

/// Finite-dimensional compact semisimple Lie algebra given by structure
/// constants [e_i, e_j] = sum_k c(i,j,k) e_k.
///
/// Construction validates antisymmetry, the Jacobi identity and negative
/// definiteness of the Killing form. Immutable afterwards.
class LieAlgebra {
 public:
  static constexpr double kIdentityTolerance = 1e-10;

  /// `constants` is row-major over (i, j, k), length dim^3.
  LieAlgebra(int dim, std::vector<double> constants, std::string name = "custom");

  int dim() const { return dim_; }
  const std::string& name() const { return name_; }

  double c(int i, int j, int k) const { return constants_[(static_cast<std::size_t>(i) * dim_ + j) * dim_ + k]; }
  const std::vector<double>& structure_constants() const { return constants_; }

  /// B(X,Y) = tr(ad_X ad_Y) in the raw basis.
  const Eigen::MatrixXd& killing() const { return killing_; }
  /// T with T^T (-B) T = I.
  const Eigen::MatrixXd& onb_transform() const { return onb_; }
  /// (-B)^{-1}, the Gram matrix of the dual norm on g*.
  const Eigen::MatrixXd& dual_gram() const { return dual_gram_; }

  Eigen::VectorXd bracket(const Eigen::VectorXd& x, const Eigen::VectorXd& y) const;
  /// Matrix of ad_X acting on column vectors.
  Eigen::MatrixXd ad(const Eigen::VectorXd& x) const;

  /// <ad*_X mu, Y> = -<mu, [X, Y]>.
  DualVector coadjoint(const Eigen::VectorXd& x, const DualVector& mu) const;
  /// Matrix of mu -> ad*_X mu on dual coefficient vectors (= -ad_X^T).
  Eigen::MatrixXd coadjoint_matrix(const Eigen::VectorXd& x) const;

  /// <X,Y>_g = -B(X,Y).
  double killing_inner(const Eigen::VectorXd& x, const Eigen::VectorXd& y) const;
  double dual_norm_squared(const DualVector& mu) const;
  double dual_inner(const DualVector& a, const DualVector& b) const;

  /// Max over basis triples of the Jacobi residual norm.
  double jacobi_residual() const;
  /// Max over basis triples of |<[Z,X],Y> + <X,[Z,Y]>|.
  double ad_invariance_residual() const;

 private:
  int dim_;
  std::vector<double> constants_;
  std::string name_;
  Eigen::MatrixXd killing_;
  Eigen::MatrixXd onb_;
  Eigen::MatrixXd dual_gram_;
};

/// so(3) with c(i,j,k) = eps_ijk, scaled by `scale`.
LieAlgebra make_so3(double scale = 1.0);
/// su(2) realised with real constants c(i,j,k) = 2 eps_ijk.
LieAlgebra make_su2();
/// so(4) = so(3) + so(3).
LieAlgebra make_so4();

/// One of "so3", "su2", "so4".
LieAlgebra builtin_algebra(const std::string& name);
std::vector<std::string> builtin_algebra_names();

/// Plain-text array file: the dimension d followed by d^3 numbers in
/// row-major (i, j, k) order. '#' starts a comment.
LieAlgebra load_structure_constants(const std::string& path);

}  // namespace spencer
