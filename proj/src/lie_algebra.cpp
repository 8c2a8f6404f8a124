#include "spencer/lie_algebra.hpp"

#include "spencer/error.hpp"

#include <cmath>
#include <fstream>
#include <sstream>

namespace spencer {

LieAlgebra::LieAlgebra(int dim, std::vector<double> constants, std::string name)
    : dim_(dim), constants_(std::move(constants)), name_(std::move(name)) {
  if (dim_ < 1) throw Error(ErrorCode::DimensionMismatch, "algebra dimension must be positive");
  const std::size_t expected = static_cast<std::size_t>(dim_) * dim_ * dim_;
  if (constants_.size() != expected) {
    throw Error(ErrorCode::DimensionMismatch,
                "expected " + std::to_string(expected) + " structure constants, got " +
                    std::to_string(constants_.size()));
  }
  for (double v : constants_) {
    if (!std::isfinite(v)) throw Error(ErrorCode::DimensionMismatch, "non-finite structure constant");
  }

  for (int i = 0; i < dim_; ++i)
    for (int j = 0; j < dim_; ++j)
      for (int k = 0; k < dim_; ++k)
        if (std::abs(c(i, j, k) + c(j, i, k)) > kIdentityTolerance)
          throw Error(ErrorCode::JacobiViolated, "structure constants are not antisymmetric");

  const double jacobi = jacobi_residual();
  if (jacobi > kIdentityTolerance) {
    throw Error(ErrorCode::JacobiViolated, "Jacobi residual " + std::to_string(jacobi));
  }

  // B(e_i, e_j) = sum_{k,l} c(i,k,l) c(j,l,k)
  killing_ = Eigen::MatrixXd::Zero(dim_, dim_);
  for (int i = 0; i < dim_; ++i)
    for (int j = 0; j < dim_; ++j) {
      double acc = 0.0;
      for (int k = 0; k < dim_; ++k)
        for (int l = 0; l < dim_; ++l) acc += c(i, k, l) * c(j, l, k);
      killing_(i, j) = acc;
    }

  const Eigen::MatrixXd neg = -killing_;
  Eigen::SelfAdjointEigenSolver<Eigen::MatrixXd> eig(neg);
  const double scale = std::max(1.0, eig.eigenvalues().cwiseAbs().maxCoeff());
  if (eig.eigenvalues().minCoeff() <= 1e-12 * scale) {
    throw Error(ErrorCode::KillingDegenerate,
                "-B is not positive definite (min eigenvalue " + std::to_string(eig.eigenvalues().minCoeff()) +
                    "); algebra is not compact semisimple");
  }
  Eigen::LLT<Eigen::MatrixXd> llt(neg);
  // -B = L L^T  =>  T = L^{-T} gives T^T (-B) T = I
  const Eigen::MatrixXd l = llt.matrixL();
  onb_ = l.transpose().triangularView<Eigen::Upper>().solve(Eigen::MatrixXd::Identity(dim_, dim_));
  dual_gram_ = llt.solve(Eigen::MatrixXd::Identity(dim_, dim_));
}

Eigen::VectorXd LieAlgebra::bracket(const Eigen::VectorXd& x, const Eigen::VectorXd& y) const {
  Eigen::VectorXd out = Eigen::VectorXd::Zero(dim_);
  for (int i = 0; i < dim_; ++i) {
    if (x[i] == 0.0) continue;
    for (int j = 0; j < dim_; ++j) {
      const double xy = x[i] * y[j];
      if (xy == 0.0) continue;
      for (int k = 0; k < dim_; ++k) out[k] += xy * c(i, j, k);
    }
  }
  return out;
}

Eigen::MatrixXd LieAlgebra::ad(const Eigen::VectorXd& x) const {
  // column j = [x, e_j]
  Eigen::MatrixXd m = Eigen::MatrixXd::Zero(dim_, dim_);
  for (int i = 0; i < dim_; ++i) {
    if (x[i] == 0.0) continue;
    for (int j = 0; j < dim_; ++j)
      for (int k = 0; k < dim_; ++k) m(k, j) += x[i] * c(i, j, k);
  }
  return m;
}

Eigen::MatrixXd LieAlgebra::coadjoint_matrix(const Eigen::VectorXd& x) const { return -ad(x).transpose(); }

DualVector LieAlgebra::coadjoint(const Eigen::VectorXd& x, const DualVector& mu) const {
  return DualVector(coadjoint_matrix(x) * mu.coeffs);
}

double LieAlgebra::killing_inner(const Eigen::VectorXd& x, const Eigen::VectorXd& y) const {
  return -x.dot(killing_ * y);
}

double LieAlgebra::dual_norm_squared(const DualVector& mu) const { return mu.coeffs.dot(dual_gram_ * mu.coeffs); }

double LieAlgebra::dual_inner(const DualVector& a, const DualVector& b) const {
  return a.coeffs.dot(dual_gram_ * b.coeffs);
}

double LieAlgebra::jacobi_residual() const {
  double worst = 0.0;
  for (int i = 0; i < dim_; ++i)
    for (int j = 0; j < dim_; ++j)
      for (int k = 0; k < dim_; ++k) {
        const Eigen::VectorXd ei = Eigen::VectorXd::Unit(dim_, i);
        const Eigen::VectorXd ej = Eigen::VectorXd::Unit(dim_, j);
        const Eigen::VectorXd ek = Eigen::VectorXd::Unit(dim_, k);
        const Eigen::VectorXd r =
            bracket(ei, bracket(ej, ek)) + bracket(ej, bracket(ek, ei)) + bracket(ek, bracket(ei, ej));
        worst = std::max(worst, r.norm());
      }
  return worst;
}

double LieAlgebra::ad_invariance_residual() const {
  double worst = 0.0;
  for (int z = 0; z < dim_; ++z)
    for (int x = 0; x < dim_; ++x)
      for (int y = 0; y < dim_; ++y) {
        const Eigen::VectorXd ez = Eigen::VectorXd::Unit(dim_, z);
        const Eigen::VectorXd ex = Eigen::VectorXd::Unit(dim_, x);
        const Eigen::VectorXd ey = Eigen::VectorXd::Unit(dim_, y);
        worst = std::max(worst, std::abs(killing_inner(bracket(ez, ex), ey) + killing_inner(ex, bracket(ez, ey))));
      }
  return worst;
}

namespace {

double levi_civita(int i, int j, int k) {
  if (i == j || j == k || i == k) return 0.0;
  return ((j - i + 3) % 3 == 1) ? 1.0 : -1.0;
}

std::vector<double> epsilon_constants(double scale) {
  std::vector<double> c(27, 0.0);
  for (int i = 0; i < 3; ++i)
    for (int j = 0; j < 3; ++j)
      for (int k = 0; k < 3; ++k) c[(i * 3 + j) * 3 + k] = scale * levi_civita(i, j, k);
  return c;
}

}  // namespace

LieAlgebra make_so3(double scale) { return LieAlgebra(3, epsilon_constants(scale), "so3"); }

LieAlgebra make_su2() { return LieAlgebra(3, epsilon_constants(2.0), "su2"); }

LieAlgebra make_so4() {
  std::vector<double> c(216, 0.0);
  const auto eps = epsilon_constants(1.0);
  for (int block = 0; block < 2; ++block)
    for (int i = 0; i < 3; ++i)
      for (int j = 0; j < 3; ++j)
        for (int k = 0; k < 3; ++k) {
          const int o = 3 * block;
          c[((o + i) * 6 + (o + j)) * 6 + (o + k)] = eps[(i * 3 + j) * 3 + k];
        }
  return LieAlgebra(6, std::move(c), "so4");
}

std::vector<std::string> builtin_algebra_names() { return {"so3", "su2", "so4"}; }

LieAlgebra builtin_algebra(const std::string& name) {
  if (name == "so3") return make_so3();
  if (name == "su2") return make_su2();
  if (name == "so4") return make_so4();
  throw Error(ErrorCode::ConfigError, "unknown built-in algebra '" + name + "'");
}

LieAlgebra load_structure_constants(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw Error(ErrorCode::IoError, "cannot open structure constants file " + path);
  std::stringstream cleaned;
  std::string line;
  while (std::getline(in, line)) {
    if (auto hash = line.find('#'); hash != std::string::npos) line.erase(hash);
    cleaned << line << '\n';
  }
  int dim = 0;
  if (!(cleaned >> dim) || dim < 1) throw Error(ErrorCode::ConfigError, "bad dimension header in " + path);
  std::vector<double> values;
  double v = 0.0;
  while (cleaned >> v) values.push_back(v);
  if (!cleaned.eof()) throw Error(ErrorCode::ConfigError, "non-numeric token in " + path);
  return LieAlgebra(dim, std::move(values), path);
}

}  // namespace spencer
