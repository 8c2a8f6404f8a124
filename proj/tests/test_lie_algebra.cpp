#include "spencer/error.hpp"
#include "spencer/lie_algebra.hpp"

#include <doctest.h>

#include <filesystem>
#include <fstream>
#include <random>

using namespace spencer;

namespace {

// B_ij = tr(ad_i ad_j) with (ad_i)_{kl} = c(i, l, k), built straight from the constants.
Eigen::MatrixXd killing_by_matrix_product(const LieAlgebra& alg) {
  const int d = alg.dim();
  std::vector<Eigen::MatrixXd> ad(static_cast<std::size_t>(d), Eigen::MatrixXd::Zero(d, d));
  for (int i = 0; i < d; ++i)
    for (int k = 0; k < d; ++k)
      for (int l = 0; l < d; ++l) ad[static_cast<std::size_t>(i)](k, l) = alg.c(i, l, k);
  Eigen::MatrixXd b(d, d);
  for (int i = 0; i < d; ++i)
    for (int j = 0; j < d; ++j) b(i, j) = (ad[static_cast<std::size_t>(i)] * ad[static_cast<std::size_t>(j)]).trace();
  return b;
}

Eigen::VectorXd e(int d, int i) { return Eigen::VectorXd::Unit(d, i); }

}  // namespace

TEST_CASE("so3 Killing form is -2 I") {
  const LieAlgebra so3 = make_so3();
  const Eigen::MatrixXd oracle = killing_by_matrix_product(so3);
  CHECK((oracle + 2.0 * Eigen::MatrixXd::Identity(3, 3)).norm() < 1e-14);
  CHECK((so3.killing() - oracle).norm() < 1e-14);
}

TEST_CASE("scaled so3 Killing form is -2 s^2 I") {
  for (double s : {0.5, 3.0}) {
    const LieAlgebra alg = make_so3(s);
    CHECK((killing_by_matrix_product(alg) + 2.0 * s * s * Eigen::MatrixXd::Identity(3, 3)).norm() < 1e-12);
    CHECK((alg.killing() + 2.0 * s * s * Eigen::MatrixXd::Identity(3, 3)).norm() < 1e-12);
  }
}

TEST_CASE("built-in algebras satisfy the structural invariants") {
  for (const auto& name : builtin_algebra_names()) {
    CAPTURE(name);
    const LieAlgebra alg = builtin_algebra(name);
    const int d = alg.dim();
    for (int i = 0; i < d; ++i)
      for (int j = 0; j < d; ++j)
        for (int k = 0; k < d; ++k) CHECK(alg.c(i, j, k) == -alg.c(j, i, k));
    CHECK(alg.jacobi_residual() < 1e-12);
    CHECK(alg.ad_invariance_residual() < 1e-12);
    CHECK((alg.killing() - alg.killing().transpose()).norm() == 0.0);
    Eigen::SelfAdjointEigenSolver<Eigen::MatrixXd> eig(-alg.killing());
    CHECK(eig.eigenvalues().minCoeff() > 0.0);
    const Eigen::MatrixXd t = alg.onb_transform();
    CHECK((t.transpose() * (-alg.killing()) * t - Eigen::MatrixXd::Identity(d, d)).cwiseAbs().maxCoeff() < 1e-12);
    CHECK((killing_by_matrix_product(alg) - alg.killing()).norm() < 1e-12);
  }
}

TEST_CASE("su2 and so4 Killing forms") {
  CHECK((make_su2().killing() + 8.0 * Eigen::MatrixXd::Identity(3, 3)).norm() < 1e-12);
  CHECK((make_so4().killing() + 2.0 * Eigen::MatrixXd::Identity(6, 6)).norm() < 1e-12);
}

TEST_CASE("abelian constants are rejected as Killing-degenerate") {
  try {
    LieAlgebra(3, std::vector<double>(27, 0.0));
    FAIL("expected KillingDegenerate");
  } catch (const Error& err) {
    CHECK(err.code() == ErrorCode::KillingDegenerate);
  }
}

TEST_CASE("random antisymmetric constants violate Jacobi") {
  std::mt19937_64 rng(7);
  std::uniform_real_distribution<double> u(-1.0, 1.0);
  std::vector<double> c(27, 0.0);
  for (int i = 0; i < 3; ++i)
    for (int j = i + 1; j < 3; ++j)
      for (int k = 0; k < 3; ++k) {
        const double v = u(rng);
        c[static_cast<std::size_t>((i * 3 + j) * 3 + k)] = v;
        c[static_cast<std::size_t>((j * 3 + i) * 3 + k)] = -v;
      }
  try {
    LieAlgebra(3, c);
    FAIL("expected JacobiViolated");
  } catch (const Error& err) {
    CHECK(err.code() == ErrorCode::JacobiViolated);
  }
}

TEST_CASE("so3 brackets") {
  const LieAlgebra so3 = make_so3();
  CHECK((so3.bracket(e(3, 0), e(3, 1)) - e(3, 2)).norm() == 0.0);
  const Eigen::Vector3d x(0.3, -1.2, 2.0);
  CHECK(so3.bracket(x, x).norm() == 0.0);
  // linearity: [e1 + e2, e3] = [e1, e3] + [e2, e3] = -e2 + e1
  CHECK((so3.bracket(e(3, 0) + e(3, 1), e(3, 2)) - (e(3, 0) - e(3, 1))).norm() < 1e-15);
  // ad matrix columns are brackets with basis vectors
  const Eigen::MatrixXd ad = so3.ad(x);
  for (int j = 0; j < 3; ++j) CHECK((ad.col(j) - so3.bracket(x, e(3, j))).norm() < 1e-15);
}

TEST_CASE("coadjoint action matches its defining pairing") {
  const LieAlgebra so3 = make_so3();
  const DualVector mu = DualVector::basis(3, 2);
  const DualVector r = so3.coadjoint(e(3, 0), mu);
  CHECK(r.pair(e(3, 1)) == doctest::Approx(-1.0));
  std::mt19937_64 rng(11);
  std::normal_distribution<double> n;
  for (const auto& name : builtin_algebra_names()) {
    const LieAlgebra alg = builtin_algebra(name);
    const int d = alg.dim();
    Eigen::VectorXd x(d), m(d);
    for (int i = 0; i < d; ++i) {
      x[i] = n(rng);
      m[i] = n(rng);
    }
    const DualVector out = alg.coadjoint(x, DualVector(m));
    for (int j = 0; j < d; ++j) CHECK(out.pair(e(d, j)) == doctest::Approx(-m.dot(alg.bracket(x, e(d, j)))));
    CHECK((alg.coadjoint_matrix(x) * m - out.coeffs).norm() < 1e-12);
  }
  CHECK(so3.coadjoint(Eigen::Vector3d::Zero(), mu).coeffs.norm() == 0.0);
  CHECK(so3.coadjoint(e(3, 0), DualVector::zero(3)).coeffs.norm() == 0.0);
}

TEST_CASE("Killing inner product") {
  const LieAlgebra so3 = make_so3();
  CHECK(so3.killing_inner(e(3, 2), e(3, 2)) == doctest::Approx(2.0));
  CHECK(so3.killing_inner(e(3, 1), Eigen::Vector3d::Zero()) == 0.0);
  CHECK(so3.dual_norm_squared(DualVector::basis(3, 2)) == doctest::Approx(0.5));
  std::mt19937_64 rng(3);
  std::normal_distribution<double> n;
  for (int trial = 0; trial < 100; ++trial) {
    const Eigen::Vector3d x(n(rng), n(rng), n(rng));
    const Eigen::Vector3d y(n(rng), n(rng), n(rng));
    const double xy = so3.killing_inner(x, y);
    CHECK(xy * xy <= so3.killing_inner(x, x) * so3.killing_inner(y, y) * (1 + 1e-14));
  }
}

TEST_CASE("structure constants load from a text file") {
  const auto path = std::filesystem::temp_directory_path() / "spencer_so3_constants.txt";
  {
    std::ofstream out(path);
    out << "# so(3)\n3\n";
    const LieAlgebra so3 = make_so3();
    for (double v : so3.structure_constants()) out << v << ' ';
    out << '\n';
  }
  const LieAlgebra loaded = load_structure_constants(path.string());
  CHECK(loaded.dim() == 3);
  CHECK((loaded.killing() + 2.0 * Eigen::MatrixXd::Identity(3, 3)).norm() < 1e-14);
  std::filesystem::remove(path);
  CHECK_THROWS_AS(load_structure_constants(path.string()), Error);
  CHECK_THROWS_AS(builtin_algebra("se2"), Error);
}
