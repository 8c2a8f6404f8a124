#include "spencer/error.hpp"
#include "spencer/pair_field.hpp"
#include "support.hpp"

#include <doctest.h>

#include <cmath>
#include <numbers>
#include <random>

using namespace spencer;
using testing::e;

namespace {

constexpr double kPi = std::numbers::pi;

template <class F>
ErrorCode code_of(F&& f) {
  try {
    f();
  } catch (const Error& err) {
    return err.code();
  }
  FAIL("expected an exception");
  return ErrorCode::ConfigError;
}

// Coadjoint straight from its definition: <ad*_X mu, e_j> = -<mu, [X, e_j]>.
Eigen::VectorXd coadjoint_oracle(const LieAlgebra& alg, const Eigen::VectorXd& x, const Eigen::VectorXd& mu) {
  Eigen::VectorXd out(alg.dim());
  for (int j = 0; j < alg.dim(); ++j) {
    double s = 0.0;
    for (int i = 0; i < alg.dim(); ++i)
      for (int k = 0; k < alg.dim(); ++k) s += x[i] * alg.c(i, j, k) * mu[k];
    out[j] = -s;
  }
  return out;
}

// Gap from principal angles: D = ker(phi_0), D' = D minus (D cap V), angle to V.
double gap_oracle(const Eigen::RowVectorXd& row, int n, int d) {
  const int m = n + d;
  Eigen::JacobiSVD<Eigen::MatrixXd> svd(row, Eigen::ComputeFullV);
  const int rank = row.norm() > 0 ? 1 : 0;
  const Eigen::MatrixXd dbasis = svd.matrixV().rightCols(m - rank);

  // D cap V = {(0, v) : row_v . v = 0}
  const Eigen::RowVectorXd rv = row.tail(d);
  Eigen::JacobiSVD<Eigen::MatrixXd> svd_v(rv, Eigen::ComputeFullV);
  const int rank_v = rv.norm() > 0 ? 1 : 0;
  Eigen::MatrixXd cap = Eigen::MatrixXd::Zero(m, d - rank_v);
  cap.bottomRows(d) = svd_v.matrixV().rightCols(d - rank_v);

  Eigen::MatrixXd rest = dbasis - cap * (cap.transpose() * dbasis);
  Eigen::JacobiSVD<Eigen::MatrixXd> svd_r(rest, Eigen::ComputeThinU);
  int r = 0;
  for (Eigen::Index i = 0; i < svd_r.singularValues().size(); ++i)
    if (svd_r.singularValues()[i] > 1e-10) ++r;
  const Eigen::MatrixXd q = svd_r.matrixU().leftCols(r);
  const Eigen::MatrixXd pv = q.bottomRows(d);
  const double cos_theta = Eigen::JacobiSVD<Eigen::MatrixXd>(pv).singularValues()[0];
  return std::sqrt(std::max(0.0, 2.0 - 2.0 * cos_theta));
}

std::vector<VectorField> zero_omega(int n, int d) {
  return std::vector<VectorField>(static_cast<std::size_t>(n), testing::constant(Eigen::VectorXd::Zero(d)));
}

}  // namespace

TEST_CASE("constant lambda: weights, flat curvature, zero Cartan residual") {
  auto mesh = testing::torus(2, 8);
  auto so3 = testing::algebra("so3");
  auto f = testing::constant_field(mesh, so3, e(3, 2));
  const Eigen::VectorXd w = weight_constraint(*f);
  REQUIRE(w.size() == 64);
  CHECK(w.minCoeff() == doctest::Approx(1.5).epsilon(1e-14));
  CHECK(w.maxCoeff() == doctest::Approx(1.5).epsilon(1e-14));
  CHECK((weight_constraint_enhanced(*f) - w).cwiseAbs().maxCoeff() < 1e-14);
  CHECK((weight_curvature(*f).array() - 1.0).abs().maxCoeff() < 1e-14);
  CHECK(curvature(*f).cwiseAbs().maxCoeff() < 1e-14);
  CHECK(cartan_residual(*f).max < 1e-14);

  auto f2 = testing::constant_field(mesh, so3, 2.0 * e(3, 2));
  CHECK(weight_constraint(*f2).maxCoeff() == doctest::Approx(3.0).epsilon(1e-14));

  auto su2 = testing::algebra("su2");
  auto g = testing::constant_field(mesh, su2, e(3, 2));
  CHECK(weight_constraint(*g).maxCoeff() == doctest::Approx(1.125).epsilon(1e-14));
}

TEST_CASE("vanishing lambda is rejected") {
  auto mesh = testing::torus(2, 4);
  auto so3 = testing::algebra("so3");
  CHECK(code_of([&] { testing::constant_field(mesh, so3, Eigen::VectorXd::Zero(3)); }) == ErrorCode::DegenerateLambda);
  // lambda vanishing at x = 3 pi / 2 only (a vertex for N = 4)
  auto vortex = [](const Point& p) { return ((1.0 + std::sin(p[0])) * e(3, 0)).eval(); };
  CHECK(code_of([&] { PairField::sample(mesh, so3, vortex, zero_omega(2, 3)); }) == ErrorCode::DegenerateLambda);
}

TEST_CASE("vortex profile weight range") {
  auto mesh = testing::torus(2, 16);
  auto so3 = testing::algebra("so3");
  auto vortex = [](const Point& p) { return ((1.0 + 0.5 * std::sin(p[0])) * e(3, 0)).eval(); };
  const PairField f = PairField::sample(mesh, so3, vortex, zero_omega(2, 3));
  const Eigen::VectorXd w = weight_constraint(f);
  // 1 + (1 + sin x / 2)^2 / 2 on x = 2 pi i / 16, which hits sin = +-1.
  CHECK(w.minCoeff() == doctest::Approx(1.125).epsilon(1e-13));
  CHECK(w.maxCoeff() == doctest::Approx(2.125).epsilon(1e-13));
  for (std::size_t v = 0; v < mesh->cell_count(0); ++v) {
    const double x = mesh->barycenter(0, v)[0];
    const double c = 1.0 + 0.5 * std::sin(x);
    CHECK(w[static_cast<Eigen::Index>(v)] == doctest::Approx(1.0 + 0.5 * c * c).epsilon(1e-13));
  }
}

TEST_CASE("enhanced weight converges to the continuum gradient term") {
  // w^enh - w = (cos x / 2)^2 ||e3*||^2 = cos^2 x / 8 for so3
  auto so3 = testing::algebra("so3");
  auto profile = [](const Point& p) { return ((1.0 + 0.5 * std::sin(p[0])) * e(3, 2)).eval(); };
  std::vector<double> errors;
  for (int n : {8, 16, 32}) {
    auto mesh = testing::torus(2, n);
    const PairField f = PairField::sample(mesh, so3, profile, zero_omega(2, 3));
    const Eigen::VectorXd diff = weight_constraint_enhanced(f) - weight_constraint(f);
    double err = 0.0;
    for (std::size_t v = 0; v < mesh->cell_count(0); ++v) {
      const double c = std::cos(mesh->barycenter(0, v)[0]);
      err = std::max(err, std::abs(diff[static_cast<Eigen::Index>(v)] - c * c / 8.0));
    }
    errors.push_back(err);
  }
  CHECK(errors.back() < 2e-3);
  CHECK(errors[0] / errors[1] > 3.5);
  CHECK(errors[1] / errors[2] > 3.5);
}

TEST_CASE("curvature of constant and abelian connections") {
  auto so3 = testing::algebra("so3");
  auto mesh = testing::torus(2, 8);
  auto f = testing::constant_field(mesh, so3, e(3, 2), {e(3, 0), e(3, 1)});
  const Eigen::MatrixXd omega = curvature(*f);
  REQUIRE(omega.cols() == 64);
  for (Eigen::Index c = 0; c < omega.cols(); ++c) CHECK((omega.col(c) - e(3, 2)).norm() < 1e-14);
  // ||e3||^2 = 2 and no derivative: kappa = 3
  CHECK((weight_curvature(*f).array() - 3.0).abs().maxCoeff() < 1e-13);

  // omega_1 = sin(y) e3, omega_2 = 0: Omega_12 = -cos(y) e3
  std::vector<double> errors;
  for (int n : {8, 16, 32}) {
    auto m = testing::torus(2, n);
    std::vector<VectorField> om{[](const Point& p) { return (std::sin(p[1]) * e(3, 2)).eval(); },
                                testing::constant(Eigen::VectorXd::Zero(3))};
    const PairField g = PairField::sample(m, so3, testing::constant(e(3, 2)), om);
    const Eigen::MatrixXd cur = curvature(g);
    double err = 0.0;
    for (std::size_t face = 0; face < m->cell_count(2); ++face) {
      const double y = m->barycenter(2, face)[1];
      err = std::max(err, (cur.col(static_cast<Eigen::Index>(face)) + std::cos(y) * e(3, 2)).norm());
    }
    errors.push_back(err);
  }
  CHECK(errors[0] / errors[1] > 3.5);
  CHECK(errors[1] / errors[2] > 3.5);

  auto line = testing::torus(1, 8);
  const PairField h = PairField::sample(line, so3, testing::constant(e(3, 2)), zero_omega(1, 3));
  CHECK(code_of([&] { curvature(h); }) == ErrorCode::DimensionUnsupported);
}

TEST_CASE("Cartan residual against the coadjoint definition") {
  auto so3 = testing::algebra("so3");
  auto mesh = testing::torus(2, 8);
  // Abelian connection along the isotropy of e3*: compatible.
  auto compatible = testing::constant_field(mesh, so3, e(3, 2), {0.7 * e(3, 2), Eigen::VectorXd::Zero(3)});
  CHECK(cartan_residual(*compatible).max < 1e-14);

  auto f = testing::constant_field(mesh, so3, e(3, 2), {e(3, 0), Eigen::VectorXd::Zero(3)});
  const Eigen::VectorXd r = coadjoint_oracle(*so3, e(3, 0), e(3, 2));
  const double expected = std::sqrt(r.dot(so3->dual_gram() * r));
  CHECK(expected == doctest::Approx(std::sqrt(0.5)).epsilon(1e-14));
  const CartanResidual res = cartan_residual(*f);
  CHECK(res.max == doctest::Approx(expected).epsilon(1e-13));
  CHECK(res.per_vertex.minCoeff() == doctest::Approx(expected).epsilon(1e-13));
  // L2 norm over the torus of area 4 pi^2
  CHECK(res.l2 == doctest::Approx(expected * 2.0 * kPi).epsilon(1e-12));
}

TEST_CASE("Ad-equivariance of the scalar invariants") {
  auto so3 = testing::algebra("so3");
  auto mesh = testing::torus(2, 8);
  auto lam = [](const Point& p) {
    Eigen::Vector3d v(1.0 + 0.3 * std::cos(p[0]), 0.2 * std::sin(p[1]), 0.8);
    return Eigen::VectorXd(v);
  };
  std::vector<VectorField> om{[](const Point& p) { return Eigen::VectorXd(Eigen::Vector3d(0.1, std::sin(p[1]), 0.0)); },
                              [](const Point& p) { return Eigen::VectorXd(Eigen::Vector3d(std::cos(p[0]), 0.0, 0.3)); }};
  const PairField f = PairField::sample(mesh, so3, lam, om);
  // Rotation about a generic axis; for so3 Ad and Ad* both act by R in these coordinates.
  const Eigen::Matrix3d rot = Eigen::AngleAxisd(0.9, Eigen::Vector3d(1, 2, 3).normalized()).toRotationMatrix();
  const PairField g = f.transformed(rot, rot);
  CHECK((weight_constraint(f) - weight_constraint(g)).cwiseAbs().maxCoeff() < 1e-12);
  CHECK((weight_constraint_enhanced(f) - weight_constraint_enhanced(g)).cwiseAbs().maxCoeff() < 1e-12);
  CHECK((weight_curvature(f) - weight_curvature(g)).cwiseAbs().maxCoeff() < 1e-12);
  CHECK((cartan_residual(f).per_vertex - cartan_residual(g).per_vertex).cwiseAbs().maxCoeff() < 1e-12);
}

TEST_CASE("transversality margin and gap") {
  auto so3 = testing::algebra("so3");
  auto line = testing::torus(1, 8);
  const PairField f = PairField::sample(line, so3, testing::constant(e(3, 2)), zero_omega(1, 3));
  // phi = [[0, 0, 0, 1/sqrt2], [1, 0, 0, 0]]
  Transversality t = transversality_margin(f, 0, Eigen::VectorXd::Ones(1));
  CHECK(t.margin == doctest::Approx(std::sqrt(0.5)).epsilon(1e-14));
  CHECK(t.gap == doctest::Approx(std::sqrt(2.0)).epsilon(1e-14));
  CHECK(code_of([&] { transversality_margin(f, 0, Eigen::VectorXd::Zero(1)); }) == ErrorCode::ZeroCovector);

  for (double c : {0.5, 2.0}) {
    const PairField g = PairField::sample(line, so3, testing::constant((c * e(3, 2)).eval()), zero_omega(1, 3));
    CHECK(transversality_margin(g, 0, Eigen::VectorXd::Ones(1)).margin ==
          doctest::Approx(std::min(c / std::sqrt(2.0), 1.0)).epsilon(1e-14));
  }

  // Horizontal pairing <lambda, omega> != 0: compare with a principal-angle computation.
  std::mt19937_64 rng(11);
  auto mesh = testing::torus(2, 4);
  for (int trial = 0; trial < 20; ++trial) {
    const Eigen::VectorXd lam = testing::random_vector(3, rng);
    const std::vector<Eigen::VectorXd> om{testing::random_vector(3, rng), testing::random_vector(3, rng)};
    auto g = testing::constant_field(mesh, so3, lam, om);
    Eigen::RowVectorXd row(5);
    row << lam.dot(om[0]), lam.dot(om[1]), (so3->onb_transform().transpose() * lam).transpose();
    const Transversality tt = transversality_margin(*g, 3, testing::random_vector(2, rng));
    CHECK(tt.gap == doctest::Approx(gap_oracle(row, 2, 3)).epsilon(1e-9));
    CHECK(tt.margin > 0.0);
  }
  const TransversalitySummary s = transversality_summary(f);
  CHECK(s.min_margin == doctest::Approx(std::sqrt(0.5)).epsilon(1e-14));
}

TEST_CASE("compatibility functional gradient matches finite differences") {
  auto so3 = testing::algebra("so3");
  auto mesh = testing::torus(2, 4);
  std::mt19937_64 rng(5);
  const auto nv = static_cast<Eigen::Index>(mesh->cell_count(0));
  std::vector<Eigen::MatrixXd> omega;
  for (int a = 0; a < 2; ++a) omega.push_back(Eigen::MatrixXd::NullaryExpr(3, nv, [&] { return std::normal_distribution<>()(rng); }));
  const Eigen::MatrixXd target = Eigen::MatrixXd::NullaryExpr(3, nv, [&] { return std::normal_distribution<>()(rng); });
  const Eigen::MatrixXd lam = Eigen::MatrixXd::NullaryExpr(3, nv, [&] { return std::normal_distribution<>()(rng); });
  for (double alpha : {0.0, 0.7}) {
    const CompatibilityFunctional fn(*mesh, *so3, omega, target, alpha);
    const Eigen::MatrixXd grad = fn.gradient(lam);
    const double h = 1e-6;
    double worst = 0.0;
    for (Eigen::Index i = 0; i < lam.size(); ++i) {
      Eigen::MatrixXd p = lam, m = lam;
      p.data()[i] += h;
      m.data()[i] -= h;
      const double fd = (fn.value(p) - fn.value(m)) / (2.0 * h);
      worst = std::max(worst, std::abs(fd - grad.data()[i]) / (1.0 + std::abs(fd)));
    }
    CHECK(worst < 1e-6);
  }
  const CompatibilityFunctional fn(*mesh, *so3, omega, target, 0.0);
  CHECK(fn.value(lam) == doctest::Approx(0.5 * std::pow(fn.residual_l2(lam), 2)).epsilon(1e-12));
}

TEST_CASE("fitting lambda") {
  auto so3 = testing::algebra("so3");
  auto mesh = testing::torus(2, 8);
  const auto nv = static_cast<Eigen::Index>(mesh->cell_count(0));
  const std::vector<Eigen::MatrixXd> flat(2, Eigen::MatrixXd::Zero(3, nv));
  const Eigen::MatrixXd mu = e(3, 2).replicate(1, nv);

  SUBCASE("already optimal") {
    FitOptions opts;
    opts.alpha = 1.0;
    const FitResult r = fit_lambda(*mesh, *so3, flat, mu, mu, opts);
    CHECK(r.iterations == 0);
    CHECK(r.final_objective == 0.0);
  }

  std::mt19937_64 rng(9);
  const Eigen::MatrixXd init = mu + 0.5 * Eigen::MatrixXd::NullaryExpr(3, nv, [&] { return std::normal_distribution<>()(rng); });

  SUBCASE("monotone descent, strong alignment") {
    FitOptions opts;
    opts.alpha = 10.0;
    opts.tolerance = 1e-10;
    opts.max_iterations = 20000;
    const FitResult r = fit_lambda(*mesh, *so3, flat, mu, init, opts);
    for (std::size_t i = 1; i < r.objective_trace.size(); ++i) CHECK(r.objective_trace[i] <= r.objective_trace[i - 1]);
    const CompatibilityFunctional fn(*mesh, *so3, flat, mu, opts.alpha);
    CHECK(fn.alignment_distance(r.lambda) < 1e-4);
    CHECK(r.final_residual < 1e-4);
  }

  SUBCASE("no alignment term") {
    FitOptions opts;
    opts.alpha = 0.0;
    opts.tolerance = 1e-10;
    opts.max_iterations = 20000;
    const FitResult r = fit_lambda(*mesh, *so3, flat, mu, init, opts);
    CHECK(r.final_residual < 1e-6);
  }

  SUBCASE("shape checks") {
    CHECK(code_of([&] { fit_lambda(*mesh, *so3, flat, mu, Eigen::MatrixXd::Zero(3, 5), {}); }) == ErrorCode::ShapeMismatch);
    FitOptions bad;
    bad.alpha = -1.0;
    CHECK(code_of([&] { fit_lambda(*mesh, *so3, flat, mu, mu, bad); }) == ErrorCode::ConfigError);
  }
}
