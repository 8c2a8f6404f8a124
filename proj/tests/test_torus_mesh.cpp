#include "spencer/error.hpp"
#include "spencer/torus_mesh.hpp"

#include <doctest.h>

#include <cmath>
#include <numbers>
#include <random>

using namespace spencer;

namespace {
constexpr double kTwoPi = 2.0 * std::numbers::pi;
}

TEST_CASE("periodic cell counts") {
  const TorusMesh t2 = build_torus_mesh(2, {4, 4}, {kTwoPi, kTwoPi});
  CHECK(t2.cell_count(0) == 16);
  CHECK(t2.cell_count(1) == 32);
  CHECK(t2.cell_count(2) == 16);
  const TorusMesh t2r = build_torus_mesh(2, {5, 3});
  CHECK(t2r.cell_count(0) == 15);
  CHECK(t2r.cell_count(1) == 30);
  const TorusMesh t1 = build_torus_mesh(1, {8});
  CHECK(t1.cell_count(0) == 8);
  CHECK(t1.cell_count(1) == 8);
}

TEST_CASE("resolution below 3 is rejected") {
  try {
    build_torus_mesh(2, {2, 4});
    FAIL("expected ResolutionTooSmall");
  } catch (const Error& e) {
    CHECK(e.code() == ErrorCode::ResolutionTooSmall);
  }
}

TEST_CASE("incidence algebra: d d = 0 and d of constants vanishes") {
  std::mt19937_64 rng(4);
  std::normal_distribution<double> n;
  for (const auto& mesh : {build_torus_mesh(2, {4, 4}), build_torus_mesh(2, {7, 5}), build_torus_mesh(2, {3, 3})}) {
    const SparseMatrix dd = mesh.derivative(1) * mesh.derivative(0);
    CHECK(dd.norm() == 0.0);
    const Eigen::VectorXd ones = Eigen::VectorXd::Ones(static_cast<Eigen::Index>(mesh.cell_count(0)));
    CHECK(exterior_derivative(mesh, 0, ones).norm() == 0.0);
    Eigen::VectorXd u(static_cast<Eigen::Index>(mesh.cell_count(0)));
    for (Eigen::Index i = 0; i < u.size(); ++i) u[i] = n(rng);
    CHECK(exterior_derivative(mesh, 1, exterior_derivative(mesh, 0, u)).norm() < 1e-13);
    for (int k = 0; k <= 2; ++k) CHECK(mesh.cell_volume(k).minCoeff() > 0.0);
  }
  CHECK_THROWS_AS(exterior_derivative(build_torus_mesh(1, {8}), 1, Eigen::VectorXd::Zero(8)), Error);
}

TEST_CASE("circle derivative is the forward difference") {
  const TorusMesh t1 = build_torus_mesh(1, {8});
  Eigen::VectorXd u(8);
  for (int i = 0; i < 8; ++i) u[i] = std::sin(kTwoPi * i / 8.0);
  const Eigen::VectorXd du = exterior_derivative(t1, 0, u);
  for (int i = 0; i < 8; ++i) CHECK(du[i] == doctest::Approx(u[(i + 1) % 8] - u[i]));
}

TEST_CASE("face boundary orientation on T^2") {
  const TorusMesh m = build_torus_mesh(2, {4, 4});
  // x(i,j) = i + 4j, y(i,j) = 16 + i + 4j; face (1,2) = 9
  const SparseMatrix& d1 = m.derivative(1);
  CHECK(d1.coeff(9, 1 + 4 * 2) == 1.0);
  CHECK(d1.coeff(9, 16 + 2 + 4 * 2) == 1.0);
  CHECK(d1.coeff(9, 1 + 4 * 3) == -1.0);
  CHECK(d1.coeff(9, 16 + 1 + 4 * 2) == -1.0);
}

TEST_CASE("mass matrices") {
  const TorusMesh m = build_torus_mesh(2, {4, 4}, {kTwoPi, kTwoPi});
  const double h = kTwoPi / 4.0;
  const MassMatrix one = mass_matrix(m, 0, [](const Point&) { return 1.0; });
  for (Eigen::Index i = 0; i < one.diagonal.size(); ++i) CHECK(one.diagonal[i] == doctest::Approx(h * h));
  for (int k = 0; k <= 2; ++k) {
    const MassMatrix a = mass_matrix(m, k, [](const Point&) { return 1.0; });
    const MassMatrix b = mass_matrix(m, k, [](const Point&) { return 3.0; });
    CHECK((b.diagonal - 3.0 * a.diagonal).norm() < 1e-13);
  }
  auto w = [](const Point& x) { return 1.0 + std::sin(x[0]) * std::sin(x[0]); };
  for (int k = 0; k <= 2; ++k) {
    const MassMatrix mm = mass_matrix(m, k, w);
    for (std::size_t c = 0; c < m.cell_count(k); ++c) {
      // barycenters by hand: vertices at (i h, j h); x-edges shifted by h/2 in x; y-edges in y; faces in both
      const std::size_t local = k == 1 ? c % 16 : c;
      const double i = static_cast<double>(local % 4), j = static_cast<double>(local / 4);
      double x = i * h;
      if ((k == 1 && c < 16) || k == 2) x += 0.5 * h;
      const double y = j * h + ((k == 1 && c >= 16) || k == 2 ? 0.5 * h : 0.0);
      CHECK(m.barycenter(k, c)[0] == doctest::Approx(x));
      CHECK(m.barycenter(k, c)[1] == doctest::Approx(y));
      CHECK(mm.diagonal[static_cast<Eigen::Index>(c)] ==
            doctest::Approx(w(Point(x, y)) * m.cell_volume(k)[static_cast<Eigen::Index>(c)]));
    }
  }
  CHECK_THROWS_AS(mass_matrix(m, 1, [](const Point&) { return -1.0; }), Error);
}

TEST_CASE("Hodge-star cell volumes") {
  const TorusMesh m = build_torus_mesh(2, {4, 8}, {1.0, 2.0});
  const double h1 = 0.25, h2 = 0.25;
  CHECK(m.cell_volume(0)[0] == doctest::Approx(h1 * h2));
  CHECK(m.cell_volume(1)[0] == doctest::Approx(h2 / h1));
  CHECK(m.cell_volume(1)[40] == doctest::Approx(h1 / h2));
  CHECK(m.cell_volume(2)[0] == doctest::Approx(1.0 / (h1 * h2)));
  const TorusMesh c = build_torus_mesh(1, {10}, {5.0});
  CHECK(c.cell_volume(0)[3] == doctest::Approx(0.5));
  CHECK(c.cell_volume(1)[3] == doctest::Approx(2.0));
}

TEST_CASE("half-spacing lattice carries every barycenter") {
  const TorusMesh m = build_torus_mesh(2, {5, 4});
  CHECK(m.half_grid_size() == 80);
  for (int k = 0; k <= 2; ++k)
    for (std::size_t c = 0; c < m.cell_count(k); ++c) {
      const HalfGridIndex g = m.half_grid_index(k, c);
      CHECK((m.half_grid_position(g) - m.barycenter(k, c)).norm() < 1e-12);
    }
  CHECK(m.half_grid_linear({-1, 0}) == m.half_grid_linear({9, 0}));
}

TEST_CASE("Betti numbers") {
  const auto t2 = betti_reference(build_torus_mesh(2, {4, 4}));
  CHECK(t2 == std::vector<int>{1, 2, 1});
  CHECK(t2[0] - t2[1] + t2[2] == 0);
  CHECK(betti_reference(build_torus_mesh(1, {8})) == std::vector<int>{1, 1});
}

TEST_CASE("unit-weight graph Laplacian has constant kernel") {
  const TorusMesh m = build_torus_mesh(2, {6, 6});
  const SparseMatrix& d0 = m.derivative(0);
  const Eigen::MatrixXd k = Eigen::MatrixXd(d0.transpose() * m.cell_volume(1).asDiagonal() * d0);
  Eigen::SelfAdjointEigenSolver<Eigen::MatrixXd> eig(k);
  CHECK(std::abs(eig.eigenvalues()[0]) < 1e-12);
  CHECK(eig.eigenvalues()[1] > 1e-3);
  CHECK((k * Eigen::VectorXd::Ones(36)).norm() < 1e-12);
}
