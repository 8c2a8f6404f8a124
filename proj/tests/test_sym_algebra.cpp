#include "spencer/error.hpp"
#include "spencer/sym_algebra.hpp"

#include <doctest.h>

#include <algorithm>
#include <numeric>
#include <random>

using namespace spencer;

namespace {

using Tuple = std::vector<int>;

std::vector<Tuple> all_tuples(int d, int j) {
  std::vector<Tuple> out;
  Tuple t(static_cast<std::size_t>(j), 0);
  while (true) {
    out.push_back(t);
    int pos = j - 1;
    while (pos >= 0 && t[static_cast<std::size_t>(pos)] == d - 1) t[static_cast<std::size_t>(pos--)] = 0;
    if (pos < 0) break;
    ++t[static_cast<std::size_t>(pos)];
  }
  return out;
}

double multinomial_orbit(Tuple t) {
  std::sort(t.begin(), t.end());
  double n = 1.0;
  for (std::size_t i = 2; i <= t.size(); ++i) n *= static_cast<double>(i);
  std::size_t i = 0;
  while (i < t.size()) {
    std::size_t k = i;
    while (k < t.size() && t[k] == t[i]) ++k;
    for (std::size_t f = 2; f <= k - i; ++f) n /= static_cast<double>(f);
    i = k;
  }
  return n;
}

// Full symmetric tensor T with T(x,...,x) = sum_alpha s_alpha x^alpha.
std::map<Tuple, double> full_tensor(const SymTensor& s) {
  std::map<Tuple, double> out;
  for (const auto& t : all_tuples(s.algebra_dim(), s.degree())) {
    Tuple sorted = t;
    std::sort(sorted.begin(), sorted.end());
    out[t] = s.coeffs[static_cast<Eigen::Index>(s.space->index_of(sorted))] / multinomial_orbit(t);
  }
  return out;
}

// Sym(T_s (x) T_t), re-collected into monomial coefficients.
Eigen::VectorXd symmetrised_product(const SymTensor& s, const SymTensor& t) {
  const int d = s.algebra_dim();
  const int p = s.degree(), q = t.degree();
  const auto ts = full_tensor(s), tt = full_tensor(t);
  const auto space = sym_space(d, p + q);
  Eigen::VectorXd out = Eigen::VectorXd::Zero(static_cast<Eigen::Index>(space->dim()));
  for (const auto& idx : all_tuples(d, p + q)) {
    std::vector<int> perm(static_cast<std::size_t>(p + q));
    std::iota(perm.begin(), perm.end(), 0);
    double acc = 0.0;
    int count = 0;
    do {
      Tuple a, b;
      for (int i = 0; i < p; ++i) a.push_back(idx[static_cast<std::size_t>(perm[static_cast<std::size_t>(i)])]);
      for (int i = p; i < p + q; ++i) b.push_back(idx[static_cast<std::size_t>(perm[static_cast<std::size_t>(i)])]);
      acc += (p == 0 ? ts.at({}) : ts.at(a)) * (q == 0 ? tt.at({}) : tt.at(b));
      ++count;
    } while (std::next_permutation(perm.begin(), perm.end()));
    Tuple sorted = idx;
    std::sort(sorted.begin(), sorted.end());
    // every ordering of the multiset contributes the same value; summing them collects the coefficient
    out[static_cast<Eigen::Index>(space->index_of(sorted))] += acc / count;
  }
  return out;
}

SymTensor random_tensor(int d, int j, std::mt19937_64& rng) {
  std::normal_distribution<double> n;
  const auto sp = sym_space(d, j);
  Eigen::VectorXd c(static_cast<Eigen::Index>(sp->dim()));
  for (Eigen::Index i = 0; i < c.size(); ++i) c[i] = n(rng);
  return SymTensor(sp, c);
}

}  // namespace

TEST_CASE("Sym dimensions follow stars and bars") {
  CHECK(sym_dimension(3, 2) == 6);
  CHECK(sym_dimension(3, 0) == 1);
  CHECK(sym_dimension(2, 3) == 4);
  CHECK(sym_basis(3, 2)->dim() == 6);
  CHECK(sym_basis(3, 0)->dim() == 1);
  CHECK(sym_basis(2, 3)->dim() == 4);
  CHECK(sym_basis(6, 4)->dim() == 126);
}

TEST_CASE("basis is lexicographic over sorted multisets") {
  const auto sp = sym_basis(3, 2);
  const std::vector<MultiIndex> expected{{0, 0}, {0, 1}, {0, 2}, {1, 1}, {1, 2}, {2, 2}};
  CHECK(sp->basis() == expected);
  for (std::size_t i = 0; i < expected.size(); ++i) CHECK(sp->index_of(expected[i]) == i);
  CHECK(sp->orbit_size(1) == 2.0);
  CHECK(sp->orbit_size(0) == 1.0);
}

TEST_CASE("dimension cap is enforced") {
  try {
    SymSpace(10, 6, 100);
    FAIL("expected DimensionCapExceeded");
  } catch (const Error& e) {
    CHECK(e.code() == ErrorCode::DimensionCapExceeded);
  }
}

TEST_CASE("symmetric product: commutativity, unit, and the symmetrisation oracle") {
  const SymTensor e1 = SymTensor::monomial(3, {0});
  const SymTensor e2 = SymTensor::monomial(3, {1});
  CHECK((sym_product(e1, e2).coeffs - sym_product(e2, e1).coeffs).norm() == 0.0);

  std::mt19937_64 rng(5);
  const SymTensor s = random_tensor(3, 2, rng);
  CHECK((sym_product(SymTensor::unit(3), s).coeffs - s.coeffs).norm() == 0.0);

  const SymTensor e11 = sym_product(e1, e1);
  const SymTensor e112 = sym_product(e11, e2);
  CHECK(e112.coeffs[static_cast<Eigen::Index>(e112.space->index_of({0, 0, 1}))] == doctest::Approx(1.0));
  CHECK((e112.coeffs - symmetrised_product(e11, e2)).norm() < 1e-14);

  for (int p = 0; p <= 2; ++p)
    for (int q = 0; q + p <= 4; ++q) {
      CAPTURE(p);
      CAPTURE(q);
      const SymTensor a = random_tensor(3, p, rng);
      const SymTensor b = random_tensor(3, q, rng);
      CHECK((sym_product(a, b).coeffs - symmetrised_product(a, b)).norm() < 1e-12);
    }
}

TEST_CASE("symmetric product respects the degree cap") {
  const SymTensor a = SymTensor::monomial(3, {0, 1, 2});
  try {
    sym_product(a, a);
    FAIL("expected DegreeCapExceeded");
  } catch (const Error& e) {
    CHECK(e.code() == ErrorCode::DegreeCapExceeded);
  }
  CHECK(sym_product(a, a, 6).degree() == 6);
}

TEST_CASE("evaluation agrees with the polynomial and the bilinear form") {
  std::mt19937_64 rng(9);
  std::normal_distribution<double> n;
  const SymTensor s = random_tensor(3, 3, rng);
  const Eigen::Vector3d x(n(rng), n(rng), n(rng));
  double poly = 0.0;
  for (std::size_t i = 0; i < s.space->dim(); ++i) {
    double m = 1.0;
    for (int k : s.space->multi_index(i)) m *= x[k];
    poly += s.coeffs[static_cast<Eigen::Index>(i)] * m;
  }
  const std::vector<Eigen::VectorXd> args{x, x, x};
  CHECK(s.evaluate(args) == doctest::Approx(poly).epsilon(1e-12));

  Eigen::MatrixXd f(3, 3);
  for (int i = 0; i < 3; ++i)
    for (int j = 0; j < 3; ++j) f(i, j) = n(rng);
  const SymTensor t = SymTensor::from_bilinear(f);
  CHECK(t.coeffs[static_cast<Eigen::Index>(t.space->index_of({0, 1}))] == doctest::Approx(f(0, 1) + f(1, 0)));
  const Eigen::Vector3d w1(n(rng), n(rng), n(rng)), w2(n(rng), n(rng), n(rng));
  CHECK(t.evaluate(w1, w2) == doctest::Approx(0.5 * (w1.dot(f * w2) + w2.dot(f * w1))).epsilon(1e-12));
}

TEST_CASE("plain and weighted inner products") {
  const SymTensor e12 = SymTensor::monomial(3, {0, 1});
  const SymTensor e11 = SymTensor::monomial(3, {0, 0});
  CHECK(sym_inner(e12, e12) == 1.0);
  CHECK(sym_inner(e12, SymTensor::zero(3, 2)) == 0.0);
  CHECK(sym_inner(e11, e12) == 0.0);
  CHECK(sym_inner(e12, e12, SymInner::Weighted) == doctest::Approx(0.5));
  CHECK(sym_inner(e11, e11, SymInner::Weighted) == doctest::Approx(1.0));
  CHECK_THROWS_AS(sym_inner(e12, SymTensor::monomial(3, {0})), Error);
}

TEST_CASE("tensor arithmetic") {
  const SymTensor a = SymTensor::monomial(3, {0, 2});
  const SymTensor b = SymTensor::monomial(3, {2, 0});
  CHECK((a - b).coeffs.norm() == 0.0);
  CHECK(((a + b).coeffs - (2.0 * a).coeffs).norm() == 0.0);
  CHECK_THROWS_AS(a + SymTensor::monomial(3, {0}), Error);
}
