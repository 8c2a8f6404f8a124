#include "spencer/sym_algebra.hpp"

#include "spencer/error.hpp"

#include <algorithm>
#include <mutex>
#include <numeric>
#include <tuple>

namespace spencer {

std::size_t sym_dimension(int d, int j) {
  // C(d+j-1, j) computed incrementally; exact in integers for the sizes used.
  std::size_t result = 1;
  for (int i = 1; i <= j; ++i) result = result * static_cast<std::size_t>(d - 1 + i) / static_cast<std::size_t>(i);
  return result;
}

namespace {

void enumerate(int d, int j, int start, MultiIndex& current, std::vector<MultiIndex>& out) {
  if (static_cast<int>(current.size()) == j) {
    out.push_back(current);
    return;
  }
  for (int i = start; i < d; ++i) {
    current.push_back(i);
    enumerate(d, j, i, current, out);
    current.pop_back();
  }
}

double distinct_orderings(const MultiIndex& alpha) {
  double n = 1.0;
  for (std::size_t i = 1; i <= alpha.size(); ++i) n *= static_cast<double>(i);
  std::size_t run = 1;
  for (std::size_t i = 1; i <= alpha.size(); ++i) {
    if (i < alpha.size() && alpha[i] == alpha[i - 1]) {
      ++run;
    } else {
      for (std::size_t r = 2; r <= run; ++r) n /= static_cast<double>(r);
      run = 1;
    }
  }
  return n;
}

MultiIndex merge_sorted(const MultiIndex& a, const MultiIndex& b) {
  MultiIndex out(a.size() + b.size());
  std::merge(a.begin(), a.end(), b.begin(), b.end(), out.begin());
  return out;
}

}  // namespace

SymSpace::SymSpace(int d, int j, std::size_t dim_cap) : d_(d), j_(j) {
  if (d < 1 || j < 0) throw Error(ErrorCode::DimensionMismatch, "Sym^j needs d >= 1 and j >= 0");
  const std::size_t n = sym_dimension(d, j);
  if (n > dim_cap) {
    throw Error(ErrorCode::DimensionCapExceeded,
                "dim Sym^" + std::to_string(j) + " = " + std::to_string(n) + " exceeds cap " + std::to_string(dim_cap));
  }
  basis_.reserve(n);
  MultiIndex current;
  enumerate(d, j, 0, current, basis_);
  orbit_.reserve(n);
  for (std::size_t i = 0; i < basis_.size(); ++i) {
    orbit_.push_back(distinct_orderings(basis_[i]));
    lookup_.emplace(basis_[i], i);
  }
}

std::size_t SymSpace::index_of(const MultiIndex& alpha) const {
  auto it = lookup_.find(alpha);
  if (it == lookup_.end()) throw Error(ErrorCode::DimensionMismatch, "multi-index not in basis");
  return it->second;
}

Eigen::VectorXd SymSpace::gram_diagonal(SymInner inner) const {
  Eigen::VectorXd g = Eigen::VectorXd::Ones(static_cast<Eigen::Index>(dim()));
  if (inner == SymInner::Weighted)
    for (std::size_t i = 0; i < dim(); ++i) g[static_cast<Eigen::Index>(i)] = 1.0 / orbit_[i];
  return g;
}

SymSpacePtr sym_space(int d, int j, std::size_t dim_cap) {
  static std::mutex mutex;
  static std::map<std::pair<int, int>, SymSpacePtr> cache;
  std::lock_guard lock(mutex);
  auto key = std::make_pair(d, j);
  if (auto it = cache.find(key); it != cache.end()) {
    if (it->second->dim() > dim_cap)
      throw Error(ErrorCode::DimensionCapExceeded, "dim Sym^" + std::to_string(j) + " exceeds cap");
    return it->second;
  }
  auto sp = std::make_shared<const SymSpace>(d, j, dim_cap);
  cache.emplace(key, sp);
  return sp;
}

SymTensor::SymTensor(SymSpacePtr sp, Eigen::VectorXd c) : space(std::move(sp)), coeffs(std::move(c)) {
  if (static_cast<std::size_t>(coeffs.size()) != space->dim())
    throw Error(ErrorCode::DimensionMismatch, "coefficient length does not match Sym space");
}

SymTensor SymTensor::zero(int d, int j) {
  auto sp = sym_space(d, j);
  return SymTensor(sp, Eigen::VectorXd::Zero(static_cast<Eigen::Index>(sp->dim())));
}

SymTensor SymTensor::unit(int d) { return SymTensor(sym_space(d, 0), Eigen::VectorXd::Ones(1)); }

SymTensor SymTensor::monomial(int d, MultiIndex alpha) {
  std::sort(alpha.begin(), alpha.end());
  auto sp = sym_space(d, static_cast<int>(alpha.size()));
  Eigen::VectorXd c = Eigen::VectorXd::Zero(static_cast<Eigen::Index>(sp->dim()));
  c[static_cast<Eigen::Index>(sp->index_of(alpha))] = 1.0;
  return SymTensor(sp, std::move(c));
}

SymTensor SymTensor::vector(const Eigen::VectorXd& v) {
  return SymTensor(sym_space(static_cast<int>(v.size()), 1), v);
}

SymTensor SymTensor::from_bilinear(const Eigen::MatrixXd& form) {
  const int d = static_cast<int>(form.rows());
  auto sp = sym_space(d, 2);
  Eigen::VectorXd c(static_cast<Eigen::Index>(sp->dim()));
  for (std::size_t i = 0; i < sp->dim(); ++i) {
    const auto& a = sp->multi_index(i);
    c[static_cast<Eigen::Index>(i)] = (a[0] == a[1]) ? form(a[0], a[0]) : form(a[0], a[1]) + form(a[1], a[0]);
  }
  return SymTensor(sp, std::move(c));
}

double SymTensor::evaluate(std::span<const Eigen::VectorXd> ws) const {
  if (static_cast<int>(ws.size()) != degree()) throw Error(ErrorCode::DegreeMismatch, "wrong number of arguments");
  double total = 0.0;
  for (std::size_t b = 0; b < space->dim(); ++b) {
    const double s = coeffs[static_cast<Eigen::Index>(b)];
    if (s == 0.0) continue;
    MultiIndex word = space->multi_index(b);
    double acc = 0.0;
    do {
      double prod = 1.0;
      for (std::size_t m = 0; m < word.size(); ++m) prod *= ws[m][word[m]];
      acc += prod;
    } while (std::next_permutation(word.begin(), word.end()));
    total += s * acc / space->orbit_size(b);
  }
  return total;
}

double SymTensor::evaluate(const Eigen::VectorXd& w1, const Eigen::VectorXd& w2) const {
  const Eigen::VectorXd ws[2] = {w1, w2};
  return evaluate(std::span<const Eigen::VectorXd>(ws, 2));
}

SymTensor operator+(const SymTensor& a, const SymTensor& b) {
  if (a.space != b.space) throw Error(ErrorCode::DegreeMismatch, "adding tensors from different spaces");
  return SymTensor(a.space, a.coeffs + b.coeffs);
}

SymTensor operator-(const SymTensor& a, const SymTensor& b) {
  if (a.space != b.space) throw Error(ErrorCode::DegreeMismatch, "subtracting tensors from different spaces");
  return SymTensor(a.space, a.coeffs - b.coeffs);
}

SymTensor operator*(double s, const SymTensor& a) { return SymTensor(a.space, s * a.coeffs); }

SymTensor sym_product(const SymTensor& s, const SymTensor& t, int max_degree) {
  if (s.algebra_dim() != t.algebra_dim()) throw Error(ErrorCode::DimensionMismatch, "tensors over different algebras");
  const int degree = s.degree() + t.degree();
  if (degree > max_degree) {
    throw Error(ErrorCode::DegreeCapExceeded,
                "product degree " + std::to_string(degree) + " exceeds cap " + std::to_string(max_degree));
  }
  auto out_space = sym_space(s.algebra_dim(), degree);
  Eigen::VectorXd out = Eigen::VectorXd::Zero(static_cast<Eigen::Index>(out_space->dim()));
  for (std::size_t a = 0; a < s.space->dim(); ++a) {
    const double sa = s.coeffs[static_cast<Eigen::Index>(a)];
    if (sa == 0.0) continue;
    for (std::size_t b = 0; b < t.space->dim(); ++b) {
      const double tb = t.coeffs[static_cast<Eigen::Index>(b)];
      if (tb == 0.0) continue;
      const auto merged = merge_sorted(s.space->multi_index(a), t.space->multi_index(b));
      out[static_cast<Eigen::Index>(out_space->index_of(merged))] += sa * tb;
    }
  }
  return SymTensor(out_space, std::move(out));
}

double sym_inner(const SymTensor& s, const SymTensor& t, SymInner inner) {
  if (s.degree() != t.degree() || s.algebra_dim() != t.algebra_dim())
    throw Error(ErrorCode::DegreeMismatch, "inner product of tensors of different degree");
  if (inner == SymInner::Plain) return s.coeffs.dot(t.coeffs);
  return s.coeffs.dot(s.space->gram_diagonal(inner).cwiseProduct(t.coeffs));
}

}  // namespace spencer
