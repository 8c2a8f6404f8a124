#pragma once

#include <Eigen/Dense>

#include <cstddef>
#include <map>
#include <memory>
#include <span>
#include <vector>

namespace spencer {

/// Non-decreasing multi-index (i_1 <= ... <= i_j), zero-based.
using MultiIndex = std::vector<int>;

inline constexpr std::size_t kDefaultSymDimCap = 2'000'000;
inline constexpr int kDefaultDegreeCap = 4;

/// Inner product on Sym^j(g) in monomial coordinates.
///   Plain:    sum_alpha s_alpha t_alpha
///   Weighted: sum_alpha s_alpha t_alpha / N_alpha, N_alpha = number of distinct
///             orderings of alpha (the product-tensor inner product of the
///             symmetrised monomials).
enum class SymInner { Plain, Weighted };

/// C(d + j - 1, j).
std::size_t sym_dimension(int d, int j);

/// Lexicographically ordered multiset basis of Sym^j(g), dim g = d.
class SymSpace {
 public:
  SymSpace(int d, int j, std::size_t dim_cap = kDefaultSymDimCap);

  int algebra_dim() const { return d_; }
  int degree() const { return j_; }
  std::size_t dim() const { return basis_.size(); }

  const MultiIndex& multi_index(std::size_t i) const { return basis_[i]; }
  const std::vector<MultiIndex>& basis() const { return basis_; }
  /// Position of a sorted multi-index; throws if it is not in this space.
  std::size_t index_of(const MultiIndex& alpha) const;

  /// Number of distinct orderings of the i-th multi-index.
  double orbit_size(std::size_t i) const { return orbit_[i]; }
  /// Diagonal of the Gram matrix of the chosen inner product.
  Eigen::VectorXd gram_diagonal(SymInner inner) const;

 private:
  int d_;
  int j_;
  std::vector<MultiIndex> basis_;
  std::vector<double> orbit_;
  std::map<MultiIndex, std::size_t> lookup_;
};

using SymSpacePtr = std::shared_ptr<const SymSpace>;

/// Shared, cached basis for (d, j).
SymSpacePtr sym_space(int d, int j, std::size_t dim_cap = kDefaultSymDimCap);

/// sym_basis operation: ordered basis of Sym^j for an algebra of dimension d.
inline SymSpacePtr sym_basis(int d, int j, std::size_t dim_cap = kDefaultSymDimCap) { return sym_space(d, j, dim_cap); }

/// s = sum_alpha s_alpha e_alpha with e_alpha = e_{i1} . ... . e_{ij}.
struct SymTensor {
  SymSpacePtr space;
  Eigen::VectorXd coeffs;

  SymTensor() = default;
  SymTensor(SymSpacePtr sp, Eigen::VectorXd c);

  static SymTensor zero(int d, int j);
  static SymTensor unit(int d);
  /// e_alpha for an arbitrary-order index list (it is sorted first).
  static SymTensor monomial(int d, MultiIndex alpha);
  /// Degree-1 tensor with the given coordinates.
  static SymTensor vector(const Eigen::VectorXd& v);
  /// Unique degree-2 tensor whose symmetric bilinear evaluation equals
  /// the symmetric part of `form`.
  static SymTensor from_bilinear(const Eigen::MatrixXd& form);

  int degree() const { return space->degree(); }
  int algebra_dim() const { return space->algebra_dim(); }

  /// Value of the symmetric multilinear form on (w_1, ..., w_j).
  double evaluate(std::span<const Eigen::VectorXd> ws) const;
  double evaluate(const Eigen::VectorXd& w1, const Eigen::VectorXd& w2) const;
};

SymTensor operator+(const SymTensor& a, const SymTensor& b);
SymTensor operator-(const SymTensor& a, const SymTensor& b);
SymTensor operator*(double s, const SymTensor& a);

/// Symmetric product. Throws DegreeCapExceeded if p + q > max_degree.
SymTensor sym_product(const SymTensor& s, const SymTensor& t, int max_degree = kDefaultDegreeCap);

/// Throws DegreeMismatch on unequal degrees.
double sym_inner(const SymTensor& s, const SymTensor& t, SymInner inner = SymInner::Plain);

}  // namespace spencer
