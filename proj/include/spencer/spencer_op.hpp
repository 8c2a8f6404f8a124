#pragma once

#include "spencer/lie_algebra.hpp"
#include "spencer/sym_algebra.hpp"

#include <Eigen/Dense>

#include <vector>

namespace spencer {

/// Sign used when the Leibniz rule moves delta past a left factor of degree p.
///   Graded:   (-1)^p, applied along the sorted order of each monomial.
///   Ungraded: +1 (an ordinary derivation; independent of factor order).
enum class LeibnizSign { Graded, Ungraded };

struct SpencerOptions {
  LeibnizSign leibniz = LeibnizSign::Graded;
  SymInner inner = SymInner::Plain;
  int degree_cap = kDefaultDegreeCap;
};

/// delta^lambda(v) in Sym^2(g):
///   (w1, w2) -> 1/2 (<lambda, [w1,[w2,v]]> + <lambda, [w2,[w1,v]]>).
SymTensor delta_on_generator(const LieAlgebra& alg, const DualVector& lambda, const Eigen::VectorXd& v);

/// delta^lambda on Sym^0 .. Sym^J as dense matrices. map(j) sends Sym^j to
/// Sym^{j+1} (rows index the target basis).
class SpencerMaps {
 public:
  SpencerMaps(const LieAlgebra& alg, DualVector lambda, int truncation, SpencerOptions options = {});

  int truncation() const { return truncation_; }
  int algebra_dim() const { return d_; }
  const DualVector& lambda() const { return lambda_; }
  const SpencerOptions& options() const { return options_; }

  const SymSpacePtr& space(int j) const { return spaces_.at(static_cast<std::size_t>(j)); }
  const Eigen::MatrixXd& map(int j) const { return maps_.at(static_cast<std::size_t>(j)); }

  /// Applies delta to a tensor of degree < J.
  SymTensor apply(const SymTensor& s) const;

 private:
  int d_;
  DualVector lambda_;
  int truncation_;
  SpencerOptions options_;
  std::vector<SymSpacePtr> spaces_;
  std::vector<Eigen::MatrixXd> maps_;
};

/// build_spencer_maps: generator rule plus Leibniz extension up to degree J.
inline SpencerMaps build_spencer_maps(const LieAlgebra& alg, const DualVector& lambda, int truncation,
                                      SpencerOptions options = {}) {
  return SpencerMaps(alg, lambda, truncation, options);
}

/// Max over basis triples (v, w1, w2) of |generator rule - <lambda,[w2,[w1,v]]> - 1/2 <lambda,[[w1,w2],v]>|.
double check_symbolic_equivalence(const LieAlgebra& alg, const DualVector& lambda);

/// Operator 2-norms ||map(j+1) * map(j)|| for j = 0 .. J-2.
std::vector<double> nilpotency_residual(const SpencerMaps& maps);

/// Adjoints of map(j) with respect to the Sym inner products on both sides.
std::vector<Eigen::MatrixXd> spencer_adjoint(const SpencerMaps& maps, SymInner inner = SymInner::Plain);

/// Adjoint of a single Sym^j -> Sym^{j+1} matrix.
Eigen::MatrixXd sym_adjoint(const Eigen::MatrixXd& map, const SymSpace& from, const SymSpace& to, SymInner inner);

}  // namespace spencer
