#include "spencer/spencer_op.hpp"

#include "spencer/error.hpp"

#include <algorithm>
#include <cmath>

namespace spencer {

namespace {

double generator_value(const LieAlgebra& alg, const DualVector& lambda, const Eigen::VectorXd& v,
                       const Eigen::VectorXd& w1, const Eigen::VectorXd& w2) {
  return 0.5 * (lambda.pair(alg.bracket(w1, alg.bracket(w2, v))) + lambda.pair(alg.bracket(w2, alg.bracket(w1, v))));
}

}  // namespace

SymTensor delta_on_generator(const LieAlgebra& alg, const DualVector& lambda, const Eigen::VectorXd& v) {
  const int d = alg.dim();
  if (v.size() != d || lambda.dim() != d) throw Error(ErrorCode::DimensionMismatch, "generator/lambda size");
  Eigen::MatrixXd form(d, d);
  for (int a = 0; a < d; ++a)
    for (int b = 0; b < d; ++b)
      form(a, b) = generator_value(alg, lambda, v, Eigen::VectorXd::Unit(d, a), Eigen::VectorXd::Unit(d, b));
  return SymTensor::from_bilinear(form);
}

SpencerMaps::SpencerMaps(const LieAlgebra& alg, DualVector lambda, int truncation, SpencerOptions options)
    : d_(alg.dim()), lambda_(std::move(lambda)), truncation_(truncation), options_(options) {
  if (truncation_ < 0) throw Error(ErrorCode::DegreeOutOfRange, "truncation must be >= 0");
  if (truncation_ > options_.degree_cap) {
    throw Error(ErrorCode::DegreeCapExceeded, "truncation " + std::to_string(truncation_) + " exceeds degree cap " +
                                                  std::to_string(options_.degree_cap));
  }
  if (lambda_.dim() != d_) throw Error(ErrorCode::DimensionMismatch, "lambda has wrong dimension");

  for (int j = 0; j <= truncation_; ++j) spaces_.push_back(sym_space(d_, j));
  if (truncation_ == 0) return;

  // delta(e_i) columns in Sym^2.
  const auto sym2 = sym_space(d_, 2);
  Eigen::MatrixXd generators(static_cast<Eigen::Index>(sym2->dim()), d_);
  for (int i = 0; i < d_; ++i) generators.col(i) = delta_on_generator(alg, lambda_, Eigen::VectorXd::Unit(d_, i)).coeffs;

  maps_.emplace_back(Eigen::MatrixXd::Zero(d_, 1));  // delta(1) = 0
  for (int j = 1; j < truncation_; ++j) {
    const auto& from = *spaces_[static_cast<std::size_t>(j)];
    const auto& to = *spaces_[static_cast<std::size_t>(j + 1)];
    Eigen::MatrixXd m = Eigen::MatrixXd::Zero(static_cast<Eigen::Index>(to.dim()), static_cast<Eigen::Index>(from.dim()));
    for (std::size_t col = 0; col < from.dim(); ++col) {
      const MultiIndex& alpha = from.multi_index(col);
      // delta(e_{i1} ... e_{ij}) = sum_m sign_m e_{i1}..delta(e_{im})..e_{ij}
      for (std::size_t pos = 0; pos < alpha.size(); ++pos) {
        const double sign = (options_.leibniz == LeibnizSign::Graded && pos % 2 == 1) ? -1.0 : 1.0;
        MultiIndex rest = alpha;
        rest.erase(rest.begin() + static_cast<std::ptrdiff_t>(pos));
        for (std::size_t g = 0; g < sym2->dim(); ++g) {
          const double coeff = generators(static_cast<Eigen::Index>(g), alpha[pos]);
          if (coeff == 0.0) continue;
          const MultiIndex& pair = sym2->multi_index(g);
          MultiIndex target = rest;
          target.insert(target.end(), pair.begin(), pair.end());
          std::sort(target.begin(), target.end());
          m(static_cast<Eigen::Index>(to.index_of(target)), static_cast<Eigen::Index>(col)) += sign * coeff;
        }
      }
    }
    maps_.push_back(std::move(m));
  }
}

SymTensor SpencerMaps::apply(const SymTensor& s) const {
  const int j = s.degree();
  if (j >= truncation_) throw Error(ErrorCode::DegreeCapExceeded, "delta applied at or above truncation");
  return SymTensor(spaces_[static_cast<std::size_t>(j + 1)], maps_[static_cast<std::size_t>(j)] * s.coeffs);
}

double check_symbolic_equivalence(const LieAlgebra& alg, const DualVector& lambda) {
  const int d = alg.dim();
  double worst = 0.0;
  for (int v = 0; v < d; ++v) {
    const Eigen::VectorXd ev = Eigen::VectorXd::Unit(d, v);
    const SymTensor rule_a = delta_on_generator(alg, lambda, ev);
    for (int a = 0; a < d; ++a)
      for (int b = 0; b < d; ++b) {
        const Eigen::VectorXd w1 = Eigen::VectorXd::Unit(d, a);
        const Eigen::VectorXd w2 = Eigen::VectorXd::Unit(d, b);
        const double symbolic =
            lambda.pair(alg.bracket(w2, alg.bracket(w1, ev))) + 0.5 * lambda.pair(alg.bracket(alg.bracket(w1, w2), ev));
        worst = std::max(worst, std::abs(rule_a.evaluate(w1, w2) - symbolic));
      }
  }
  return worst;
}

std::vector<double> nilpotency_residual(const SpencerMaps& maps) {
  std::vector<double> out;
  for (int j = 0; j + 1 < maps.truncation(); ++j) {
    const Eigen::MatrixXd composed = maps.map(j + 1) * maps.map(j);
    if (composed.size() == 0 || composed.isZero(0.0)) {
      out.push_back(0.0);
      continue;
    }
    Eigen::JacobiSVD<Eigen::MatrixXd> svd(composed);
    out.push_back(svd.singularValues()(0));
  }
  return out;
}

Eigen::MatrixXd sym_adjoint(const Eigen::MatrixXd& map, const SymSpace& from, const SymSpace& to, SymInner inner) {
  if (inner == SymInner::Plain) return map.transpose();
  const Eigen::VectorXd g_from = from.gram_diagonal(inner);
  const Eigen::VectorXd g_to = to.gram_diagonal(inner);
  return g_from.cwiseInverse().asDiagonal() * map.transpose() * g_to.asDiagonal();
}

std::vector<Eigen::MatrixXd> spencer_adjoint(const SpencerMaps& maps, SymInner inner) {
  std::vector<Eigen::MatrixXd> out;
  for (int j = 0; j < maps.truncation(); ++j)
    out.push_back(sym_adjoint(maps.map(j), *maps.space(j), *maps.space(j + 1), inner));
  return out;
}

}  // namespace spencer
