#pragma once

#include "spencer/hodge_engine.hpp"
#include "spencer/pair_field.hpp"

#include <memory>
#include <random>

namespace testing {

inline Eigen::VectorXd random_vector(Eigen::Index n, std::mt19937_64& rng) {
  std::normal_distribution<double> normal;
  Eigen::VectorXd v(n);
  for (Eigen::Index i = 0; i < n; ++i) v[i] = normal(rng);
  return v;
}

inline std::shared_ptr<const spencer::LieAlgebra> algebra(const std::string& name) {
  return std::make_shared<const spencer::LieAlgebra>(spencer::builtin_algebra(name));
}

inline std::shared_ptr<const spencer::TorusMesh> torus(int dim, int n, double side = spencer::TorusMesh::kDefaultSide) {
  return std::make_shared<const spencer::TorusMesh>(
      spencer::build_torus_mesh(dim, std::vector<int>(static_cast<std::size_t>(dim), n),
                                std::vector<double>(static_cast<std::size_t>(dim), side)));
}

inline spencer::VectorField constant(const Eigen::VectorXd& c) {
  return [c](const spencer::Point&) { return c; };
}

/// Field with constant lambda and constant omega components.
inline std::shared_ptr<const spencer::PairField> constant_field(std::shared_ptr<const spencer::TorusMesh> mesh,
                                                                std::shared_ptr<const spencer::LieAlgebra> alg,
                                                                const Eigen::VectorXd& lambda,
                                                                std::vector<Eigen::VectorXd> omega = {}) {
  std::vector<spencer::VectorField> om;
  for (int a = 0; a < mesh->dim(); ++a)
    om.push_back(constant(omega.empty() ? Eigen::VectorXd::Zero(alg->dim()).eval() : omega[static_cast<std::size_t>(a)]));
  return std::make_shared<const spencer::PairField>(spencer::PairField::sample(mesh, alg, constant(lambda), om));
}

inline Eigen::VectorXd e(int d, int i) { return Eigen::VectorXd::Unit(d, i); }

}  // namespace testing
