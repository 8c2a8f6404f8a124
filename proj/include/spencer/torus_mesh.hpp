#pragma once

#include <Eigen/Dense>
#include <Eigen/Sparse>

#include <array>
#include <cstddef>
#include <functional>
#include <numbers>
#include <vector>

namespace spencer {

using SparseMatrix = Eigen::SparseMatrix<double>;
using Point = Eigen::Vector2d;  // second coordinate unused on T^1

/// Grid point on the half-spacing lattice that carries every cell barycenter.
struct HalfGridIndex {
  int x = 0;
  int y = 0;
};

/// Periodic structured grid on T^1 or T^2 with lowest-order DEC operators.
///
/// Cell numbering on T^2 (N1 x N2):
///   vertex (i,j)      -> i + N1 j
///   x-edge (i,j)->(i+1,j) -> i + N1 j
///   y-edge (i,j)->(i,j+1) -> N1 N2 + i + N1 j
///   face   [i,i+1]x[j,j+1] -> i + N1 j
/// On T^1 vertex i and edge i -> i+1 both have index i.
class TorusMesh {
 public:
  static constexpr double kDefaultSide = 2.0 * std::numbers::pi;

  TorusMesh(int dim, std::vector<int> resolution, std::vector<double> sides = {});

  int dim() const { return dim_; }
  int resolution(int axis) const { return resolution_[static_cast<std::size_t>(axis)]; }
  double side(int axis) const { return sides_[static_cast<std::size_t>(axis)]; }
  double spacing(int axis) const { return side(axis) / resolution(axis); }

  std::size_t cell_count(int k) const;

  /// Signed incidence matrix from k-cells to (k+1)-cells.
  const SparseMatrix& derivative(int k) const;
  /// Diagonal Hodge star |dual cell| / |primal cell| for each k-cell.
  const Eigen::VectorXd& cell_volume(int k) const { return volumes_.at(static_cast<std::size_t>(k)); }

  Point barycenter(int k, std::size_t cell) const;
  HalfGridIndex half_grid_index(int k, std::size_t cell) const;

  /// Half-grid extent per axis: 2 N_a on active axes, 1 otherwise.
  int half_grid_extent(int axis) const;
  std::size_t half_grid_size() const;
  std::size_t half_grid_linear(HalfGridIndex g) const;
  Point half_grid_position(HalfGridIndex g) const;

 private:
  int dim_;
  std::vector<int> resolution_;
  std::vector<double> sides_;
  std::vector<SparseMatrix> derivatives_;
  std::vector<Eigen::VectorXd> volumes_;
};

/// build_torus_mesh: resolution >= 3 per axis.
TorusMesh build_torus_mesh(int dim, const std::vector<int>& resolution, const std::vector<double>& sides = {});

/// d applied to a k-cochain.
Eigen::VectorXd exterior_derivative(const TorusMesh& mesh, int k, const Eigen::VectorXd& cochain);

/// Lumped mass matrix diag(weight(barycenter) * cell_volume).
struct MassMatrix {
  int degree = 0;
  Eigen::VectorXd diagonal;
};

MassMatrix mass_matrix(const TorusMesh& mesh, int k, const std::function<double(const Point&)>& weight);

/// Betti numbers of the torus the mesh discretizes.
std::vector<int> betti_reference(const TorusMesh& mesh);

}  // namespace spencer
