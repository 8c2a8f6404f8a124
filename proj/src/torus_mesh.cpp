#include "spencer/torus_mesh.hpp"

#include "spencer/error.hpp"

#include <cmath>

namespace spencer {

namespace {

using Triplet = Eigen::Triplet<double>;

SparseMatrix from_triplets(std::size_t rows, std::size_t cols, const std::vector<Triplet>& t) {
  SparseMatrix m(static_cast<Eigen::Index>(rows), static_cast<Eigen::Index>(cols));
  m.setFromTriplets(t.begin(), t.end());
  return m;
}

}  // namespace

TorusMesh::TorusMesh(int dim, std::vector<int> resolution, std::vector<double> sides)
    : dim_(dim), resolution_(std::move(resolution)), sides_(std::move(sides)) {
  if (dim_ != 1 && dim_ != 2) throw Error(ErrorCode::DimensionUnsupported, "only T^1 and T^2 are supported");
  if (static_cast<int>(resolution_.size()) != dim_)
    throw Error(ErrorCode::DimensionMismatch, "need one resolution per axis");
  if (sides_.empty()) sides_.assign(static_cast<std::size_t>(dim_), kDefaultSide);
  if (static_cast<int>(sides_.size()) != dim_) throw Error(ErrorCode::DimensionMismatch, "need one side per axis");
  for (int n : resolution_)
    if (n < 3) throw Error(ErrorCode::ResolutionTooSmall, "resolution " + std::to_string(n) + " < 3");
  for (double s : sides_)
    if (!(s > 0.0)) throw Error(ErrorCode::DimensionMismatch, "side lengths must be positive");

  if (dim_ == 1) {
    const int n = resolution_[0];
    const double h = spacing(0);
    std::vector<Triplet> t;
    for (int i = 0; i < n; ++i) {
      t.emplace_back(i, i, -1.0);
      t.emplace_back(i, (i + 1) % n, 1.0);
    }
    derivatives_.push_back(from_triplets(static_cast<std::size_t>(n), static_cast<std::size_t>(n), t));
    volumes_.push_back(Eigen::VectorXd::Constant(n, h));
    volumes_.push_back(Eigen::VectorXd::Constant(n, 1.0 / h));
    return;
  }

  const int n1 = resolution_[0];
  const int n2 = resolution_[1];
  const int nv = n1 * n2;
  const double h1 = spacing(0);
  const double h2 = spacing(1);
  auto vid = [&](int i, int j) { return ((i % n1 + n1) % n1) + n1 * ((j % n2 + n2) % n2); };
  auto xedge = [&](int i, int j) { return vid(i, j); };
  auto yedge = [&](int i, int j) { return nv + vid(i, j); };

  std::vector<Triplet> d0;
  std::vector<Triplet> d1;
  for (int j = 0; j < n2; ++j)
    for (int i = 0; i < n1; ++i) {
      d0.emplace_back(xedge(i, j), vid(i, j), -1.0);
      d0.emplace_back(xedge(i, j), vid(i + 1, j), 1.0);
      d0.emplace_back(yedge(i, j), vid(i, j), -1.0);
      d0.emplace_back(yedge(i, j), vid(i, j + 1), 1.0);

      const int f = vid(i, j);
      d1.emplace_back(f, xedge(i, j), 1.0);
      d1.emplace_back(f, yedge(i + 1, j), 1.0);
      d1.emplace_back(f, xedge(i, j + 1), -1.0);
      d1.emplace_back(f, yedge(i, j), -1.0);
    }
  derivatives_.push_back(from_triplets(2 * static_cast<std::size_t>(nv), static_cast<std::size_t>(nv), d0));
  derivatives_.push_back(from_triplets(static_cast<std::size_t>(nv), 2 * static_cast<std::size_t>(nv), d1));

  volumes_.push_back(Eigen::VectorXd::Constant(nv, h1 * h2));
  Eigen::VectorXd edges(2 * nv);
  edges.head(nv).setConstant(h2 / h1);
  edges.tail(nv).setConstant(h1 / h2);
  volumes_.push_back(edges);
  volumes_.push_back(Eigen::VectorXd::Constant(nv, 1.0 / (h1 * h2)));
}

TorusMesh build_torus_mesh(int dim, const std::vector<int>& resolution, const std::vector<double>& sides) {
  return TorusMesh(dim, resolution, sides);
}

std::size_t TorusMesh::cell_count(int k) const {
  if (k < 0 || k > dim_) return 0;
  std::size_t nv = 1;
  for (int n : resolution_) nv *= static_cast<std::size_t>(n);
  return (dim_ == 2 && k == 1) ? 2 * nv : nv;
}

const SparseMatrix& TorusMesh::derivative(int k) const {
  if (k < 0 || k >= dim_) throw Error(ErrorCode::DegreeOutOfRange, "no exterior derivative from degree " + std::to_string(k));
  return derivatives_[static_cast<std::size_t>(k)];
}

HalfGridIndex TorusMesh::half_grid_index(int k, std::size_t cell) const {
  if (cell >= cell_count(k)) throw Error(ErrorCode::DimensionMismatch, "cell index out of range");
  const int c = static_cast<int>(cell);
  if (dim_ == 1) return {2 * c + (k == 1 ? 1 : 0), 0};
  const int n1 = resolution_[0];
  const int nv = n1 * resolution_[1];
  switch (k) {
    case 0: return {2 * (c % n1), 2 * (c / n1)};
    case 1:
      if (c < nv) return {2 * (c % n1) + 1, 2 * (c / n1)};
      return {2 * ((c - nv) % n1), 2 * ((c - nv) / n1) + 1};
    default: return {2 * (c % n1) + 1, 2 * (c / n1) + 1};
  }
}

int TorusMesh::half_grid_extent(int axis) const { return axis < dim_ ? 2 * resolution(axis) : 1; }

std::size_t TorusMesh::half_grid_size() const {
  return static_cast<std::size_t>(half_grid_extent(0)) * static_cast<std::size_t>(half_grid_extent(1));
}

std::size_t TorusMesh::half_grid_linear(HalfGridIndex g) const {
  const int ex = half_grid_extent(0);
  const int ey = half_grid_extent(1);
  const int x = ((g.x % ex) + ex) % ex;
  const int y = ((g.y % ey) + ey) % ey;
  return static_cast<std::size_t>(x) + static_cast<std::size_t>(ex) * static_cast<std::size_t>(y);
}

Point TorusMesh::half_grid_position(HalfGridIndex g) const {
  Point p = Point::Zero();
  p[0] = 0.5 * g.x * spacing(0);
  if (dim_ == 2) p[1] = 0.5 * g.y * spacing(1);
  return p;
}

Point TorusMesh::barycenter(int k, std::size_t cell) const { return half_grid_position(half_grid_index(k, cell)); }

Eigen::VectorXd exterior_derivative(const TorusMesh& mesh, int k, const Eigen::VectorXd& cochain) {
  if (k < 0 || k >= mesh.dim())
    throw Error(ErrorCode::DegreeOutOfRange, "exterior derivative of a " + std::to_string(k) + "-cochain");
  if (static_cast<std::size_t>(cochain.size()) != mesh.cell_count(k))
    throw Error(ErrorCode::ShapeMismatch, "cochain length does not match cell count");
  return mesh.derivative(k) * cochain;
}

MassMatrix mass_matrix(const TorusMesh& mesh, int k, const std::function<double(const Point&)>& weight) {
  if (k < 0 || k > mesh.dim()) throw Error(ErrorCode::DegreeOutOfRange, "mass matrix degree");
  MassMatrix m{k, mesh.cell_volume(k)};
  for (std::size_t c = 0; c < mesh.cell_count(k); ++c) {
    const double w = weight(mesh.barycenter(k, c));
    if (!(w > 0.0) || !std::isfinite(w))
      throw Error(ErrorCode::NonPositiveWeight, "weight " + std::to_string(w) + " at cell " + std::to_string(c));
    m.diagonal[static_cast<Eigen::Index>(c)] *= w;
  }
  return m;
}

std::vector<int> betti_reference(const TorusMesh& mesh) {
  if (mesh.dim() == 1) return {1, 1};
  return {1, 2, 1};
}

}  // namespace spencer
