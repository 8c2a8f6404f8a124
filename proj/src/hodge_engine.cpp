#include "spencer/hodge_engine.hpp"

#include "spencer/error.hpp"
#include "spencer/parallel.hpp"

#include <Eigen/IterativeLinearSolvers>

#include <algorithm>
#include <cmath>
#include <random>
#include <sstream>

namespace spencer {

namespace {

using Triplet = Eigen::Triplet<double>;

const Block* find_block(const std::vector<Block>& blocks, int k, int j) {
  for (const auto& b : blocks)
    if (b.k == k && b.j == j) return &b;
  return nullptr;
}

Eigen::VectorXd random_vector(Eigen::Index n, std::mt19937_64& rng) {
  std::normal_distribution<double> normal;
  Eigen::VectorXd v(n);
  for (Eigen::Index i = 0; i < n; ++i) v[i] = normal(rng);
  return v;
}

SparseMatrix scale_rows_cols(const SparseMatrix& a, const Eigen::VectorXd& left, const Eigen::VectorXd& right) {
  return left.asDiagonal() * a * right.asDiagonal();
}

}  // namespace

std::string MetricChoice::tag() const {
  switch (kind) {
    case MetricKind::A: return "A";
    case MetricKind::B: return "B";
    case MetricKind::Mixed: {
      std::ostringstream s;
      s << "mixed(" << alpha << ")";
      return s.str();
    }
  }
  return "A";
}

std::vector<Block> block_layout(const TorusMesh& mesh, int d, int truncation, int n) {
  std::vector<Block> out;
  std::size_t offset = 0;
  for (int k = 0; k <= mesh.dim(); ++k) {
    const int j = n - k;
    if (j < 0 || j > truncation) continue;
    Block b{k, j, offset, mesh.cell_count(k), sym_dimension(d, j)};
    offset += b.size();
    out.push_back(b);
  }
  return out;
}

Eigen::VectorXd metric_mass(const PairField& field, int truncation, SymInner inner, const MetricChoice& metric, int n) {
  const auto blocks = block_layout(field.mesh(), field.algebra().dim(), truncation, n);
  std::size_t total = 0;
  for (const auto& b : blocks) total += b.size();
  Eigen::VectorXd mass(static_cast<Eigen::Index>(total));
  const auto& w = field.weights(WeightKind::Constraint);
  const auto& kappa = field.weights(WeightKind::Curvature);
  for (const auto& b : blocks) {
    const Eigen::VectorXd gram = sym_space(field.algebra().dim(), b.j)->gram_diagonal(inner);
    const Eigen::VectorXd& vol = field.mesh().cell_volume(b.k);
    for (std::size_t c = 0; c < b.cells; ++c) {
      const auto p = static_cast<Eigen::Index>(field.point_of_cell(b.k, c));
      const double weight = metric.weight(w[p], kappa[p]);
      if (!(weight > 0.0)) throw Error(ErrorCode::NonPositiveWeight, "metric weight must be positive");
      const double cell = weight * vol[static_cast<Eigen::Index>(c)];
      for (std::size_t s = 0; s < b.sym_dim; ++s)
        mass[static_cast<Eigen::Index>(b.offset + c * b.sym_dim + s)] = cell * gram[static_cast<Eigen::Index>(s)];
    }
  }
  return mass;
}

SpencerAssembly::SpencerAssembly(std::shared_ptr<const PairField> field, AssemblyOptions options)
    : field_(std::move(field)), options_(options) {
  const TorusMesh& m = field_->mesh();
  const LieAlgebra& alg = field_->algebra();
  const int d = alg.dim();
  const int J = options_.truncation;
  if (J < 0) throw Error(ErrorCode::DegreeOutOfRange, "truncation must be >= 0");
  if (options_.metric.kind == MetricKind::Mixed && !(options_.metric.alpha >= 0.0 && options_.metric.alpha <= 1.0))
    throw Error(ErrorCode::ConfigError, "mixed metric alpha must lie in [0, 1]");

  const int top = m.dim() + J;
  for (int n = 0; n <= top; ++n) blocks_.push_back(block_layout(m, d, J, n));

  // delta is linear in lambda: delta^lambda = sum_i lambda_i delta^{e_i*}.
  std::vector<std::vector<Eigen::MatrixXd>> basis_maps;
  if (J >= 1) {
    for (int i = 0; i < d; ++i) {
      SpencerMaps maps(alg, DualVector::basis(d, i), J, options_.spencer);
      std::vector<Eigen::MatrixXd> per_degree;
      for (int j = 0; j < J; ++j) per_degree.push_back(maps.map(j));
      basis_maps.push_back(std::move(per_degree));
    }
  }

  for (int n = 0; n <= top; ++n) {
    mass_.push_back(metric_mass(*field_, J, options_.spencer.inner, options_.metric, n));
    if (n == top) break;
    const auto& from = blocks_[static_cast<std::size_t>(n)];
    const auto& to = blocks_[static_cast<std::size_t>(n + 1)];
    const std::size_t rows = space_dim(n + 1);
    const std::size_t cols = space_dim(n);

    std::vector<Triplet> h;
    for (const auto& b : from) {
      if (b.k >= m.dim()) continue;
      const Block* target = find_block(to, b.k + 1, b.j);
      const SparseMatrix& dk = m.derivative(b.k);
      for (int outer = 0; outer < dk.outerSize(); ++outer)
        for (SparseMatrix::InnerIterator it(dk, outer); it; ++it)
          for (std::size_t s = 0; s < b.sym_dim; ++s)
            h.emplace_back(static_cast<int>(target->offset + static_cast<std::size_t>(it.row()) * b.sym_dim + s),
                           static_cast<int>(b.offset + static_cast<std::size_t>(it.col()) * b.sym_dim + s), it.value());
    }
    SparseMatrix hm(static_cast<Eigen::Index>(rows), static_cast<Eigen::Index>(cols));
    hm.setFromTriplets(h.begin(), h.end());
    horizontal_.push_back(std::move(hm));

    std::vector<Triplet> v;
    for (const auto& b : from) {
      if (b.j >= J) continue;  // truncated
      const Block* target = find_block(to, b.k, b.j + 1);
      const double sign = (b.k % 2 == 0) ? 1.0 : -1.0;
      std::vector<std::vector<Triplet>> per_cell(b.cells);
      parallel_for(b.cells, [&](std::size_t c) {
        const DualVector lambda = field_->lambda_at_cell(b.k, c);
        Eigen::MatrixXd delta = Eigen::MatrixXd::Zero(static_cast<Eigen::Index>(target->sym_dim),
                                                      static_cast<Eigen::Index>(b.sym_dim));
        for (int i = 0; i < d; ++i)
          if (lambda.coeffs[i] != 0.0) delta += lambda.coeffs[i] * basis_maps[static_cast<std::size_t>(i)][static_cast<std::size_t>(b.j)];
        for (Eigen::Index r = 0; r < delta.rows(); ++r)
          for (Eigen::Index col = 0; col < delta.cols(); ++col)
            if (delta(r, col) != 0.0)
              per_cell[c].emplace_back(static_cast<int>(target->offset + c * target->sym_dim + static_cast<std::size_t>(r)),
                                       static_cast<int>(b.offset + c * b.sym_dim + static_cast<std::size_t>(col)),
                                       sign * delta(r, col));
      });
      for (auto& cell : per_cell) v.insert(v.end(), cell.begin(), cell.end());
    }
    SparseMatrix vm(static_cast<Eigen::Index>(rows), static_cast<Eigen::Index>(cols));
    vm.setFromTriplets(v.begin(), v.end());
    vertical_.push_back(std::move(vm));
  }
}

std::size_t SpencerAssembly::space_dim(int n) const {
  if (n < 0 || n > top_degree()) return 0;
  std::size_t total = 0;
  for (const auto& b : blocks(n)) total += b.size();
  return total;
}

SparseMatrix SpencerAssembly::differential(int n) const {
  if (n < 0 || n >= top_degree())
    return SparseMatrix(static_cast<Eigen::Index>(space_dim(n + 1)), static_cast<Eigen::Index>(space_dim(n)));
  return horizontal(n) + vertical(n);
}

SparseMatrix SpencerAssembly::adjoint(int n) const {
  if (n < 0 || n >= top_degree())
    return SparseMatrix(static_cast<Eigen::Index>(space_dim(n)), static_cast<Eigen::Index>(space_dim(n + 1)));
  const SparseMatrix dt = differential(n).transpose();
  return scale_rows_cols(dt, mass(n).cwiseInverse(), mass(n + 1));
}

SparseMatrix SpencerAssembly::stiffness(int n) const {
  const std::size_t size = space_dim(n);
  SparseMatrix k(static_cast<Eigen::Index>(size), static_cast<Eigen::Index>(size));
  if (n < top_degree()) {
    const SparseMatrix d = differential(n);
    const SparseMatrix md = mass(n + 1).asDiagonal() * d;
    k += SparseMatrix(d.transpose() * md);
  }
  if (n > 0) {
    const SparseMatrix dm = differential(n - 1);
    const SparseMatrix left = mass(n).asDiagonal() * dm;  // M_n D^{n-1}
    const SparseMatrix scaled = left * mass(n - 1).cwiseInverse().asDiagonal();
    k += SparseMatrix(scaled * left.transpose());
  }
  // symmetrise away roundoff asymmetry from the two products
  SparseMatrix kt = k.transpose();
  return 0.5 * (k + kt);
}

Eigen::VectorXd SpencerAssembly::apply_laplacian(int n, const Eigen::VectorXd& u) const {
  Eigen::VectorXd out = Eigen::VectorXd::Zero(u.size());
  if (n < top_degree()) out += adjoint(n) * (differential(n) * u);
  if (n > 0) out += differential(n - 1) * (adjoint(n - 1) * u);
  return out;
}

double SpencerAssembly::anticommutation_residual() const {
  double acc = 0.0;
  for (int n = 0; n + 1 < top_degree(); ++n) {
    const SparseMatrix r = horizontal(n + 1) * vertical(n) + vertical(n + 1) * horizontal(n);
    acc += r.squaredNorm();
  }
  return std::sqrt(acc);
}

double SpencerAssembly::complex_residual(int n) const {
  if (n < 0 || n + 1 >= top_degree()) return 0.0;
  const SparseMatrix dd = differential(n + 1) * differential(n);
  const SparseMatrix scaled = scale_rows_cols(dd, mass(n + 2).cwiseSqrt(), mass(n).cwiseSqrt().cwiseInverse());
  return scaled.norm();
}

// ---------------------------------------------------------------------------

HarmonicSpace harmonic_space(const SpencerAssembly& assembly, int n, const EigenOptions& options) {
  if (n < 0 || n > assembly.top_degree()) throw Error(ErrorCode::DegreeOutOfRange, "total degree out of range");
  HarmonicSpace h;
  h.degree = n;
  const Eigen::VectorXd& mass = assembly.mass(n);
  const Eigen::VectorXd inv_sqrt = mass.cwiseSqrt().cwiseInverse();
  const SparseMatrix a = scale_rows_cols(assembly.stiffness(n), inv_sqrt, inv_sqrt);
  const std::size_t size = assembly.space_dim(n);

  EigenResult eig;
  if (size <= options.dense_limit) {
    eig = dense_symmetric_eigen(Eigen::MatrixXd(a));
  } else {
    const double lmax = largest_eigenvalue(a, options.seed);
    const double tol = options.kernel_tolerance * std::max(1.0, lmax);
    int nev = options.nev;
    while (true) {
      eig = smallest_eigenpairs(a, nev, lmax, options);
      const auto kernel = (eig.values.array() < tol).count();
      if (kernel < eig.values.size() || eig.complete) break;
      nev *= 2;
    }
  }
  h.eigenvalues = eig.values;
  h.eigenvectors = inv_sqrt.asDiagonal() * eig.vectors;
  h.spectrum_complete = eig.complete;
  h.lambda_max = eig.lambda_max;
  h.tolerance = options.kernel_tolerance * std::max(1.0, h.lambda_max);
  h.dimension = static_cast<int>((h.eigenvalues.array() < h.tolerance).count());
  h.min_eigenvalue = h.eigenvalues.size() > 0 ? h.eigenvalues.minCoeff() : 0.0;
  for (Eigen::Index i = 1; i < h.eigenvalues.size(); ++i)
    if (h.eigenvalues[i] < h.eigenvalues[i - 1]) h.sorted = false;
  h.nonnegative = h.min_eigenvalue >= -1e-10 * std::max(h.lambda_max, 0.0);

  std::mt19937_64 rng(options.seed + static_cast<std::uint64_t>(n));
  for (int trial = 0; trial < 4 && size > 0; ++trial) {
    const Eigen::VectorXd u = random_vector(static_cast<Eigen::Index>(size), rng);
    const Eigen::VectorXd v = random_vector(static_cast<Eigen::Index>(size), rng);
    const double lhs = assembly.inner(n, assembly.apply_laplacian(n, u), v);
    const double rhs = assembly.inner(n, u, assembly.apply_laplacian(n, v));
    const double scale = std::max(1.0, h.lambda_max) * assembly.norm(n, u) * assembly.norm(n, v);
    h.self_adjoint_residual = std::max(h.self_adjoint_residual, std::abs(lhs - rhs) / scale);
  }

  const Eigen::MatrixXd basis = h.basis();
  if (basis.cols() > 0) {
    const Eigen::MatrixXd gram = basis.transpose() * mass.asDiagonal() * basis;
    h.basis_orthonormality =
        (gram - Eigen::MatrixXd::Identity(basis.cols(), basis.cols())).cwiseAbs().maxCoeff();
  }
  return h;
}

Eigen::VectorXd harmonic_projection(const SpencerAssembly& assembly, const HarmonicSpace& h, const Eigen::VectorXd& u) {
  const Eigen::MatrixXd basis = h.basis();
  if (basis.cols() == 0) return Eigen::VectorXd::Zero(u.size());
  return basis * (basis.transpose() * assembly.mass(h.degree).cwiseProduct(u));
}

namespace {

/// Minimum-norm least-squares solution of min ||a x - b||.
Eigen::VectorXd least_squares(const SparseMatrix& a, const Eigen::VectorXd& b) {
  if (a.cols() == 0 || a.rows() == 0) return Eigen::VectorXd::Zero(a.cols());
  // b numerically orthogonal to the range: the minimum-norm solution is 0, and
  // LSCG's stopping test (relative to ||a^T b||) would be unreachable.
  const double scale = a.norm() * b.norm();
  if (!((a.transpose() * b).norm() > 1e-13 * scale)) return Eigen::VectorXd::Zero(a.cols());
  Eigen::LeastSquaresConjugateGradient<SparseMatrix> solver;
  solver.setTolerance(1e-15);
  solver.setMaxIterations(std::max<Eigen::Index>(1000, 20 * a.cols()));
  solver.compute(a);
  Eigen::VectorXd x = solver.solve(b);
  // Normal-equation residual against ||a|| ||b||, not ||a^T b||: for b almost
  // orthogonal to the range (e.g. a roundoff-sized remainder) the latter is tiny.
  const double achieved = scale > 0.0 ? (a.transpose() * (a * x - b)).norm() / scale : 0.0;
  if (!x.allFinite() || achieved > 1e-10)
    throw Error(ErrorCode::SolverFailure, "least-squares solve stalled at relative residual " + std::to_string(achieved));
  return x;
}

}  // namespace

HodgeDecomposition hodge_decompose(const SpencerAssembly& assembly, const HarmonicSpace& h, const Eigen::VectorXd& u) {
  const int n = h.degree;
  if (static_cast<std::size_t>(u.size()) != assembly.space_dim(n))
    throw Error(ErrorCode::ShapeMismatch, "cochain length does not match S^" + std::to_string(n));
  HodgeDecomposition out;
  out.harmonic = harmonic_projection(assembly, h, u);
  const Eigen::VectorXd rest = u - out.harmonic;
  const Eigen::VectorXd sqrt_n = assembly.mass(n).cwiseSqrt();
  const Eigen::VectorXd rest_scaled = sqrt_n.cwiseProduct(rest);

  // One joint least-squares solve for both potentials. When D D = 0 the two
  // ranges are orthogonal and this is the usual pair of projections; otherwise
  // they only span the complement of the harmonic space together.
  const auto prev_dim = static_cast<Eigen::Index>(assembly.space_dim(n - 1));
  const auto next_dim = static_cast<Eigen::Index>(assembly.space_dim(n + 1));
  const Eigen::VectorXd inv_prev = n > 0 ? assembly.mass(n - 1).cwiseSqrt().cwiseInverse().eval() : Eigen::VectorXd();
  const Eigen::VectorXd sqrt_next = n < assembly.top_degree() ? assembly.mass(n + 1).cwiseSqrt().eval() : Eigen::VectorXd();
  std::vector<Triplet> joint;
  if (n > 0) {
    const SparseMatrix scaled = scale_rows_cols(assembly.differential(n - 1), sqrt_n, inv_prev);
    for (int k = 0; k < scaled.outerSize(); ++k)
      for (SparseMatrix::InnerIterator it(scaled, k); it; ++it) joint.emplace_back(it.row(), it.col(), it.value());
  }
  if (n < assembly.top_degree()) {
    const SparseMatrix scaled = scale_rows_cols(assembly.differential(n), sqrt_next, sqrt_n.cwiseInverse());
    for (int k = 0; k < scaled.outerSize(); ++k)
      for (SparseMatrix::InnerIterator it(scaled, k); it; ++it)
        joint.emplace_back(it.col(), static_cast<int>(prev_dim + it.row()), it.value());
  }
  SparseMatrix system(u.size(), prev_dim + next_dim);
  system.setFromTriplets(joint.begin(), joint.end());
  const Eigen::VectorXd potentials = least_squares(system, rest_scaled);

  out.exact = Eigen::VectorXd::Zero(u.size());
  out.exact_potential = Eigen::VectorXd::Zero(prev_dim);
  if (n > 0) {
    out.exact_potential = inv_prev.cwiseProduct(potentials.head(prev_dim));
    out.exact = assembly.differential(n - 1) * out.exact_potential;
  }
  out.coexact = Eigen::VectorXd::Zero(u.size());
  out.coexact_potential = Eigen::VectorXd::Zero(next_dim);
  if (n < assembly.top_degree()) {
    out.coexact_potential = sqrt_next.cwiseInverse().cwiseProduct(potentials.tail(next_dim));
    out.coexact = assembly.adjoint(n) * out.coexact_potential;
  }

  const double norm2 = std::max(assembly.inner(n, u, u), 1e-300);
  const double norm = std::sqrt(norm2);
  out.reconstruction_residual = assembly.norm(n, u - out.harmonic - out.exact - out.coexact) / norm;
  out.harmonic_exact = std::abs(assembly.inner(n, out.harmonic, out.exact)) / norm2;
  out.harmonic_coexact = std::abs(assembly.inner(n, out.harmonic, out.coexact)) / norm2;
  out.exact_coexact = std::abs(assembly.inner(n, out.exact, out.coexact)) / norm2;
  if (n > 0 && n < assembly.top_degree()) {
    out.orthogonality_bound = assembly.complex_residual(n - 1) * assembly.norm(n - 1, out.exact_potential) *
                              assembly.norm(n + 1, out.coexact_potential) / norm2;
  }
  return out;
}

Eigen::VectorXd green_apply(const SpencerAssembly& assembly, const HarmonicSpace& h, const Eigen::VectorXd& u) {
  const int n = h.degree;
  if (static_cast<std::size_t>(u.size()) != assembly.space_dim(n))
    throw Error(ErrorCode::ShapeMismatch, "cochain length does not match S^" + std::to_string(n));
  const Eigen::VectorXd& mass = assembly.mass(n);
  if (h.spectrum_complete) {
    const Eigen::VectorXd coeffs = h.eigenvectors.transpose() * mass.cwiseProduct(u);
    Eigen::VectorXd v = Eigen::VectorXd::Zero(u.size());
    for (Eigen::Index i = h.dimension; i < h.eigenvalues.size(); ++i)
      v += (coeffs[i] / h.eigenvalues[i]) * h.eigenvectors.col(i);
    return v;
  }
  const Eigen::VectorXd sqrt_m = mass.cwiseSqrt();
  const Eigen::VectorXd inv_sqrt = sqrt_m.cwiseInverse();
  const SparseMatrix a = scale_rows_cols(assembly.stiffness(n), inv_sqrt, inv_sqrt);
  const Eigen::VectorXd rhs = sqrt_m.cwiseProduct(u - harmonic_projection(assembly, h, u));
  Eigen::ConjugateGradient<SparseMatrix, Eigen::Lower | Eigen::Upper> cg;
  cg.setTolerance(1e-14);
  cg.setMaxIterations(std::max<Eigen::Index>(1000, 10 * a.rows()));
  cg.compute(a);
  Eigen::VectorXd y = cg.solve(rhs);
  if (!y.allFinite()) throw Error(ErrorCode::SolverFailure, "Green operator solve diverged");
  Eigen::VectorXd v = inv_sqrt.cwiseProduct(y);
  return v - harmonic_projection(assembly, h, v);
}

double green_residual(const SpencerAssembly& assembly, const HarmonicSpace& h, const Eigen::VectorXd& u,
                      const Eigen::VectorXd& v) {
  const int n = h.degree;
  const Eigen::VectorXd target = u - harmonic_projection(assembly, h, u);
  return assembly.norm(n, assembly.apply_laplacian(n, v) - target) / std::max(assembly.norm(n, u), 1e-300);
}

// ---------------------------------------------------------------------------

MetricEquivalence metric_equivalence(const PairField& field) {
  const auto& w = field.weights(WeightKind::Constraint);
  const auto& k = field.weights(WeightKind::Curvature);
  MetricEquivalence e;
  e.w_min = w.minCoeff();
  e.w_max = w.maxCoeff();
  e.kappa_min = k.minCoeff();
  e.kappa_max = k.maxCoeff();
  e.c1 = e.w_min / e.kappa_max;
  e.c2 = e.w_max / e.kappa_min;
  return e;
}

SandwichReport sandwich_check(const PairField& field, int truncation, SymInner inner, int n, int samples,
                              std::uint64_t seed) {
  const MetricEquivalence e = metric_equivalence(field);
  const Eigen::VectorXd ma = metric_mass(field, truncation, inner, MetricChoice::a(), n);
  const Eigen::VectorXd mb = metric_mass(field, truncation, inner, MetricChoice::b(), n);
  std::mt19937_64 rng(seed);
  SandwichReport r;
  r.samples = samples;
  r.ratio_min = std::numeric_limits<double>::infinity();
  r.ratio_max = 0.0;
  r.holds_a_outside = true;
  r.holds_b_outside = true;
  constexpr double slack = 1e-12;
  for (int s = 0; s < samples; ++s) {
    const Eigen::VectorXd u = random_vector(ma.size(), rng);
    const double na = u.cwiseAbs2().dot(ma);
    const double nb = u.cwiseAbs2().dot(mb);
    r.ratio_min = std::min(r.ratio_min, nb / na);
    r.ratio_max = std::max(r.ratio_max, nb / na);
    if (e.c1 * na > nb * (1.0 + slack) || nb > e.c2 * na * (1.0 + slack)) r.holds_a_outside = false;
    if (e.c1 * nb > na * (1.0 + slack) || na > e.c2 * nb * (1.0 + slack)) r.holds_b_outside = false;
  }
  return r;
}

namespace {

double first_nonzero(const Eigen::VectorXd& values, double tol) {
  for (Eigen::Index i = 0; i < values.size(); ++i)
    if (values[i] > tol) return values[i];
  return 0.0;
}

}  // namespace

EllipticEstimate elliptic_constant_estimate(const PairField& field, const SpencerOptions& spencer,
                                            const EigenOptions& eigen) {
  const MetricEquivalence eq = metric_equivalence(field);
  EllipticEstimate e;
  e.inf_w = eq.w_min;
  e.sup_w = eq.w_max;
  e.inf_kappa = eq.kappa_min;
  e.sup_kappa = eq.kappa_max;
  e.inf_gap = transversality_summary(field).min_gap;

  // unweighted scalar Laplacian d*d on 0-forms
  const TorusMesh& mesh = field.mesh();
  const SparseMatrix& d0 = mesh.derivative(0);
  const Eigen::VectorXd inv_sqrt = mesh.cell_volume(0).cwiseSqrt().cwiseInverse();
  const SparseMatrix k = SparseMatrix(d0.transpose() * mesh.cell_volume(1).asDiagonal() * d0);
  const SparseMatrix a = scale_rows_cols(k, inv_sqrt, inv_sqrt);
  EigenResult spectrum;
  if (static_cast<std::size_t>(a.rows()) <= eigen.dense_limit) {
    spectrum = dense_symmetric_eigen(Eigen::MatrixXd(a));
  } else {
    const double lmax = largest_eigenvalue(a, eigen.seed);
    spectrum = smallest_eigenpairs(a, 4, lmax, eigen);
  }
  e.lambda1_dd = first_nonzero(spectrum.values, eigen.kernel_tolerance * std::max(1.0, spectrum.lambda_max));

  // delta*delta on Sym^1, linear in lambda
  const LieAlgebra& alg = field.algebra();
  const int d = alg.dim();
  SpencerOptions opts = spencer;
  opts.degree_cap = std::max(opts.degree_cap, 2);
  std::vector<Eigen::MatrixXd> basis;
  for (int i = 0; i < d; ++i) basis.push_back(SpencerMaps(alg, DualVector::basis(d, i), 2, opts).map(1));
  const auto s1 = sym_space(d, 1);
  const auto s2 = sym_space(d, 2);
  double lambda1 = std::numeric_limits<double>::infinity();
  for (std::size_t v = 0; v < mesh.cell_count(0); ++v) {
    const DualVector lambda = field.lambda_at_cell(0, v);
    Eigen::MatrixXd delta = Eigen::MatrixXd::Zero(basis[0].rows(), basis[0].cols());
    for (int i = 0; i < d; ++i) delta += lambda.coeffs[i] * basis[static_cast<std::size_t>(i)];
    // G1^{-1/2} delta^T G2 delta G1^{-1/2} shares its spectrum with delta* delta
    const Eigen::VectorXd g1 = s1->gram_diagonal(spencer.inner).cwiseSqrt().cwiseInverse();
    const Eigen::VectorXd g2 = s2->gram_diagonal(spencer.inner).cwiseSqrt();
    const Eigen::MatrixXd half = g2.asDiagonal() * delta * g1.asDiagonal();
    Eigen::SelfAdjointEigenSolver<Eigen::MatrixXd> eig(half.transpose() * half, Eigen::EigenvaluesOnly);
    const double top = eig.eigenvalues().maxCoeff();
    lambda1 = std::min(lambda1, first_nonzero(eig.eigenvalues(), 1e-12 * std::max(top, 1e-300)));
  }
  e.lambda1_delta = std::isfinite(lambda1) ? lambda1 : 0.0;

  const double spectral = std::min(e.lambda1_dd, e.lambda1_delta);
  e.c_a = e.inf_w * e.inf_gap * spectral;
  e.c_b = e.inf_kappa * e.inf_gap * spectral;
  return e;
}

}  // namespace spencer
