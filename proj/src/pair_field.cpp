#include "spencer/pair_field.hpp"

#include "spencer/error.hpp"
#include "spencer/parallel.hpp"

#include <cmath>
#include <numbers>

namespace spencer {

namespace {

constexpr double kDegenerateNormSquared = 1e-28;

Eigen::MatrixXd sample_on_lattice(const TorusMesh& mesh, const VectorField& f, int expected_dim) {
  const std::size_t points = mesh.half_grid_size();
  Eigen::MatrixXd out(expected_dim, static_cast<Eigen::Index>(points));
  const int ex = mesh.half_grid_extent(0);
  parallel_for(points, [&](std::size_t p) {
    const HalfGridIndex g{static_cast<int>(p % static_cast<std::size_t>(ex)), static_cast<int>(p / static_cast<std::size_t>(ex))};
    const Eigen::VectorXd v = f(mesh.half_grid_position(g));
    if (v.size() != expected_dim) throw Error(ErrorCode::DimensionMismatch, "field returned wrong component count");
    out.col(static_cast<Eigen::Index>(p)) = v;
  });
  return out;
}

Eigen::MatrixXd interpolate_vertices(const TorusMesh& mesh, const Eigen::MatrixXd& table) {
  if (static_cast<std::size_t>(table.cols()) != mesh.cell_count(0))
    throw Error(ErrorCode::ShapeMismatch, "vertex table needs one column per vertex");
  const int ex = mesh.half_grid_extent(0);
  const int ey = mesh.half_grid_extent(1);
  const int n1 = mesh.resolution(0);
  const int n2 = mesh.dim() == 2 ? mesh.resolution(1) : 1;
  auto vertex = [&](int i, int j) {
    return table.col(((i % n1 + n1) % n1) + n1 * ((j % n2 + n2) % n2));
  };
  Eigen::MatrixXd out(table.rows(), static_cast<Eigen::Index>(mesh.half_grid_size()));
  for (int gy = 0; gy < ey; ++gy)
    for (int gx = 0; gx < ex; ++gx) {
      const int i = gx / 2;
      const int j = gy / 2;
      const bool mx = gx % 2 == 1;
      const bool my = gy % 2 == 1;
      Eigen::VectorXd v;
      if (!mx && !my) v = vertex(i, j);
      else if (mx && !my) v = 0.5 * (vertex(i, j) + vertex(i + 1, j));
      else if (!mx && my) v = 0.5 * (vertex(i, j) + vertex(i, j + 1));
      else v = 0.25 * (vertex(i, j) + vertex(i + 1, j) + vertex(i, j + 1) + vertex(i + 1, j + 1));
      out.col(static_cast<Eigen::Index>(mesh.half_grid_linear({gx, gy}))) = v;
    }
  return out;
}

}  // namespace

PairField::PairField(std::shared_ptr<const TorusMesh> mesh, std::shared_ptr<const LieAlgebra> alg,
                     Eigen::MatrixXd lambda, std::vector<Eigen::MatrixXd> omega)
    : mesh_(std::move(mesh)), alg_(std::move(alg)), lambda_(std::move(lambda)), omega_(std::move(omega)) {
  const int n = mesh_->dim();
  const int d = alg_->dim();
  const auto points = static_cast<Eigen::Index>(mesh_->half_grid_size());
  if (static_cast<int>(omega_.size()) != n) throw Error(ErrorCode::DimensionMismatch, "need one omega component per axis");
  if (lambda_.rows() != d || lambda_.cols() != points) throw Error(ErrorCode::ShapeMismatch, "lambda samples");
  for (const auto& o : omega_)
    if (o.rows() != d || o.cols() != points) throw Error(ErrorCode::ShapeMismatch, "omega samples");

  const Eigen::MatrixXd& gram = alg_->dual_gram();
  for (Eigen::Index p = 0; p < points; ++p) {
    const double norm2 = lambda_.col(p).dot(gram * lambda_.col(p));
    if (!(norm2 > kDegenerateNormSquared)) {
      throw Error(ErrorCode::DegenerateLambda,
                  "||lambda|| = 0 at sample " + std::to_string(p) + " (position " +
                      std::to_string(mesh_->half_grid_position({static_cast<int>(p % mesh_->half_grid_extent(0)),
                                                                static_cast<int>(p / mesh_->half_grid_extent(0))})[0]) +
                      ")");
    }
  }

  // d_a lambda + ad*_{omega_a} lambda
  covariant_.resize(static_cast<std::size_t>(n));
  for (int a = 0; a < n; ++a) {
    Eigen::MatrixXd cov = central_difference(lambda_, a);
    for (Eigen::Index p = 0; p < points; ++p)
      cov.col(p) += alg_->coadjoint_matrix(omega_[static_cast<std::size_t>(a)].col(p)) * lambda_.col(p);
    covariant_[static_cast<std::size_t>(a)] = std::move(cov);
  }

  curvature_ = Eigen::MatrixXd::Zero(d, points);
  if (n == 2) {
    curvature_ = central_difference(omega_[1], 0) - central_difference(omega_[0], 1);
    for (Eigen::Index p = 0; p < points; ++p) curvature_.col(p) += alg_->bracket(omega_[0].col(p), omega_[1].col(p));
  }

  const Eigen::MatrixXd neg_killing = -alg_->killing();
  w_lambda_.resize(points);
  w_enhanced_.resize(points);
  cartan_.resize(points);
  kappa_.resize(points);
  std::vector<Eigen::MatrixXd> curvature_derivatives;
  if (n == 2) curvature_derivatives = {central_difference(curvature_, 0), central_difference(curvature_, 1)};
  for (Eigen::Index p = 0; p < points; ++p) {
    const double lam2 = lambda_.col(p).dot(gram * lambda_.col(p));
    double cov2 = 0.0;
    for (const auto& c : covariant_) cov2 += c.col(p).dot(gram * c.col(p));
    w_lambda_[p] = 1.0 + lam2;
    w_enhanced_[p] = 1.0 + lam2 + cov2;
    cartan_[p] = std::sqrt(cov2);
    double k = 1.0 + curvature_.col(p).dot(neg_killing * curvature_.col(p));
    for (const auto& dc : curvature_derivatives) k += dc.col(p).dot(neg_killing * dc.col(p));
    kappa_[p] = k;
  }
}

Eigen::MatrixXd PairField::central_difference(const Eigen::MatrixXd& f, int axis) const {
  // Lattice spacing is h/2, so the centred stencil divides by h.
  const int ex = mesh_->half_grid_extent(0);
  const int ey = mesh_->half_grid_extent(1);
  const double h = mesh_->spacing(axis);
  Eigen::MatrixXd out(f.rows(), f.cols());
  for (int gy = 0; gy < ey; ++gy)
    for (int gx = 0; gx < ex; ++gx) {
      HalfGridIndex plus{gx, gy};
      HalfGridIndex minus{gx, gy};
      if (axis == 0) {
        plus.x += 1;
        minus.x -= 1;
      } else {
        plus.y += 1;
        minus.y -= 1;
      }
      out.col(static_cast<Eigen::Index>(mesh_->half_grid_linear({gx, gy}))) =
          (f.col(static_cast<Eigen::Index>(mesh_->half_grid_linear(plus))) -
           f.col(static_cast<Eigen::Index>(mesh_->half_grid_linear(minus)))) /
          h;
    }
  return out;
}

PairField PairField::sample(std::shared_ptr<const TorusMesh> mesh, std::shared_ptr<const LieAlgebra> alg,
                            const VectorField& lambda, const std::vector<VectorField>& omega) {
  if (static_cast<int>(omega.size()) != mesh->dim())
    throw Error(ErrorCode::DimensionMismatch, "need one omega component per axis");
  Eigen::MatrixXd lam = sample_on_lattice(*mesh, lambda, alg->dim());
  std::vector<Eigen::MatrixXd> om;
  for (const auto& f : omega) om.push_back(sample_on_lattice(*mesh, f, alg->dim()));
  return PairField(std::move(mesh), std::move(alg), std::move(lam), std::move(om));
}

PairField PairField::from_vertex_tables(std::shared_ptr<const TorusMesh> mesh, std::shared_ptr<const LieAlgebra> alg,
                                        const Eigen::MatrixXd& lambda, const std::vector<Eigen::MatrixXd>& omega) {
  if (lambda.rows() != alg->dim()) throw Error(ErrorCode::ShapeMismatch, "lambda table needs dim g rows");
  if (static_cast<int>(omega.size()) != mesh->dim())
    throw Error(ErrorCode::DimensionMismatch, "need one omega table per axis");
  Eigen::MatrixXd lam = interpolate_vertices(*mesh, lambda);
  std::vector<Eigen::MatrixXd> om;
  for (const auto& t : omega) {
    if (t.rows() != alg->dim()) throw Error(ErrorCode::ShapeMismatch, "omega table needs dim g rows");
    om.push_back(interpolate_vertices(*mesh, t));
  }
  return PairField(std::move(mesh), std::move(alg), std::move(lam), std::move(om));
}

PairField PairField::with_lambda_perturbation(const VectorField& delta) const {
  Eigen::MatrixXd lam = lambda_ + sample_on_lattice(*mesh_, delta, alg_->dim());
  return PairField(mesh_, alg_, std::move(lam), omega_);
}

PairField PairField::transformed(const Eigen::MatrixXd& lambda_map, const Eigen::MatrixXd& omega_map) const {
  Eigen::MatrixXd lam = lambda_map * lambda_;
  std::vector<Eigen::MatrixXd> om;
  for (const auto& o : omega_) om.push_back(omega_map * o);
  return PairField(mesh_, alg_, std::move(lam), std::move(om));
}

const Eigen::VectorXd& PairField::weights(WeightKind kind) const {
  switch (kind) {
    case WeightKind::Constraint: return w_lambda_;
    case WeightKind::ConstraintEnhanced: return w_enhanced_;
    case WeightKind::Curvature: return kappa_;
  }
  return w_lambda_;
}

Eigen::VectorXd PairField::constraint_strength() const { return (w_lambda_.array() - 1.0).sqrt().matrix(); }

PairField sample_fields(std::shared_ptr<const TorusMesh> mesh, std::shared_ptr<const LieAlgebra> alg,
                        const VectorField& lambda, const std::vector<VectorField>& omega) {
  return PairField::sample(std::move(mesh), std::move(alg), lambda, omega);
}

namespace {

Eigen::VectorXd at_vertices(const PairField& field, const Eigen::VectorXd& lattice) {
  const std::size_t nv = field.mesh().cell_count(0);
  Eigen::VectorXd out(static_cast<Eigen::Index>(nv));
  for (std::size_t v = 0; v < nv; ++v) out[static_cast<Eigen::Index>(v)] = lattice[static_cast<Eigen::Index>(field.point_of_cell(0, v))];
  return out;
}

}  // namespace

Eigen::MatrixXd curvature(const PairField& field) {
  if (field.mesh().dim() < 2) throw Error(ErrorCode::DimensionUnsupported, "curvature needs a 2-dimensional base");
  const std::size_t nf = field.mesh().cell_count(2);
  Eigen::MatrixXd out(field.algebra().dim(), static_cast<Eigen::Index>(nf));
  for (std::size_t f = 0; f < nf; ++f) out.col(static_cast<Eigen::Index>(f)) = field.curvature_at(field.point_of_cell(2, f));
  return out;
}

Eigen::VectorXd weight_constraint(const PairField& field) {
  return at_vertices(field, field.weights(WeightKind::Constraint));
}

Eigen::VectorXd weight_constraint_enhanced(const PairField& field) {
  return at_vertices(field, field.weights(WeightKind::ConstraintEnhanced));
}

Eigen::VectorXd weight_curvature(const PairField& field) { return at_vertices(field, field.weights(WeightKind::Curvature)); }

CartanResidual cartan_residual(const PairField& field) {
  CartanResidual r;
  r.per_vertex = at_vertices(field, field.cartan_residual_points());
  r.l2 = std::sqrt(r.per_vertex.cwiseAbs2().dot(field.mesh().cell_volume(0)));
  r.max = r.per_vertex.size() > 0 ? r.per_vertex.maxCoeff() : 0.0;
  return r;
}

Transversality transversality_margin(const PairField& field, std::size_t point, const Eigen::VectorXd& xi) {
  const int n = field.mesh().dim();
  const int d = field.algebra().dim();
  if (xi.size() != n) throw Error(ErrorCode::DimensionMismatch, "covector needs one entry per base axis");
  if (xi.norm() == 0.0) throw Error(ErrorCode::ZeroCovector, "xi must be nonzero");

  const DualVector lambda = field.lambda_at(point);
  // Coordinates on T_pP = T_xM + g: Euclidean base part, Killing-orthonormal fibre part.
  Eigen::MatrixXd phi = Eigen::MatrixXd::Zero(2, n + d);
  double horizontal2 = 0.0;
  for (int a = 0; a < n; ++a) {
    const double h = lambda.pair(field.omega_at(a, point));
    phi(0, a) = h;
    phi(1, a) = xi[a];
    horizontal2 += h * h;
  }
  const Eigen::VectorXd vertical = field.algebra().onb_transform().transpose() * lambda.coeffs;
  phi.block(0, n, 1, d) = vertical.transpose();

  Transversality t;
  Eigen::JacobiSVD<Eigen::MatrixXd> svd(phi);
  t.margin = svd.singularValues()(1);

  const double vertical2 = vertical.squaredNorm();
  const double total = vertical2 + horizontal2;
  const double cos_theta = total > 0.0 ? std::sqrt(horizontal2 / total) : 1.0;
  t.gap = std::sqrt(std::max(0.0, 2.0 - 2.0 * cos_theta));
  return t;
}

TransversalitySummary transversality_summary(const PairField& field, int directions) {
  const int n = field.mesh().dim();
  std::vector<Eigen::VectorXd> xis;
  if (n == 1) {
    xis.push_back(Eigen::VectorXd::Ones(1));
  } else {
    for (int i = 0; i < directions; ++i) {
      const double angle = std::numbers::pi * i / directions;
      Eigen::VectorXd xi(2);
      xi << std::cos(angle), std::sin(angle);
      xis.push_back(xi);
    }
  }
  TransversalitySummary s{std::numeric_limits<double>::infinity(), std::numeric_limits<double>::infinity()};
  for (std::size_t p = 0; p < field.point_count(); ++p)
    for (const auto& xi : xis) {
      const auto t = transversality_margin(field, p, xi);
      s.min_margin = std::min(s.min_margin, t.margin);
      s.min_gap = std::min(s.min_gap, t.gap);
    }
  return s;
}

// ---------------------------------------------------------------------------

CompatibilityFunctional::CompatibilityFunctional(const TorusMesh& mesh, const LieAlgebra& alg,
                                                 std::vector<Eigen::MatrixXd> omega, Eigen::MatrixXd target, double alpha)
    : mesh_(mesh), alg_(alg), omega_(std::move(omega)), target_(std::move(target)), alpha_(alpha),
      volume_(mesh.cell_volume(0)[0]) {
  const auto nv = static_cast<Eigen::Index>(mesh.cell_count(0));
  if (alpha_ < 0.0) throw Error(ErrorCode::ConfigError, "alpha must be >= 0");
  if (static_cast<int>(omega_.size()) != mesh.dim()) throw Error(ErrorCode::DimensionMismatch, "omega components");
  for (const auto& o : omega_)
    if (o.rows() != alg.dim() || o.cols() != nv) throw Error(ErrorCode::ShapeMismatch, "omega vertex table");
  if (alpha_ > 0.0 && (target_.rows() != alg.dim() || target_.cols() != nv))
    throw Error(ErrorCode::ShapeMismatch, "target covector table");
  for (const auto& o : omega_) {
    std::vector<Eigen::MatrixXd> per_vertex;
    per_vertex.reserve(static_cast<std::size_t>(nv));
    for (Eigen::Index v = 0; v < nv; ++v) per_vertex.push_back(alg.coadjoint_matrix(o.col(v)));
    coadjoint_.push_back(std::move(per_vertex));
  }
}

Eigen::MatrixXd CompatibilityFunctional::shift(const Eigen::MatrixXd& f, int axis, int offset) const {
  // out(:, v) = f(:, v + offset e_axis)
  const int n1 = mesh_.resolution(0);
  const int n2 = mesh_.dim() == 2 ? mesh_.resolution(1) : 1;
  Eigen::MatrixXd out(f.rows(), f.cols());
  for (int j = 0; j < n2; ++j)
    for (int i = 0; i < n1; ++i) {
      int si = i;
      int sj = j;
      if (axis == 0) si = ((i + offset) % n1 + n1) % n1;
      else sj = ((j + offset) % n2 + n2) % n2;
      out.col(i + n1 * j) = f.col(si + n1 * sj);
    }
  return out;
}

std::vector<Eigen::MatrixXd> CompatibilityFunctional::residual(const Eigen::MatrixXd& lambda) const {
  std::vector<Eigen::MatrixXd> out;
  for (int a = 0; a < mesh_.dim(); ++a) {
    Eigen::MatrixXd r = (shift(lambda, a, 1) - shift(lambda, a, -1)) / (2.0 * mesh_.spacing(a));
    for (Eigen::Index v = 0; v < r.cols(); ++v) r.col(v) += coadjoint_[static_cast<std::size_t>(a)][static_cast<std::size_t>(v)] * lambda.col(v);
    out.push_back(std::move(r));
  }
  return out;
}

double CompatibilityFunctional::residual_l2(const Eigen::MatrixXd& lambda) const {
  double acc = 0.0;
  for (const auto& r : residual(lambda)) acc += (r.transpose() * alg_.dual_gram() * r).trace();
  return std::sqrt(acc * volume_);
}

double CompatibilityFunctional::value(const Eigen::MatrixXd& lambda) const {
  double residual_term = 0.0;
  for (const auto& r : residual(lambda)) residual_term += (r.transpose() * alg_.dual_gram() * r).trace();
  double penalty = 0.0;
  if (alpha_ > 0.0) {
    const Eigen::MatrixXd& g = alg_.dual_gram();
    for (Eigen::Index v = 0; v < lambda.cols(); ++v) {
      const Eigen::VectorXd l = lambda.col(v);
      const Eigen::VectorXd mu = target_.col(v);
      const double mm = mu.dot(g * mu);
      // Perpendicular part formed explicitly; ||l||^2 - <l,mu>^2/||mu||^2 cancels badly near the line.
      const Eigen::VectorXd perp = mm > 0.0 ? (l - (l.dot(g * mu) / mm) * mu).eval() : l;
      penalty += perp.dot(g * perp);
    }
  }
  return volume_ * (0.5 * residual_term + alpha_ * penalty);
}

Eigen::MatrixXd CompatibilityFunctional::gradient(const Eigen::MatrixXd& lambda) const {
  const Eigen::MatrixXd& g = alg_.dual_gram();
  Eigen::MatrixXd grad = Eigen::MatrixXd::Zero(lambda.rows(), lambda.cols());
  const auto res = residual(lambda);
  for (int a = 0; a < mesh_.dim(); ++a) {
    const Eigen::MatrixXd gr = g * res[static_cast<std::size_t>(a)];
    // Transpose of the centred difference: (gr(v-1) - gr(v+1)) / 2h.
    grad += (shift(gr, a, -1) - shift(gr, a, 1)) / (2.0 * mesh_.spacing(a));
    for (Eigen::Index v = 0; v < lambda.cols(); ++v)
      grad.col(v) += coadjoint_[static_cast<std::size_t>(a)][static_cast<std::size_t>(v)].transpose() * gr.col(v);
  }
  if (alpha_ > 0.0) {
    for (Eigen::Index v = 0; v < lambda.cols(); ++v) {
      const Eigen::VectorXd l = lambda.col(v);
      const Eigen::VectorXd mu = target_.col(v);
      const double mm = mu.dot(g * mu);
      Eigen::VectorXd pen = g * l;
      if (mm > 0.0) pen -= (l.dot(g * mu) / mm) * (g * mu);
      grad.col(v) += 2.0 * alpha_ * pen;
    }
  }
  return volume_ * grad;
}

double CompatibilityFunctional::alignment_distance(const Eigen::MatrixXd& lambda) const {
  const Eigen::MatrixXd& g = alg_.dual_gram();
  double worst = 0.0;
  for (Eigen::Index v = 0; v < lambda.cols(); ++v) {
    const Eigen::VectorXd l = lambda.col(v);
    const Eigen::VectorXd mu = target_.col(v);
    const double ll = l.dot(g * l);
    const double mm = mu.dot(g * mu);
    const Eigen::VectorXd perp = mm > 0.0 ? (l - (l.dot(g * mu) / mm) * mu).eval() : l;
    const double dist2 = perp.dot(g * perp);
    worst = std::max(worst, ll > 0.0 ? std::sqrt(dist2 / ll) : 0.0);
  }
  return worst;
}

FitResult fit_lambda(const TorusMesh& mesh, const LieAlgebra& alg, const std::vector<Eigen::MatrixXd>& omega,
                     const Eigen::MatrixXd& target, const Eigen::MatrixXd& initial, const FitOptions& options) {
  const CompatibilityFunctional functional(mesh, alg, omega, target, options.alpha);
  if (initial.rows() != alg.dim() || static_cast<std::size_t>(initial.cols()) != mesh.cell_count(0))
    throw Error(ErrorCode::ShapeMismatch, "initial lambda table");

  FitResult result;
  result.lambda = initial;
  double current = functional.value(result.lambda);
  result.objective_trace.push_back(current);

  bool converged = current <= options.objective_floor;
  while (!converged && result.iterations < options.max_iterations) {
    const Eigen::MatrixXd grad = functional.gradient(result.lambda);
    double step = options.step;
    bool accepted = false;
    for (int h = 0; h <= options.max_halvings; ++h, step *= 0.5) {
      Eigen::MatrixXd trial = result.lambda - step * grad;
      const double value = functional.value(trial);
      if (value < current) {
        const double decrease = (current - value) / current;
        result.lambda = std::move(trial);
        current = value;
        result.objective_trace.push_back(current);
        ++result.iterations;
        accepted = true;
        converged = decrease < options.tolerance || current <= options.objective_floor;
        break;
      }
    }
    if (!accepted) {
      // No decrease at any step length: either at a minimiser to roundoff or stuck.
      if (grad.norm() <= 1e-9 * (1.0 + result.lambda.norm())) {
        converged = true;
        break;
      }
      throw Error(ErrorCode::StepCollapse, "no decrease after " + std::to_string(options.max_halvings) + " halvings");
    }
  }
  result.final_objective = current;
  result.final_residual = functional.residual_l2(result.lambda);
  if (!converged) {
    throw Error(ErrorCode::NonConvergence, "objective " + std::to_string(current) + " after " +
                                               std::to_string(result.iterations) + " iterations");
  }
  return result;
}

}  // namespace spencer
