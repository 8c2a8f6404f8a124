#include "spencer/pipeline.hpp"

#include "spencer/error.hpp"

#include <Eigen/SVD>

#include <algorithm>

namespace spencer {

const char* step_name(PipelineStep step) {
  switch (step) {
    case PipelineStep::SelectMetric: return "metric selection";
    case PipelineStep::Assemble: return "Laplacian assembly";
    case PipelineStep::Eigensolve: return "eigenvalue problem";
    case PipelineStep::ExtractHarmonic: return "harmonic extraction";
    case PipelineStep::CohomologyBasis: return "cohomology basis";
    case PipelineStep::Analyze: return "dimension analysis";
  }
  return "unknown";
}

std::vector<double> field_nilpotency_residual(const PairField& field, const SpencerOptions& options, int truncation) {
  const LieAlgebra& alg = field.algebra();
  const int d = alg.dim();
  const int top = std::max(truncation, 3);
  SpencerOptions opts = options;
  opts.degree_cap = std::max(opts.degree_cap, top);
  std::vector<std::vector<Eigen::MatrixXd>> basis;
  for (int i = 0; i < d; ++i) {
    SpencerMaps maps(alg, DualVector::basis(d, i), top, opts);
    std::vector<Eigen::MatrixXd> per;
    for (int j = 0; j < top; ++j) per.push_back(maps.map(j));
    basis.push_back(std::move(per));
  }
  std::vector<double> out(static_cast<std::size_t>(top - 1), 0.0);
  const TorusMesh& mesh = field.mesh();
  for (std::size_t v = 0; v < mesh.cell_count(0); ++v) {
    const DualVector lambda = field.lambda_at_cell(0, v);
    std::vector<Eigen::MatrixXd> maps;
    for (int j = 0; j < top; ++j) {
      Eigen::MatrixXd m = Eigen::MatrixXd::Zero(basis[0][static_cast<std::size_t>(j)].rows(),
                                                basis[0][static_cast<std::size_t>(j)].cols());
      for (int i = 0; i < d; ++i) m += lambda.coeffs[i] * basis[static_cast<std::size_t>(i)][static_cast<std::size_t>(j)];
      maps.push_back(std::move(m));
    }
    for (int j = 0; j + 1 < top; ++j) {
      const Eigen::MatrixXd prod = maps[static_cast<std::size_t>(j + 1)] * maps[static_cast<std::size_t>(j)];
      const double norm = prod.size() == 0 ? 0.0 : Eigen::JacobiSVD<Eigen::MatrixXd>(prod).singularValues()(0);
      out[static_cast<std::size_t>(j)] = std::max(out[static_cast<std::size_t>(j)], norm);
    }
  }
  return out;
}

PipelineState run_pipeline_state(const PipelineConfig& config) {
  PipelineState state;
  SpectrumReport& report = state.report;
  if (!config.field) throw PipelineError(PipelineStep::SelectMetric, "no field supplied");
  const PairField& field = *config.field;
  report.truncation = config.truncation;

  // Step 1: metric weights must be positive everywhere.
  try {
    report.metric_tag = config.metric.tag();
    report.equivalence = metric_equivalence(field);
    const double w_min = config.metric.weight(report.equivalence.w_min, report.equivalence.kappa_min);
    if (!(report.equivalence.w_min > 0.0 && report.equivalence.kappa_min > 0.0 && w_min > 0.0))
      throw Error(ErrorCode::NonPositiveWeight, "metric weight is not positive");
  } catch (const Error& e) {
    throw PipelineError(PipelineStep::SelectMetric, e.what());
  }

  // Step 2: discretised Spencer-Hodge Laplacian.
  try {
    state.assembly = std::make_shared<SpencerAssembly>(config.field,
                                                       AssemblyOptions{config.truncation, config.metric, config.spencer});
  } catch (const Error& e) {
    throw PipelineError(PipelineStep::Assemble, e.what());
  }
  const SpencerAssembly& assembly = *state.assembly;
  const int top = assembly.top_degree();

  // Step 3: generalised eigenproblems, one per total degree.
  for (int n = 0; n <= top; ++n) {
    try {
      state.harmonic.push_back(harmonic_space(assembly, n, config.eigen));
    } catch (const Error& e) {
      throw PipelineError(PipelineStep::Eigensolve, "degree " + std::to_string(n) + ": " + e.what());
    }
    const HarmonicSpace& h = state.harmonic.back();
    if (!h.sorted) throw PipelineError(PipelineStep::Eigensolve, "eigenvalues not sorted at degree " + std::to_string(n));
    if (h.min_eigenvalue < -config.psd_tolerance * std::max(h.lambda_max, 0.0))
      throw PipelineError(PipelineStep::Eigensolve,
                          "negative eigenvalue " + std::to_string(h.min_eigenvalue) + " at degree " + std::to_string(n));
    if (!(h.self_adjoint_residual < config.self_adjoint_tolerance))
      throw PipelineError(PipelineStep::Eigensolve, "Laplacian not self-adjoint at degree " + std::to_string(n));
  }

  // Step 4: harmonic forms are the kernel eigenvectors.
  for (const auto& h : state.harmonic) {
    DegreeReport r;
    r.degree = h.degree;
    r.space_dim = assembly.space_dim(h.degree);
    r.eigenvalues = h.eigenvalues;
    r.harmonic_dim = h.dimension;
    r.lambda_max = h.lambda_max;
    r.tolerance = h.tolerance;
    r.min_eigenvalue = h.min_eigenvalue;
    if (h.dimension < h.eigenvalues.size()) r.first_nonzero = h.eigenvalues[h.dimension];
    r.spectrum_complete = h.spectrum_complete;
    r.sorted = h.sorted;
    r.nonnegative = h.nonnegative;
    r.self_adjoint_residual = h.self_adjoint_residual;
    r.basis_orthonormality = h.basis_orthonormality;
    if (!h.spectrum_complete && h.dimension == h.eigenvalues.size())
      throw PipelineError(PipelineStep::ExtractHarmonic,
                          "kernel at degree " + std::to_string(h.degree) + " exceeds the computed eigenpairs");
    report.degrees.push_back(std::move(r));
  }

  // Step 5: M-orthonormal cohomology bases.
  for (std::size_t i = 0; i < state.harmonic.size(); ++i) {
    const HarmonicSpace& h = state.harmonic[i];
    if (h.basis_orthonormality > 1e-8)
      throw PipelineError(PipelineStep::CohomologyBasis,
                          "harmonic basis not orthonormal at degree " + std::to_string(h.degree));
    if (config.keep_harmonic_basis) report.degrees[i].harmonic_basis = h.basis();
    report.dimensions.push_back(h.dimension);
  }

  // Step 6: diagnostics around the dimension table.
  try {
    const CartanResidual cr = cartan_residual(field);
    report.cartan_l2 = cr.l2;
    report.cartan_max = cr.max;
    report.nilpotency = field_nilpotency_residual(field, config.spencer, config.truncation);
    report.anticommutation = assembly.anticommutation_residual();
    for (int n = 0; n + 1 < top; ++n) report.complex_residuals.push_back(assembly.complex_residual(n));
    report.transversality = transversality_summary(field);
    if (config.elliptic_estimate) report.elliptic = elliptic_constant_estimate(field, config.spencer, config.eigen);
  } catch (const Error& e) {
    throw PipelineError(PipelineStep::Analyze, e.what());
  }
  return state;
}

SpectrumReport run_pipeline(const PipelineConfig& config) { return run_pipeline_state(config).report; }

}  // namespace spencer
