#pragma once

#include "spencer/hodge_engine.hpp"

#include <memory>
#include <optional>
#include <stdexcept>
#include <string>
#include <vector>

namespace spencer {

/// Steps of the harmonic-extraction pipeline, numbered in execution order.
enum class PipelineStep {
  SelectMetric = 1,
  Assemble = 2,
  Eigensolve = 3,
  ExtractHarmonic = 4,
  CohomologyBasis = 5,
  Analyze = 6,
};

const char* step_name(PipelineStep step);

class PipelineError : public std::runtime_error {
 public:
  PipelineError(PipelineStep step, const std::string& what)
      : std::runtime_error("step " + std::to_string(static_cast<int>(step)) + " (" + step_name(step) + "): " + what),
        step_(step) {}
  PipelineStep step() const { return step_; }
  int step_number() const { return static_cast<int>(step_); }

 private:
  PipelineStep step_;
};

struct PipelineConfig {
  std::shared_ptr<const PairField> field;
  int truncation = 0;
  MetricChoice metric;
  SpencerOptions spencer;
  EigenOptions eigen;
  bool keep_harmonic_basis = false;
  bool elliptic_estimate = true;
  /// Spectral checks: self-adjointness bound and the relative PSD slack.
  double self_adjoint_tolerance = 1e-10;
  double psd_tolerance = 1e-10;
};

struct DegreeReport {
  int degree = 0;
  std::size_t space_dim = 0;
  Eigen::VectorXd eigenvalues;
  int harmonic_dim = 0;
  double lambda_max = 0.0;
  double tolerance = 0.0;
  double min_eigenvalue = 0.0;
  std::optional<double> first_nonzero;
  bool spectrum_complete = false;
  bool sorted = true;
  bool nonnegative = true;
  double self_adjoint_residual = 0.0;
  double basis_orthonormality = 0.0;
  Eigen::MatrixXd harmonic_basis;  // empty unless requested
};

struct SpectrumReport {
  std::string metric_tag;
  int truncation = 0;
  std::vector<DegreeReport> degrees;
  std::vector<int> dimensions;
  MetricEquivalence equivalence;
  std::optional<EllipticEstimate> elliptic;
  double cartan_l2 = 0.0;
  double cartan_max = 0.0;
  /// max over vertices of ||Delta_{j+1} Delta_j||_2, maps built to degree max(J, 3)
  std::vector<double> nilpotency;
  double anticommutation = 0.0;
  std::vector<double> complex_residuals;
  TransversalitySummary transversality;
};

/// Largest pointwise ||Delta_{j+1} Delta_j|| over mesh vertices.
std::vector<double> field_nilpotency_residual(const PairField& field, const SpencerOptions& options, int truncation);

/// Runs the six pipeline steps; throws PipelineError naming the failing step.
SpectrumReport run_pipeline(const PipelineConfig& config);

/// Same, also returning the assembly and the harmonic spaces for follow-up work.
struct PipelineState {
  std::shared_ptr<SpencerAssembly> assembly;
  std::vector<HarmonicSpace> harmonic;
  SpectrumReport report;
};
PipelineState run_pipeline_state(const PipelineConfig& config);

}  // namespace spencer
