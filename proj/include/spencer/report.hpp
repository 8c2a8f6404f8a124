#pragma once

#include "spencer/pipeline.hpp"
#include "spencer/run_config.hpp"

#include <json.hpp>

#include <optional>
#include <string>

namespace spencer {

using Json = nlohmann::ordered_json;

/// Optional report sections filled by individual subcommands.
struct ReportSections {
  std::optional<FitResult> fit;
  Json comparison = nullptr;
  Json decomposition = nullptr;
  Json convergence = nullptr;
};

/// The report document. Every key is present in every run; sections that do
/// not apply are null. Only "generated_at" varies between identical runs.
Json report_document(const std::string& command, const RunConfig& config, int algebra_dim,
                     const SpectrumReport* spectrum, const ReportSections& sections);

/// Current UTC time, ISO 8601.
std::string utc_timestamp();

void write_json(const std::string& path, const Json& doc);
/// degree,index,eigenvalue
void write_spectra_csv(const std::string& path, const SpectrumReport& report);
/// Column-major float64 dump plus "<stem>.json" header {shape, degree, metric, dtype, order}.
void write_harmonic_basis(const std::string& dir, const DegreeReport& degree, const std::string& metric_tag);

/// Static SVG plots: eigenvalue scatter per degree, and the metric weight over the mesh.
void write_spectrum_svg(const std::string& path, const SpectrumReport& report);
void write_weight_svg(const std::string& path, const PairField& field, WeightKind kind);

/// Plain-text cohomology table for terminal output.
std::string dimension_table(const SpectrumReport& report);

Json to_json(const MetricEquivalence& e);
Json to_json(const EllipticEstimate& e);

}  // namespace spencer
