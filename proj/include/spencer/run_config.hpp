#pragma once

#include "spencer/hodge_engine.hpp"
#include "spencer/pair_field.hpp"

#include <yaml-cpp/yaml.h>

#include <cstdint>
#include <memory>
#include <optional>
#include <string>
#include <vector>

namespace spencer {

/// Smooth random Fourier perturbation added to lambda.
struct PerturbationSpec {
  double amplitude = 0.0;
  std::uint64_t seed = 1;
  int modes = 4;
};

struct FitSpec {
  std::vector<double> target;  // mu; the admissible set is the line R mu
  double alpha = 1.0;
  double noise = 0.5;
  FitOptions options;
};

struct LambdaSpec {
  std::string type = "constant";  // constant | zero | vortex-sin | table | fit
  std::vector<double> coeffs;
  double amplitude = 0.5;  // vortex-sin: (1 + amplitude sin x_axis) coeffs
  int axis = 0;
  std::string file;
  PerturbationSpec perturbation;
  FitSpec fit;
};

struct OmegaSpec {
  std::string type = "zero";  // zero | constant | constant-curvature | table
  std::vector<std::vector<double>> components;  // one coefficient row per mesh axis
  double scale = 1.0;
  std::vector<std::string> files;
};

struct OutputSpec {
  std::string dir = "spencer-out";
  std::string report = "report.json";
  std::string spectra = "spectra.csv";
  bool harmonic = false;
  bool plots = false;
};

struct RunConfig {
  std::optional<std::string> scenario;
  std::string algebra = "so3";
  std::string algebra_file;
  int mesh_dim = 2;
  std::vector<int> resolution{16, 16};
  std::vector<double> sides;
  LambdaSpec lambda;
  OmegaSpec omega;
  int truncation = 0;
  MetricChoice metric;
  SymInner sym_inner = SymInner::Plain;
  LeibnizSign leibniz = LeibnizSign::Graded;
  double orthogonality_tolerance = 1e-8;
  EigenOptions eigen;
  bool elliptic = true;
  OutputSpec output;
  std::uint64_t seed = 42;

  SpencerOptions spencer_options() const;
  std::string algebra_label() const { return algebra_file.empty() ? algebra : algebra_file; }
};

struct Scenario {
  std::string name;
  std::string description;
  std::string yaml;
};

const std::vector<Scenario>& scenario_library();
const Scenario& find_scenario(const std::string& name);

/// Parses a YAML file; throws Error(ConfigError|IoError).
YAML::Node load_config_file(const std::string& path);
/// Applies "dotted.key=value"; the value is parsed as a YAML scalar or flow sequence.
void apply_override(YAML::Node& root, const std::string& assignment);
/// Resolves a "scenario" key by layering the document over the scenario defaults.
YAML::Node resolve_scenario(const YAML::Node& root);
/// Typed config with invariant checks (tolerances > 0, alpha in [0,1], resolution >= 3).
RunConfig parse_run_config(const YAML::Node& root);
YAML::Node to_yaml(const RunConfig& config);

struct BuiltField {
  std::shared_ptr<const PairField> field;
  std::optional<FitResult> fit;
};

std::shared_ptr<const LieAlgebra> build_algebra(const RunConfig& config);
std::shared_ptr<const TorusMesh> build_mesh(const RunConfig& config);
/// Samples lambda and omega on the mesh. Field-construction errors propagate as spencer::Error.
BuiltField build_field(const RunConfig& config);

/// Per-axis omega vertex tables (d x V).
std::vector<Eigen::MatrixXd> omega_vertex_tables(const RunConfig& config, const TorusMesh& mesh, const LieAlgebra& alg);

/// Cochain file I/O: ".bin" + ".json" header, anything else is CSV (one value per line or comma-separated).
Eigen::VectorXd read_cochain(const std::string& path);
void write_cochain_csv(const std::string& path, const Eigen::VectorXd& values);
Eigen::MatrixXd read_table_csv(const std::string& path);

}  // namespace spencer
