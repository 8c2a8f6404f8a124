#include "spencer/cli.hpp"

#include "spencer/error.hpp"
#include "spencer/report.hpp"

#include <CLI11.hpp>

#include <chrono>
#include <cmath>
#include <filesystem>
#include <iomanip>
#include <iostream>
#include <numbers>
#include <random>

namespace spencer {

namespace {

struct CommonOptions {
  std::string config_path;
  std::string scenario;
  std::vector<std::string> overrides;
  std::string output_dir;
};

void add_common(CLI::App* cmd, CommonOptions& o) {
  cmd->add_option("config", o.config_path, "YAML run configuration")->check(CLI::ExistingFile);
  cmd->add_option("--scenario", o.scenario, "start from a built-in scenario");
  cmd->add_option("--set", o.overrides, "override a config key, e.g. --set mesh.resolution=[8,8]")->take_all();
  cmd->add_option("-o,--output", o.output_dir, "output directory (overrides output.dir)");
}

RunConfig load_config(const CommonOptions& o) {
  if (o.config_path.empty() && o.scenario.empty())
    throw Error(ErrorCode::ConfigError, "give a config file or --scenario");
  YAML::Node root = o.config_path.empty() ? YAML::Node(YAML::NodeType::Map) : load_config_file(o.config_path);
  if (!o.scenario.empty()) root["scenario"] = o.scenario;
  for (const auto& s : o.overrides) apply_override(root, s);
  if (!o.output_dir.empty()) apply_override(root, "output.dir=" + o.output_dir);
  return parse_run_config(root);
}

std::string path_in(const RunConfig& c, const std::string& name) {
  return (std::filesystem::path(c.output.dir) / name).string();
}

std::string fmt(double x) {
  std::ostringstream s;
  s << std::setprecision(6) << x;
  return s.str();
}

/// Builds the field; construction errors belong to metric selection (step 1).
BuiltField field_or_throw(const RunConfig& config) {
  try {
    return build_field(config);
  } catch (const Error& e) {
    throw PipelineError(PipelineStep::SelectMetric, e.what());
  }
}

// --------------------------------------------------------------------------

int cmd_validate(const RunConfig& config, std::ostream& out) {
  int failures = 0;
  auto pass = [&](const std::string& what) { out << "PASS  " << what << '\n'; };
  auto fail = [&](std::string_view code, const std::string& what) {
    out << "FAIL  " << code << ": " << what << '\n';
    ++failures;
  };

  std::shared_ptr<const LieAlgebra> alg;
  try {
    alg = build_algebra(config);
  } catch (const Error& e) {
    fail(to_string(e.code()), e.what());
    return kExitValidation;
  }
  pass("algebra " + alg->name() + " (dim " + std::to_string(alg->dim()) + ")");
  pass("Jacobi identity, residual " + fmt(alg->jacobi_residual()));
  Eigen::SelfAdjointEigenSolver<Eigen::MatrixXd> killing(-alg->killing());
  pass("Killing form negative definite, spectrum of -B in [" + fmt(killing.eigenvalues().minCoeff()) + ", " +
       fmt(killing.eigenvalues().maxCoeff()) + "]");
  pass("ad-invariance of B, residual " + fmt(alg->ad_invariance_residual()));

  BuiltField built;
  try {
    built = build_field(config);
  } catch (const Error& e) {
    fail(to_string(e.code()), e.what());
    return kExitValidation;
  }
  const PairField& field = *built.field;
  const auto& w = field.weights(WeightKind::Constraint);
  pass("lambda non-degenerate, min |lambda|^2 = " + fmt(w.minCoeff() - 1.0));

  const CartanResidual cr = cartan_residual(field);
  if (cr.max > 1e-10)
    out << "WARN  modified Cartan residual is nonzero: l2 " << fmt(cr.l2) << ", max " << fmt(cr.max) << '\n';
  else
    pass("modified Cartan equation, residual l2 " + fmt(cr.l2) + ", max " + fmt(cr.max));

  const TransversalitySummary t = transversality_summary(field);
  if (t.min_margin > 1e-12)
    pass("strong transversality, min margin " + fmt(t.min_margin) + ", min gap " + fmt(t.min_gap));
  else
    fail("TransversalityViolated", "min margin " + fmt(t.min_margin));

  const MetricEquivalence e = metric_equivalence(field);
  if (e.w_min > 0.0 && e.kappa_min > 0.0)
    pass("weights positive, w in [" + fmt(e.w_min) + ", " + fmt(e.w_max) + "], kappa in [" + fmt(e.kappa_min) + ", " +
         fmt(e.kappa_max) + "]");
  else
    fail(to_string(ErrorCode::NonPositiveWeight), "metric weight not positive");

  out << (failures == 0 ? "validation passed\n" : "validation failed\n");
  return failures == 0 ? kExitOk : kExitValidation;
}

void emit_run_outputs(const RunConfig& config, const PipelineState& state, const PairField& field,
                      const std::string& command, const ReportSections& sections) {
  write_json(path_in(config, config.output.report),
             report_document(command, config, field.algebra().dim(), &state.report, sections));
  write_spectra_csv(path_in(config, config.output.spectra), state.report);
  if (config.output.harmonic)
    for (const auto& d : state.report.degrees) write_harmonic_basis(config.output.dir, d, state.report.metric_tag);
  if (config.output.plots) {
    write_spectrum_svg(path_in(config, "spectrum.svg"), state.report);
    const WeightKind kind = config.metric.kind == MetricKind::B ? WeightKind::Curvature : WeightKind::Constraint;
    write_weight_svg(path_in(config, "weights.svg"), field, kind);
  }
}

void print_diagnostics(const SpectrumReport& r, std::ostream& out) {
  out << "diagnostics: Cartan residual l2 " << fmt(r.cartan_l2) << ", anticommutation " << fmt(r.anticommutation)
      << ", nilpotency [";
  for (std::size_t i = 0; i < r.nilpotency.size(); ++i) out << (i ? ", " : "") << fmt(r.nilpotency[i]);
  out << "]\n";
  out << "metric equivalence: c1 = " << fmt(r.equivalence.c1) << ", c2 = " << fmt(r.equivalence.c2) << '\n';
  if (r.elliptic)
    out << "elliptic constants: C_A = " << fmt(r.elliptic->c_a) << ", C_B = " << fmt(r.elliptic->c_b) << '\n';
}

int cmd_run(const RunConfig& config, std::ostream& out) {
  const auto start = std::chrono::steady_clock::now();
  const BuiltField built = field_or_throw(config);
  PipelineConfig pc = make_pipeline_config(config, built.field);
  pc.keep_harmonic_basis = config.output.harmonic;
  const PipelineState state = run_pipeline_state(pc);
  ReportSections sections;
  sections.fit = built.fit;
  emit_run_outputs(config, state, *built.field, "run", sections);
  out << dimension_table(state.report);
  print_diagnostics(state.report, out);
  if (built.fit)
    out << "fit: " << built.fit->iterations << " iterations, Cartan residual " << fmt(built.fit->final_residual) << '\n';
  const double secs = std::chrono::duration<double>(std::chrono::steady_clock::now() - start).count();
  out << "wrote " << path_in(config, config.output.report) << " (" << fmt(secs) << " s)\n";
  return kExitOk;
}

int cmd_compare(const RunConfig& config, int samples, std::ostream& out) {
  const BuiltField built = field_or_throw(config);
  const PairField& field = *built.field;
  const std::vector<MetricChoice> metrics{MetricChoice::a(), MetricChoice::b(), MetricChoice::mixed(0.25),
                                          MetricChoice::mixed(0.5), MetricChoice::mixed(0.75)};
  std::vector<PipelineState> states;
  for (const auto& m : metrics) {
    RunConfig c = config;
    c.metric = m;
    PipelineConfig pc = make_pipeline_config(c, built.field);
    pc.elliptic_estimate = config.elliptic && m.kind == MetricKind::A;
    states.push_back(run_pipeline_state(pc));
  }
  const SpectrumReport& a = states[0].report;
  const SpectrumReport& b = states[1].report;

  Json cmp;
  const MetricEquivalence eq = metric_equivalence(field);
  cmp["c1"] = eq.c1;
  cmp["c2"] = eq.c2;
  cmp["constant_weights"] = eq.w_min == eq.w_max && eq.kappa_min == eq.kappa_max;
  cmp["kappa_min"] = eq.kappa_min;
  cmp["kappa_max"] = eq.kappa_max;

  Json dims = Json::object();
  bool identical = true;
  for (std::size_t i = 0; i < metrics.size(); ++i) {
    dims[states[i].report.metric_tag] = states[i].report.dimensions;
    identical = identical && states[i].report.dimensions == a.dimensions;
  }
  cmp["dimensions"] = dims;
  cmp["dimensions_identical"] = identical;

  Json sandwich = Json::array();
  Json curves = Json::array();
  double mixed_residual = 0.0;
  std::mt19937_64 rng(config.seed);
  std::normal_distribution<double> normal;
  for (std::size_t n = 0; n < a.degrees.size(); ++n) {
    const int deg = static_cast<int>(n);
    const SandwichReport s = sandwich_check(field, config.truncation, config.sym_inner, deg, samples, config.seed + n);
    sandwich.push_back(Json{{"degree", deg},
                            {"samples", s.samples},
                            {"ratio_min", s.ratio_min},
                            {"ratio_max", s.ratio_max},
                            {"a_outside", s.holds_a_outside},
                            {"b_outside", s.holds_b_outside}});
    Json ratios = Json::array();
    const auto& ea = a.degrees[n].eigenvalues;
    const auto& eb = b.degrees[n].eigenvalues;
    for (Eigen::Index i = 0; i < std::min(ea.size(), eb.size()); ++i) {
      if (ea[i] > a.degrees[n].tolerance && eb[i] > b.degrees[n].tolerance) ratios.push_back(eb[i] / ea[i]);
      else ratios.push_back(nullptr);
    }
    curves.push_back(Json{{"degree", deg}, {"ratio_b_over_a", ratios}});

    const Eigen::VectorXd& ma = states[0].assembly->mass(deg);
    const Eigen::VectorXd& mb = states[1].assembly->mass(deg);
    for (std::size_t k = 2; k < metrics.size(); ++k) {
      const double alpha = metrics[k].alpha;
      const Eigen::VectorXd& mm = states[k].assembly->mass(deg);
      for (int trial = 0; trial < 10; ++trial) {
        Eigen::VectorXd u(ma.size());
        for (Eigen::Index i = 0; i < u.size(); ++i) u[i] = normal(rng);
        const Eigen::VectorXd u2 = u.cwiseAbs2();
        const double blend = alpha * u2.dot(ma) + (1.0 - alpha) * u2.dot(mb);
        mixed_residual = std::max(mixed_residual, std::abs(u2.dot(mm) - blend) / blend);
      }
    }
  }
  cmp["sandwich"] = sandwich;
  cmp["ratio_curves"] = curves;
  cmp["mixed_interpolation_residual"] = mixed_residual;

  ReportSections sections;
  sections.fit = built.fit;
  sections.comparison = cmp;
  write_json(path_in(config, config.output.report), report_document("compare-metrics", config, field.algebra().dim(), &a, sections));
  write_spectra_csv(path_in(config, config.output.spectra), a);

  out << "metric equivalence: c1 = " << fmt(eq.c1) << ", c2 = " << fmt(eq.c2) << '\n';
  out << "weights: w in [" << fmt(eq.w_min) << ", " << fmt(eq.w_max) << "], kappa in [" << fmt(eq.kappa_min) << ", "
      << fmt(eq.kappa_max) << "]\n";
  for (std::size_t i = 0; i < metrics.size(); ++i) {
    out << "  " << std::setw(12) << std::left << states[i].report.metric_tag << std::right << " dims (";
    for (std::size_t k = 0; k < states[i].report.dimensions.size(); ++k)
      out << (k ? "," : "") << states[i].report.dimensions[k];
    out << ")\n";
  }
  for (const auto& s : sandwich)
    out << "  sandwich n=" << s["degree"].get<int>() << ": |u|_B^2/|u|_A^2 in [" << fmt(s["ratio_min"].get<double>())
        << ", " << fmt(s["ratio_max"].get<double>()) << "], A-outside " << (s["a_outside"].get<bool>() ? "holds" : "fails")
        << ", B-outside " << (s["b_outside"].get<bool>() ? "holds" : "fails") << '\n';
  out << "mixed-metric interpolation residual " << fmt(mixed_residual) << '\n';
  if (!identical) {
    out << "harmonic dimensions differ between metrics\n";
    throw PipelineError(PipelineStep::Analyze, "harmonic dimensions differ between metrics");
  }
  return kExitOk;
}

int cmd_decompose(const RunConfig& config, const std::string& input, int degree, std::ostream& out) {
  const BuiltField built = field_or_throw(config);
  const PipelineState state = run_pipeline_state(make_pipeline_config(config, built.field));
  const SpencerAssembly& assembly = *state.assembly;
  if (degree < 0 || degree > assembly.top_degree())
    throw Error(ErrorCode::DegreeOutOfRange, "degree must lie in [0, " + std::to_string(assembly.top_degree()) + "]");
  const Eigen::VectorXd u = read_cochain(input);
  if (static_cast<std::size_t>(u.size()) != assembly.space_dim(degree))
    throw Error(ErrorCode::ShapeMismatch, "cochain has " + std::to_string(u.size()) + " entries, S^" +
                                              std::to_string(degree) + " has dimension " +
                                              std::to_string(assembly.space_dim(degree)));
  const HarmonicSpace& h = state.harmonic[static_cast<std::size_t>(degree)];
  HodgeDecomposition dec;
  Eigen::VectorXd g;
  try {
    dec = hodge_decompose(assembly, h, u);
    g = green_apply(assembly, h, u);
  } catch (const Error& e) {
    throw PipelineError(PipelineStep::Analyze, e.what());
  }
  const double green = green_residual(assembly, h, u, g);
  const std::string stem = "decomposition_" + std::to_string(degree) + "_";
  write_cochain_csv(path_in(config, stem + "harmonic.csv"), dec.harmonic);
  write_cochain_csv(path_in(config, stem + "exact.csv"), dec.exact);
  write_cochain_csv(path_in(config, stem + "coexact.csv"), dec.coexact);
  write_cochain_csv(path_in(config, stem + "green.csv"), g);

  const double norm = std::max(assembly.norm(degree, u), 1e-300);
  Json summary{{"degree", degree},
               {"input", input},
               {"harmonic_norm", assembly.norm(degree, dec.harmonic) / norm},
               {"exact_norm", assembly.norm(degree, dec.exact) / norm},
               {"coexact_norm", assembly.norm(degree, dec.coexact) / norm},
               {"reconstruction_residual", dec.reconstruction_residual},
               {"harmonic_exact", dec.harmonic_exact},
               {"harmonic_coexact", dec.harmonic_coexact},
               {"exact_coexact", dec.exact_coexact},
               {"orthogonality_bound", dec.orthogonality_bound},
               {"green_residual", green},
               {"within_tolerance", dec.reconstruction_residual < config.orthogonality_tolerance &&
                                        dec.max_orthogonality_defect() < config.orthogonality_tolerance}};
  ReportSections sections;
  sections.fit = built.fit;
  sections.decomposition = summary;
  write_json(path_in(config, config.output.report),
             report_document("decompose", config, built.field->algebra().dim(), &state.report, sections));

  out << "Hodge decomposition of a degree-" << degree << " cochain (relative M-norms)\n";
  out << "  harmonic " << fmt(summary["harmonic_norm"].get<double>()) << ", exact "
      << fmt(summary["exact_norm"].get<double>()) << ", coexact " << fmt(summary["coexact_norm"].get<double>()) << '\n';
  out << "  reconstruction residual  " << fmt(dec.reconstruction_residual) << '\n';
  out << "  <h, exact>               " << fmt(dec.harmonic_exact) << '\n';
  out << "  <h, coexact>             " << fmt(dec.harmonic_coexact) << '\n';
  out << "  <exact, coexact>         " << fmt(dec.exact_coexact) << "  (bound " << fmt(dec.orthogonality_bound) << ")\n";
  out << "  Green residual           " << fmt(green) << '\n';
  return kExitOk;
}

int cmd_convergence(const RunConfig& config, const std::vector<int>& resolutions, int degree,
                    std::optional<double> reference, std::ostream& out) {
  if (resolutions.size() < 3) throw Error(ErrorCode::ConfigError, "convergence needs at least 3 resolutions");
  const double side = config.sides.empty() ? 2.0 * std::numbers::pi : config.sides.front();
  const double ref = reference.value_or(std::pow(2.0 * std::numbers::pi / side, 2));
  Json rows = Json::array();
  std::vector<int> first_dims;
  bool constant = true;
  double min_order = std::numeric_limits<double>::infinity();
  double prev_error = 0.0;
  int prev_n = 0;
  out << "  N   first nonzero eigenvalue   error          order   dims\n";
  for (std::size_t i = 0; i < resolutions.size(); ++i) {
    RunConfig c = config;
    c.resolution.assign(static_cast<std::size_t>(c.mesh_dim), resolutions[i]);
    if (resolutions[i] < 3) throw Error(ErrorCode::ResolutionTooSmall, "mesh resolution must be >= 3");
    c.elliptic = false;
    const BuiltField built = field_or_throw(c);
    PipelineConfig pc = make_pipeline_config(c, built.field);
    const SpectrumReport r = run_pipeline(pc);
    if (degree < 0 || degree >= static_cast<int>(r.degrees.size()))
      throw Error(ErrorCode::DegreeOutOfRange, "convergence degree out of range");
    const auto& d = r.degrees[static_cast<std::size_t>(degree)];
    const double value = d.first_nonzero.value_or(std::nan(""));
    const double error = std::abs(value - ref);
    Json order = nullptr;
    if (i > 0 && prev_error > 0.0 && error > 0.0) {
      const double p = std::log(prev_error / error) / std::log(static_cast<double>(resolutions[i]) / prev_n);
      order = p;
      min_order = std::min(min_order, p);
    }
    if (i == 0) first_dims = r.dimensions;
    constant = constant && r.dimensions == first_dims;
    rows.push_back(Json{{"resolution", resolutions[i]},
                        {"first_nonzero", std::isfinite(value) ? Json(value) : Json(nullptr)},
                        {"error", std::isfinite(error) ? Json(error) : Json(nullptr)},
                        {"order", order},
                        {"dimensions", r.dimensions}});
    out << std::setw(4) << resolutions[i] << "   " << std::setw(22) << std::setprecision(12) << value << "   "
        << std::setw(12) << std::setprecision(4) << error << "   " << std::setw(6)
        << (order.is_null() ? std::string("-") : fmt(order.get<double>())) << "   (";
    for (std::size_t k = 0; k < r.dimensions.size(); ++k) out << (k ? "," : "") << r.dimensions[k];
    out << ")\n";
    prev_error = error;
    prev_n = resolutions[i];
  }
  Json conv{{"degree", degree},
            {"reference", ref},
            {"rows", rows},
            {"min_order", std::isfinite(min_order) ? Json(min_order) : Json(nullptr)},
            {"dimensions_constant", constant}};
  ReportSections sections;
  sections.convergence = conv;
  write_json(path_in(config, config.output.report),
             report_document("convergence", config, build_algebra(config)->dim(), nullptr, sections));
  out << "observed order (min) " << (std::isfinite(min_order) ? fmt(min_order) : std::string("-"))
      << ", dimensions " << (constant ? "constant" : "NOT constant") << " across resolutions\n";
  return kExitOk;
}

}  // namespace

PipelineConfig make_pipeline_config(const RunConfig& config, std::shared_ptr<const PairField> field) {
  PipelineConfig pc;
  pc.field = std::move(field);
  pc.truncation = config.truncation;
  pc.metric = config.metric;
  pc.spencer = config.spencer_options();
  pc.eigen = config.eigen;
  pc.elliptic_estimate = config.elliptic;
  return pc;
}

int run_cli(int argc, const char* const* argv, std::ostream& out, std::ostream& err) {
  CLI::App app{"Spencer cohomology of compatible pairs on discretised tori"};
  app.require_subcommand(1);

  CommonOptions validate_opts, run_opts, compare_opts, decompose_opts, convergence_opts;
  auto* validate = app.add_subcommand("validate", "check algebra, field and transversality invariants");
  add_common(validate, validate_opts);
  auto* run = app.add_subcommand("run", "compute the cohomology table and write report files");
  add_common(run, run_opts);
  auto* compare = app.add_subcommand("compare-metrics", "compare metric A, metric B and mixed metrics");
  add_common(compare, compare_opts);
  int samples = 1000;
  compare->add_option("--samples", samples, "random cochains per degree for the sandwich check")->check(CLI::PositiveNumber);
  auto* decompose = app.add_subcommand("decompose", "Hodge-decompose a cochain and apply the Green operator");
  add_common(decompose, decompose_opts);
  std::string input;
  int degree = 0;
  decompose->add_option("--input", input, "cochain file (.csv, or .bin with a .json header)")->required()->check(CLI::ExistingFile);
  decompose->add_option("--degree", degree, "total degree n")->required();
  auto* convergence = app.add_subcommand("convergence", "spectral convergence over a resolution list");
  add_common(convergence, convergence_opts);
  std::vector<int> resolutions;
  int conv_degree = 0;
  std::optional<double> reference;
  convergence->add_option("--resolutions", resolutions, "comma-separated resolutions, at least 3")
      ->required()
      ->delimiter(',');
  convergence->add_option("--degree", conv_degree, "total degree whose first nonzero eigenvalue is tracked");
  convergence->add_option("--reference", reference, "exact first nonzero eigenvalue (default: flat unit-weight value)");
  auto* list = app.add_subcommand("list-scenarios", "list built-in scenarios");
  std::string show;
  list->add_option("--show", show, "print the YAML of one scenario");

  try {
    app.parse(argc, argv);
  } catch (const CLI::ParseError& e) {
    const int code = app.exit(e, out, err);
    return code == 0 ? kExitOk : kExitUsage;
  }

  auto config_for = [&](const CommonOptions& o) { return load_config(o); };
  try {
    if (*list) {
      if (!show.empty()) {
        out << find_scenario(show).yaml;
        return kExitOk;
      }
      for (const auto& s : scenario_library()) out << std::setw(14) << std::left << s.name << "  " << s.description << '\n';
      return kExitOk;
    }
    RunConfig config;
    try {
      if (*validate) config = config_for(validate_opts);
      else if (*run) config = config_for(run_opts);
      else if (*compare) config = config_for(compare_opts);
      else if (*decompose) config = config_for(decompose_opts);
      else config = config_for(convergence_opts);
    } catch (const Error& e) {
      err << "config error: " << e.what() << '\n';
      return kExitUsage;
    }
    if (*validate) return cmd_validate(config, out);
    if (*run) return cmd_run(config, out);
    if (*compare) return cmd_compare(config, samples, out);
    if (*decompose) {
      try {
        return cmd_decompose(config, input, degree, out);
      } catch (const Error& e) {
        if (e.code() != ErrorCode::ShapeMismatch && e.code() != ErrorCode::DegreeOutOfRange &&
            e.code() != ErrorCode::IoError)
          throw;
        err << "invalid input: " << e.what() << '\n';
        return kExitValidation;
      }
    }
    try {
      return cmd_convergence(config, resolutions, conv_degree, reference, out);
    } catch (const Error& e) {
      if (e.code() != ErrorCode::ConfigError && e.code() != ErrorCode::ResolutionTooSmall) throw;
      err << "usage error: " << e.what() << '\n';
      return kExitUsage;
    }
  } catch (const PipelineError& e) {
    err << "pipeline failed at " << e.what() << '\n';
    return kExitPipeline;
  } catch (const Error& e) {
    err << "pipeline failed: " << e.what() << '\n';
    return kExitPipeline;
  } catch (const std::exception& e) {
    err << "pipeline failed: " << e.what() << '\n';
    return kExitPipeline;
  }
}

}  // namespace spencer
