#include "spencer/report.hpp"

#include "spencer/error.hpp"

#include <algorithm>
#include <chrono>
#include <cmath>
#include <ctime>
#include <filesystem>
#include <fstream>
#include <iomanip>
#include <sstream>

namespace spencer {

namespace {

Json number(double x) { return std::isfinite(x) ? Json(x) : Json(nullptr); }

Json array(const std::vector<double>& v) {
  Json out = Json::array();
  for (double x : v) out.push_back(number(x));
  return out;
}

const char* inner_name(SymInner s) { return s == SymInner::Plain ? "plain" : "weighted"; }
const char* leibniz_name(LeibnizSign s) { return s == LeibnizSign::Graded ? "graded" : "ungraded"; }

std::ofstream open_out(const std::string& path, std::ios::openmode mode = std::ios::out) {
  const auto parent = std::filesystem::path(path).parent_path();
  if (!parent.empty()) std::filesystem::create_directories(parent);
  std::ofstream out(path, mode);
  if (!out) throw Error(ErrorCode::IoError, "cannot write " + path);
  return out;
}

std::string fmt(double x, int precision = 6) {
  std::ostringstream s;
  s << std::setprecision(precision) << x;
  return s.str();
}

}  // namespace

std::string utc_timestamp() {
  const std::time_t now = std::chrono::system_clock::to_time_t(std::chrono::system_clock::now());
  std::tm tm{};
  gmtime_r(&now, &tm);
  std::ostringstream s;
  s << std::put_time(&tm, "%Y-%m-%dT%H:%M:%SZ");
  return s.str();
}

Json to_json(const MetricEquivalence& e) {
  return Json{{"c1", number(e.c1)},       {"c2", number(e.c2)},
              {"w_min", number(e.w_min)}, {"w_max", number(e.w_max)},
              {"kappa_min", number(e.kappa_min)}, {"kappa_max", number(e.kappa_max)}};
}

Json to_json(const EllipticEstimate& e) {
  return Json{{"c_a", number(e.c_a)},
              {"c_b", number(e.c_b)},
              {"ratio", number(e.ratio())},
              {"inf_w", number(e.inf_w)},
              {"sup_w", number(e.sup_w)},
              {"inf_kappa", number(e.inf_kappa)},
              {"sup_kappa", number(e.sup_kappa)},
              {"inf_gap", number(e.inf_gap)},
              {"lambda1_dd", number(e.lambda1_dd)},
              {"lambda1_delta", number(e.lambda1_delta)}};
}

Json report_document(const std::string& command, const RunConfig& config, int algebra_dim,
                     const SpectrumReport* spectrum, const ReportSections& sections) {
  Json doc;
  doc["schema"] = "spencer-report/1";
  doc["command"] = command;
  doc["generated_at"] = utc_timestamp();
  doc["scenario"] = config.scenario ? Json(*config.scenario) : Json(nullptr);

  Json cfg;
  cfg["algebra"] = config.algebra_label();
  cfg["algebra_dim"] = algebra_dim;
  cfg["mesh"] = Json{{"dim", config.mesh_dim}, {"resolution", config.resolution},
                     {"sides", config.sides.empty() ? Json(nullptr) : Json(config.sides)}};
  cfg["lambda_type"] = config.lambda.type;
  cfg["lambda_perturbation"] = config.lambda.perturbation.amplitude > 0.0
                                   ? Json{{"amplitude", config.lambda.perturbation.amplitude},
                                          {"seed", config.lambda.perturbation.seed},
                                          {"modes", config.lambda.perturbation.modes}}
                                   : Json(nullptr);
  cfg["omega_type"] = config.omega.type;
  cfg["truncation"] = config.truncation;
  cfg["metric"] = spectrum ? spectrum->metric_tag : config.metric.tag();
  cfg["sym_inner"] = inner_name(config.sym_inner);
  cfg["leibniz"] = leibniz_name(config.leibniz);
  cfg["kernel_tolerance"] = config.eigen.kernel_tolerance;
  cfg["orthogonality_tolerance"] = config.orthogonality_tolerance;
  cfg["seed"] = config.seed;
  doc["config"] = cfg;

  Json cohomology = Json{{"dimensions", nullptr}, {"truncated_at", config.truncation}, {"label", nullptr}};
  Json degrees = Json::array();
  Json diagnostics = Json{{"cartan_residual_l2", nullptr},         {"cartan_residual_max", nullptr},
                          {"nilpotency_residuals", nullptr},       {"anticommutation_residual", nullptr},
                          {"complex_residuals", nullptr},          {"transversality_min_margin", nullptr},
                          {"transversality_min_gap", nullptr}};
  Json equivalence = nullptr;
  Json elliptic = nullptr;
  if (spectrum) {
    cohomology["dimensions"] = spectrum->dimensions;
    cohomology["label"] = "truncated at J=" + std::to_string(spectrum->truncation);
    for (const auto& d : spectrum->degrees) {
      degrees.push_back(Json{{"degree", d.degree},
                             {"space_dim", d.space_dim},
                             {"harmonic_dim", d.harmonic_dim},
                             {"eigenvalue_count", d.eigenvalues.size()},
                             {"spectrum_complete", d.spectrum_complete},
                             {"lambda_max", number(d.lambda_max)},
                             {"tolerance", number(d.tolerance)},
                             {"min_eigenvalue", number(d.min_eigenvalue)},
                             {"first_nonzero", d.first_nonzero ? number(*d.first_nonzero) : Json(nullptr)},
                             {"sorted", d.sorted},
                             {"nonnegative", d.nonnegative},
                             {"self_adjoint_residual", number(d.self_adjoint_residual)},
                             {"basis_orthonormality", number(d.basis_orthonormality)}});
    }
    diagnostics["cartan_residual_l2"] = number(spectrum->cartan_l2);
    diagnostics["cartan_residual_max"] = number(spectrum->cartan_max);
    diagnostics["nilpotency_residuals"] = array(spectrum->nilpotency);
    diagnostics["anticommutation_residual"] = number(spectrum->anticommutation);
    diagnostics["complex_residuals"] = array(spectrum->complex_residuals);
    diagnostics["transversality_min_margin"] = number(spectrum->transversality.min_margin);
    diagnostics["transversality_min_gap"] = number(spectrum->transversality.min_gap);
    equivalence = to_json(spectrum->equivalence);
    if (spectrum->elliptic) elliptic = to_json(*spectrum->elliptic);
  }
  doc["cohomology"] = cohomology;
  doc["degrees"] = degrees;
  doc["diagnostics"] = diagnostics;
  doc["metric_equivalence"] = equivalence;
  doc["elliptic"] = elliptic;

  Json fit = nullptr;
  if (sections.fit) {
    const FitResult& f = *sections.fit;
    fit = Json{{"iterations", f.iterations},
               {"initial_objective", f.objective_trace.empty() ? Json(nullptr) : number(f.objective_trace.front())},
               {"final_objective", number(f.final_objective)},
               {"final_cartan_residual", number(f.final_residual)},
               {"accepted_steps", f.objective_trace.empty() ? 0 : f.objective_trace.size() - 1}};
  }
  doc["fit"] = fit;
  doc["comparison"] = sections.comparison;
  doc["decomposition"] = sections.decomposition;
  doc["convergence"] = sections.convergence;
  return doc;
}

void write_json(const std::string& path, const Json& doc) {
  auto out = open_out(path);
  out << doc.dump(2) << '\n';
}

void write_spectra_csv(const std::string& path, const SpectrumReport& report) {
  auto out = open_out(path);
  out << "degree,index,eigenvalue\n";
  out << std::setprecision(17);
  for (const auto& d : report.degrees)
    for (Eigen::Index i = 0; i < d.eigenvalues.size(); ++i) out << d.degree << ',' << i << ',' << d.eigenvalues[i] << '\n';
}

void write_harmonic_basis(const std::string& dir, const DegreeReport& degree, const std::string& metric_tag) {
  const std::string stem = (std::filesystem::path(dir) / ("harmonic_" + std::to_string(degree.degree))).string();
  const Eigen::MatrixXd& b = degree.harmonic_basis;
  {
    auto out = open_out(stem + ".bin", std::ios::out | std::ios::binary);
    out.write(reinterpret_cast<const char*>(b.data()), static_cast<std::streamsize>(b.size() * sizeof(double)));
  }
  const Json header{{"shape", {b.rows(), b.cols()}},
                    {"degree", degree.degree},
                    {"metric", metric_tag},
                    {"dtype", "float64"},
                    {"order", "column-major"},
                    {"normalisation", "mass-orthonormal columns"}};
  write_json(stem + ".json", header);
}

void write_spectrum_svg(const std::string& path, const SpectrumReport& report) {
  constexpr double width = 640, height = 400, margin = 50;
  std::size_t max_count = 1;
  double max_value = 0.0;
  for (const auto& d : report.degrees) {
    max_count = std::max<std::size_t>(max_count, static_cast<std::size_t>(d.eigenvalues.size()));
    if (d.eigenvalues.size() > 0) max_value = std::max(max_value, d.eigenvalues.maxCoeff());
  }
  if (max_value <= 0.0) max_value = 1.0;
  static const char* colours[] = {"#1f77b4", "#d62728", "#2ca02c", "#9467bd", "#ff7f0e", "#8c564b", "#17becf"};
  auto out = open_out(path);
  out << "<svg xmlns=\"http://www.w3.org/2000/svg\" width=\"" << width << "\" height=\"" << height << "\">\n";
  out << "<rect width=\"100%\" height=\"100%\" fill=\"white\"/>\n";
  out << "<line x1=\"" << margin << "\" y1=\"" << height - margin << "\" x2=\"" << width - margin << "\" y2=\""
      << height - margin << "\" stroke=\"black\"/>\n";
  out << "<line x1=\"" << margin << "\" y1=\"" << margin << "\" x2=\"" << margin << "\" y2=\"" << height - margin
      << "\" stroke=\"black\"/>\n";
  out << "<text x=\"" << width / 2 << "\" y=\"" << height - 12 << "\" text-anchor=\"middle\" font-size=\"12\">index</text>\n";
  out << "<text x=\"14\" y=\"" << height / 2 << "\" font-size=\"12\" transform=\"rotate(-90 14 " << height / 2
      << ")\">eigenvalue (max " << fmt(max_value) << ")</text>\n";
  for (std::size_t k = 0; k < report.degrees.size(); ++k) {
    const auto& d = report.degrees[k];
    const char* colour = colours[k % 7];
    for (Eigen::Index i = 0; i < d.eigenvalues.size(); ++i) {
      const double x = margin + (width - 2 * margin) * static_cast<double>(i) / static_cast<double>(max_count);
      const double y = height - margin - (height - 2 * margin) * std::max(0.0, d.eigenvalues[i]) / max_value;
      out << "<circle cx=\"" << fmt(x) << "\" cy=\"" << fmt(y) << "\" r=\"1.5\" fill=\"" << colour << "\"/>\n";
    }
    out << "<text x=\"" << width - margin - 60 << "\" y=\"" << margin + 14 * static_cast<double>(k) << "\" font-size=\"12\" fill=\""
        << colour << "\">n=" << d.degree << " (dim H=" << d.harmonic_dim << ")</text>\n";
  }
  out << "</svg>\n";
}

void write_weight_svg(const std::string& path, const PairField& field, WeightKind kind) {
  const TorusMesh& mesh = field.mesh();
  const std::size_t nv = mesh.cell_count(0);
  std::vector<double> w(nv);
  for (std::size_t v = 0; v < nv; ++v) w[v] = field.weight_at_cell(kind, 0, v);
  const double lo = *std::min_element(w.begin(), w.end());
  const double hi = *std::max_element(w.begin(), w.end());
  const double span = hi > lo ? hi - lo : 1.0;
  constexpr double size = 400, margin = 30;
  auto out = open_out(path);
  out << "<svg xmlns=\"http://www.w3.org/2000/svg\" width=\"" << size + 2 * margin << "\" height=\"" << size + 2 * margin + 20
      << "\">\n<rect width=\"100%\" height=\"100%\" fill=\"white\"/>\n";
  const int nx = mesh.resolution(0);
  const int ny = mesh.dim() == 2 ? mesh.resolution(1) : 1;
  const double cw = size / nx, ch = size / ny;
  for (std::size_t v = 0; v < nv; ++v) {
    const int i = static_cast<int>(v % static_cast<std::size_t>(nx));
    const int j = static_cast<int>(v / static_cast<std::size_t>(nx));
    const double t = (w[v] - lo) / span;
    const int r = static_cast<int>(255 * t), b = static_cast<int>(255 * (1 - t));
    out << "<rect x=\"" << fmt(margin + i * cw) << "\" y=\"" << fmt(margin + (ny - 1 - j) * ch) << "\" width=\"" << fmt(cw)
        << "\" height=\"" << fmt(ch) << "\" fill=\"rgb(" << r << ",64," << b << ")\"/>\n";
  }
  out << "<text x=\"" << margin << "\" y=\"" << size + 2 * margin + 10 << "\" font-size=\"12\">weight range [" << fmt(lo)
      << ", " << fmt(hi) << "]</text>\n</svg>\n";
}

std::string dimension_table(const SpectrumReport& report) {
  std::ostringstream s;
  s << "Spencer cohomology (metric " << report.metric_tag << ", truncated at J=" << report.truncation << ")\n";
  s << "  n   dim S^n   dim H^n   first nonzero eigenvalue\n";
  for (const auto& d : report.degrees) {
    s << "  " << std::setw(1) << d.degree << std::setw(10) << d.space_dim << std::setw(10) << d.harmonic_dim << "   "
      << (d.first_nonzero ? fmt(*d.first_nonzero, 10) : std::string("-")) << '\n';
  }
  return s.str();
}

}  // namespace spencer
