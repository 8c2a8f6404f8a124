#include "spencer/run_config.hpp"

#include "spencer/error.hpp"

#include <json.hpp>

#include <cmath>
#include <filesystem>
#include <fstream>
#include <numbers>
#include <random>
#include <set>
#include <sstream>

namespace spencer {

namespace {

[[noreturn]] void config_error(const std::string& what) { throw Error(ErrorCode::ConfigError, what); }

void check_keys(const YAML::Node& node, const std::string& where, const std::set<std::string>& allowed) {
  if (!node || node.IsNull()) return;
  if (!node.IsMap()) config_error(where + " must be a mapping");
  for (const auto& kv : node) {
    const auto key = kv.first.as<std::string>();
    if (!allowed.count(key)) config_error("unknown key '" + (where.empty() ? key : where + "." + key) + "'");
  }
}

template <typename T>
T get(const YAML::Node& node, const std::string& key, const T& fallback) {
  if (!node || !node[key] || node[key].IsNull()) return fallback;
  try {
    return node[key].as<T>();
  } catch (const YAML::Exception&) {
    config_error("bad value for '" + key + "'");
  }
}

YAML::Node merge(const YAML::Node& base, const YAML::Node& overlay) {
  if (!overlay || overlay.IsNull()) return YAML::Clone(base);
  if (!base || !base.IsMap() || !overlay.IsMap()) return YAML::Clone(overlay);
  YAML::Node out = YAML::Clone(base);
  for (const auto& kv : overlay) {
    const auto key = kv.first.as<std::string>();
    out[key] = out[key] ? merge(out[key], kv.second) : YAML::Clone(kv.second);
  }
  return out;
}

double periodic_angle(const Point& x, const TorusMesh& mesh, int axis) {
  return 2.0 * std::numbers::pi * x[axis] / mesh.side(axis);
}

VectorField perturbation_field(const PerturbationSpec& p, const TorusMesh& mesh, int d) {
  std::mt19937_64 rng(p.seed);
  std::uniform_real_distribution<double> unit(-1.0, 1.0);
  std::uniform_real_distribution<double> phase(0.0, 2.0 * std::numbers::pi);
  std::uniform_int_distribution<int> wave(-2, 2);
  struct Mode {
    int kx, ky;
    double phi;
    Eigen::VectorXd c;
  };
  std::vector<Mode> modes;
  for (int m = 0; m < p.modes; ++m) {
    Mode mode{0, 0, 0.0, Eigen::VectorXd(d)};
    do {
      mode.kx = wave(rng);
      mode.ky = mesh.dim() == 2 ? wave(rng) : 0;
    } while (mode.kx == 0 && mode.ky == 0);
    mode.phi = phase(rng);
    for (int i = 0; i < d; ++i) mode.c[i] = unit(rng);
    modes.push_back(std::move(mode));
  }
  const double scale = p.modes > 0 ? p.amplitude / p.modes : 0.0;
  const TorusMesh* m = &mesh;
  return [modes, scale, m, d](const Point& x) {
    Eigen::VectorXd out = Eigen::VectorXd::Zero(d);
    for (const auto& mode : modes) {
      double arg = mode.kx * periodic_angle(x, *m, 0) + mode.phi;
      if (m->dim() == 2) arg += mode.ky * periodic_angle(x, *m, 1);
      out += scale * std::cos(arg) * mode.c;
    }
    return out;
  };
}

Eigen::VectorXd to_vector(const std::vector<double>& v, int d, const std::string& what) {
  if (static_cast<int>(v.size()) != d)
    throw Error(ErrorCode::DimensionMismatch,
                what + " has " + std::to_string(v.size()) + " coefficients, algebra dimension is " + std::to_string(d));
  return Eigen::Map<const Eigen::VectorXd>(v.data(), d);
}

const char* kTorusFluid = R"(algebra: so3
mesh: {dim: 2, resolution: [16, 16]}
lambda: {type: constant, coeffs: [0, 0, 1]}
omega: {type: zero}
truncation: 0
metric: {type: A}
)";

const char* kTorusVortex = R"(algebra: so3
mesh: {dim: 2, resolution: [16, 16]}
lambda: {type: vortex-sin, coeffs: [1, 0, 0], amplitude: 0.5, axis: 0}
omega: {type: zero}
truncation: 0
metric: {type: A}
)";

const char* kSu2Flat = R"(algebra: su2
mesh: {dim: 2, resolution: [8, 8]}
lambda: {type: constant, coeffs: [0, 0, 1]}
omega: {type: zero}
truncation: 1
metric: {type: A}
)";

const char* kSu2Curved = R"(algebra: su2
mesh: {dim: 2, resolution: [8, 8]}
lambda: {type: constant, coeffs: [0, 0, 1]}
omega: {type: constant-curvature}
truncation: 1
metric: {type: B}
)";

const char* kSo3Curved = R"(algebra: so3
mesh: {dim: 2, resolution: [8, 8]}
lambda: {type: constant, coeffs: [0, 0, 1]}
omega: {type: constant-curvature}
truncation: 0
metric: {type: B}
)";

const char* kFitDemo = R"(algebra: so3
mesh: {dim: 2, resolution: [16, 16]}
lambda:
  type: fit
  fit: {target: [0, 0, 1], alpha: 1.0, noise: 0.5, max_iterations: 5000, tolerance: 1.0e-12}
omega: {type: zero}
truncation: 0
metric: {type: A}
)";

const char* kCircle = R"(algebra: so3
mesh: {dim: 1, resolution: [16]}
lambda: {type: constant, coeffs: [0, 0, 1]}
omega: {type: zero}
truncation: 0
metric: {type: B}
)";

}  // namespace

SpencerOptions RunConfig::spencer_options() const {
  SpencerOptions o;
  o.leibniz = leibniz;
  o.inner = sym_inner;
  o.degree_cap = std::max(kDefaultDegreeCap, truncation);
  return o;
}

const std::vector<Scenario>& scenario_library() {
  static const std::vector<Scenario> library{
      {"torus-fluid", "so(3) on the flat 2-torus, constant lambda = e3*, flat connection, J = 0", kTorusFluid},
      {"torus-vortex", "so(3) on T^2 with lambda = (1 + sin(x)/2) e1*, flat connection, J = 0", kTorusVortex},
      {"su2-flat", "su(2) on T^2 8x8, constant lambda = e3*, flat connection, J = 1", kSu2Flat},
      {"su2-curved", "su(2) on T^2 8x8, omega = e1 dx + e2 dy (constant curvature), J = 1, metric B", kSu2Curved},
      {"so3-curved", "so(3) on T^2 8x8, omega = e1 dx + e2 dy, kappa = 3, J = 0, metric B", kSo3Curved},
      {"fit-demo", "so(3) on T^2, lambda fitted to the compatibility functional from a noisy start", kFitDemo},
      {"circle", "so(3) on the circle, flat connection, metric B (unit weight), J = 0", kCircle},
  };
  return library;
}

const Scenario& find_scenario(const std::string& name) {
  for (const auto& s : scenario_library())
    if (s.name == name) return s;
  config_error("unknown scenario '" + name + "'");
}

YAML::Node load_config_file(const std::string& path) {
  if (!std::filesystem::exists(path)) throw Error(ErrorCode::IoError, "config file not found: " + path);
  try {
    YAML::Node node = YAML::LoadFile(path);
    if (node.IsNull()) return YAML::Node(YAML::NodeType::Map);
    if (!node.IsMap()) config_error("config root must be a mapping");
    return node;
  } catch (const YAML::Exception& e) {
    config_error(std::string("cannot parse config: ") + e.what());
  }
}

void apply_override(YAML::Node& root, const std::string& assignment) {
  const auto eq = assignment.find('=');
  if (eq == std::string::npos || eq == 0) config_error("override must look like key.path=value: " + assignment);
  const std::string path = assignment.substr(0, eq);
  const std::string value = assignment.substr(eq + 1);
  std::vector<std::string> keys;
  std::stringstream ss(path);
  for (std::string part; std::getline(ss, part, '.');) {
    if (part.empty()) config_error("empty key segment in override: " + assignment);
    keys.push_back(part);
  }
  YAML::Node parsed;
  try {
    parsed = YAML::Load(value);
  } catch (const YAML::Exception& e) {
    config_error("cannot parse override value '" + value + "'");
  }
  if (!root || !root.IsMap()) root = YAML::Node(YAML::NodeType::Map);
  YAML::Node cur = root;
  for (std::size_t i = 0; i + 1 < keys.size(); ++i) {
    YAML::Node next = cur[keys[i]];
    if (!next.IsMap()) next = YAML::Node(YAML::NodeType::Map);
    cur[keys[i]] = next;
    cur.reset(cur[keys[i]]);
  }
  cur[keys.back()] = parsed;
}

YAML::Node resolve_scenario(const YAML::Node& root) {
  if (!root || !root["scenario"] || root["scenario"].IsNull()) return YAML::Clone(root);
  const auto name = root["scenario"].as<std::string>();
  const YAML::Node base = YAML::Load(find_scenario(name).yaml);
  YAML::Node out = merge(base, root);
  return out;
}

RunConfig parse_run_config(const YAML::Node& input) {
  const YAML::Node root = resolve_scenario(input);
  check_keys(root, "", {"scenario", "algebra", "mesh", "lambda", "omega", "truncation", "metric", "sym_inner",
                        "leibniz", "tolerances", "eigen", "elliptic", "output", "seed"});
  RunConfig c;
  if (root["scenario"]) c.scenario = root["scenario"].as<std::string>();

  if (const auto a = root["algebra"]) {
    if (a.IsScalar()) {
      c.algebra = a.as<std::string>();
    } else {
      check_keys(a, "algebra", {"name", "file"});
      c.algebra = get<std::string>(a, "name", "");
      c.algebra_file = get<std::string>(a, "file", "");
      if (c.algebra.empty() && c.algebra_file.empty()) config_error("algebra needs a name or a file");
    }
  }

  const YAML::Node mesh = root["mesh"];
  check_keys(mesh, "mesh", {"dim", "resolution", "sides"});
  c.mesh_dim = get<int>(mesh, "dim", 2);
  if (c.mesh_dim != 1 && c.mesh_dim != 2)
    throw Error(ErrorCode::DimensionUnsupported, "mesh.dim must be 1 or 2");
  if (mesh && mesh["resolution"] && mesh["resolution"].IsScalar()) {
    c.resolution.assign(static_cast<std::size_t>(c.mesh_dim), mesh["resolution"].as<int>());
  } else {
    c.resolution = get<std::vector<int>>(mesh, "resolution", std::vector<int>(static_cast<std::size_t>(c.mesh_dim), 16));
  }
  c.sides = get<std::vector<double>>(mesh, "sides", {});
  if (static_cast<int>(c.resolution.size()) != c.mesh_dim) config_error("mesh.resolution needs one entry per axis");
  for (int r : c.resolution)
    if (r < 3) throw Error(ErrorCode::ResolutionTooSmall, "mesh resolution must be >= 3");
  if (!c.sides.empty() && static_cast<int>(c.sides.size()) != c.mesh_dim) config_error("mesh.sides needs one entry per axis");
  for (double s : c.sides)
    if (!(s > 0.0)) config_error("mesh.sides must be positive");

  const YAML::Node lam = root["lambda"];
  check_keys(lam, "lambda", {"type", "coeffs", "amplitude", "axis", "file", "perturbation", "fit"});
  c.lambda.type = get<std::string>(lam, "type", "constant");
  c.lambda.coeffs = get<std::vector<double>>(lam, "coeffs", {});
  c.lambda.amplitude = get<double>(lam, "amplitude", 0.5);
  c.lambda.axis = get<int>(lam, "axis", 0);
  c.lambda.file = get<std::string>(lam, "file", "");
  if (lam && lam["perturbation"]) {
    const YAML::Node p = lam["perturbation"];
    check_keys(p, "lambda.perturbation", {"amplitude", "seed", "modes"});
    c.lambda.perturbation.amplitude = get<double>(p, "amplitude", 0.0);
    c.lambda.perturbation.seed = get<std::uint64_t>(p, "seed", 1);
    c.lambda.perturbation.modes = get<int>(p, "modes", 4);
    if (c.lambda.perturbation.amplitude < 0.0 || c.lambda.perturbation.modes < 1)
      config_error("perturbation needs amplitude >= 0 and modes >= 1");
  }
  if (lam && lam["fit"]) {
    const YAML::Node f = lam["fit"];
    check_keys(f, "lambda.fit", {"target", "alpha", "noise", "max_iterations", "tolerance", "step", "objective_floor"});
    c.lambda.fit.target = get<std::vector<double>>(f, "target", {});
    c.lambda.fit.alpha = get<double>(f, "alpha", 1.0);
    c.lambda.fit.noise = get<double>(f, "noise", 0.5);
    c.lambda.fit.options.alpha = c.lambda.fit.alpha;
    c.lambda.fit.options.max_iterations = get<int>(f, "max_iterations", 5000);
    c.lambda.fit.options.tolerance = get<double>(f, "tolerance", 1e-8);
    c.lambda.fit.options.step = get<double>(f, "step", 1.0);
    c.lambda.fit.options.objective_floor = get<double>(f, "objective_floor", 1e-26);
    if (!(c.lambda.fit.options.tolerance > 0.0) || !(c.lambda.fit.options.step > 0.0) || c.lambda.fit.alpha < 0.0)
      config_error("fit needs tolerance > 0, step > 0, alpha >= 0");
  }
  static const std::set<std::string> lambda_types{"constant", "zero", "vortex-sin", "table", "fit"};
  if (!lambda_types.count(c.lambda.type)) config_error("unknown lambda type '" + c.lambda.type + "'");
  if (c.lambda.axis < 0 || c.lambda.axis >= c.mesh_dim) config_error("lambda.axis out of range");

  const YAML::Node om = root["omega"];
  check_keys(om, "omega", {"type", "components", "scale", "files"});
  c.omega.type = get<std::string>(om, "type", "zero");
  c.omega.components = get<std::vector<std::vector<double>>>(om, "components", {});
  c.omega.scale = get<double>(om, "scale", 1.0);
  c.omega.files = get<std::vector<std::string>>(om, "files", {});
  static const std::set<std::string> omega_types{"zero", "constant", "constant-curvature", "table"};
  if (!omega_types.count(c.omega.type)) config_error("unknown omega type '" + c.omega.type + "'");

  c.truncation = get<int>(root, "truncation", 0);
  if (c.truncation < 0) throw Error(ErrorCode::DegreeOutOfRange, "truncation must be >= 0");

  if (const auto m = root["metric"]) {
    std::string type;
    double alpha = 0.5;
    if (m.IsScalar()) {
      type = m.as<std::string>();
    } else {
      check_keys(m, "metric", {"type", "alpha"});
      type = get<std::string>(m, "type", "A");
      alpha = get<double>(m, "alpha", 0.5);
    }
    if (type == "A" || type == "a") c.metric = MetricChoice::a();
    else if (type == "B" || type == "b") c.metric = MetricChoice::b();
    else if (type == "mixed") c.metric = MetricChoice::mixed(alpha);
    else config_error("metric.type must be A, B or mixed");
    if (!(alpha >= 0.0 && alpha <= 1.0)) config_error("metric.alpha must lie in [0, 1]");
  }

  const auto inner = get<std::string>(root, "sym_inner", "plain");
  if (inner == "plain") c.sym_inner = SymInner::Plain;
  else if (inner == "weighted") c.sym_inner = SymInner::Weighted;
  else config_error("sym_inner must be plain or weighted");
  const auto leibniz = get<std::string>(root, "leibniz", "graded");
  if (leibniz == "graded") c.leibniz = LeibnizSign::Graded;
  else if (leibniz == "ungraded") c.leibniz = LeibnizSign::Ungraded;
  else config_error("leibniz must be graded or ungraded");

  const YAML::Node tol = root["tolerances"];
  check_keys(tol, "tolerances", {"kernel", "orthogonality"});
  c.eigen.kernel_tolerance = get<double>(tol, "kernel", 1e-8);
  c.orthogonality_tolerance = get<double>(tol, "orthogonality", 1e-8);
  if (!(c.eigen.kernel_tolerance > 0.0) || !(c.orthogonality_tolerance > 0.0))
    config_error("tolerances must be positive");

  const YAML::Node eig = root["eigen"];
  check_keys(eig, "eigen", {"dense_limit", "nev", "max_iterations", "residual_tolerance"});
  c.eigen.dense_limit = get<std::size_t>(eig, "dense_limit", 5000);
  c.eigen.nev = get<int>(eig, "nev", 24);
  c.eigen.max_iterations = get<int>(eig, "max_iterations", 3000);
  c.eigen.residual_tolerance = get<double>(eig, "residual_tolerance", 1e-11);
  if (c.eigen.nev < 1 || c.eigen.max_iterations < 1 || !(c.eigen.residual_tolerance > 0.0))
    config_error("eigen settings must be positive");

  c.elliptic = get<bool>(root, "elliptic", true);

  const YAML::Node out = root["output"];
  check_keys(out, "output", {"dir", "report", "spectra", "harmonic", "plots"});
  c.output.dir = get<std::string>(out, "dir", c.output.dir);
  c.output.report = get<std::string>(out, "report", c.output.report);
  c.output.spectra = get<std::string>(out, "spectra", c.output.spectra);
  c.output.harmonic = get<bool>(out, "harmonic", false);
  c.output.plots = get<bool>(out, "plots", false);

  c.seed = get<std::uint64_t>(root, "seed", 42);
  c.eigen.seed = c.seed;
  return c;
}

YAML::Node to_yaml(const RunConfig& c) {
  YAML::Node n;
  if (c.scenario) n["scenario"] = *c.scenario;
  if (c.algebra_file.empty()) n["algebra"] = c.algebra;
  else n["algebra"]["file"] = c.algebra_file;
  n["mesh"]["dim"] = c.mesh_dim;
  n["mesh"]["resolution"] = c.resolution;
  if (!c.sides.empty()) n["mesh"]["sides"] = c.sides;
  n["lambda"]["type"] = c.lambda.type;
  if (!c.lambda.coeffs.empty()) n["lambda"]["coeffs"] = c.lambda.coeffs;
  n["omega"]["type"] = c.omega.type;
  n["truncation"] = c.truncation;
  n["metric"]["type"] = c.metric.kind == MetricKind::A ? "A" : c.metric.kind == MetricKind::B ? "B" : "mixed";
  n["metric"]["alpha"] = c.metric.alpha;
  n["seed"] = c.seed;
  return n;
}

std::shared_ptr<const LieAlgebra> build_algebra(const RunConfig& config) {
  if (!config.algebra_file.empty()) return std::make_shared<LieAlgebra>(load_structure_constants(config.algebra_file));
  return std::make_shared<LieAlgebra>(builtin_algebra(config.algebra));
}

std::shared_ptr<const TorusMesh> build_mesh(const RunConfig& config) {
  return std::make_shared<TorusMesh>(build_torus_mesh(config.mesh_dim, config.resolution, config.sides));
}

std::vector<Eigen::MatrixXd> omega_vertex_tables(const RunConfig& config, const TorusMesh& mesh, const LieAlgebra& alg) {
  const int d = alg.dim();
  const auto nv = static_cast<Eigen::Index>(mesh.cell_count(0));
  std::vector<Eigen::MatrixXd> out;
  const OmegaSpec& o = config.omega;
  if (o.type == "table") {
    if (static_cast<int>(o.files.size()) != mesh.dim()) config_error("omega.files needs one table per axis");
    for (const auto& f : o.files) {
      Eigen::MatrixXd t = read_table_csv(f);
      if (t.rows() != nv || t.cols() != d) throw Error(ErrorCode::ShapeMismatch, "omega table " + f + " must be V x d");
      out.push_back(t.transpose());
    }
    return out;
  }
  for (int a = 0; a < mesh.dim(); ++a) {
    Eigen::VectorXd coeffs = Eigen::VectorXd::Zero(d);
    if (o.type == "constant") {
      if (static_cast<int>(o.components.size()) != mesh.dim()) config_error("omega.components needs one row per axis");
      coeffs = to_vector(o.components[static_cast<std::size_t>(a)], d, "omega component");
    } else if (o.type == "constant-curvature") {
      if (d < mesh.dim()) throw Error(ErrorCode::DimensionMismatch, "constant-curvature omega needs dim g >= dim M");
      coeffs[a] = 1.0;
    }
    out.push_back((o.scale * coeffs).replicate(1, nv));
  }
  return out;
}

BuiltField build_field(const RunConfig& config) {
  auto alg = build_algebra(config);
  auto mesh = build_mesh(config);
  const int d = alg->dim();
  const LambdaSpec& l = config.lambda;
  BuiltField built;

  const std::vector<Eigen::MatrixXd> omega_tables = omega_vertex_tables(config, *mesh, *alg);
  // omega is constant or tabulated; sample it through the vertex tables
  const bool omega_constant = config.omega.type != "table";
  std::vector<VectorField> omega_fields;
  for (const auto& t : omega_tables) {
    Eigen::VectorXd c = t.col(0);
    omega_fields.push_back([c](const Point&) { return c; });
  }

  std::optional<PairField> field;
  if (l.type == "table" || l.type == "fit" || !omega_constant) {
    Eigen::MatrixXd lambda(d, static_cast<Eigen::Index>(mesh->cell_count(0)));
    if (l.type == "table") {
      const Eigen::MatrixXd t = read_table_csv(l.file);
      if (t.rows() != lambda.cols() || t.cols() != d)
        throw Error(ErrorCode::ShapeMismatch, "lambda table must be V x d");
      lambda = t.transpose();
    } else if (l.type == "fit") {
      const Eigen::VectorXd mu = to_vector(l.fit.target, d, "fit target");
      const Eigen::MatrixXd target = mu.replicate(1, lambda.cols());
      std::mt19937_64 rng(config.seed);
      std::normal_distribution<double> normal;
      Eigen::MatrixXd initial = target;
      for (Eigen::Index i = 0; i < initial.size(); ++i) initial.data()[i] += l.fit.noise * normal(rng);
      FitOptions opts = l.fit.options;
      opts.alpha = l.fit.alpha;
      built.fit = fit_lambda(*mesh, *alg, omega_tables, target, initial, opts);
      lambda = built.fit->lambda;
    } else {
      for (Eigen::Index v = 0; v < lambda.cols(); ++v) {
        const Point x = mesh->barycenter(0, static_cast<std::size_t>(v));
        if (l.type == "zero") lambda.col(v).setZero();
        else if (l.type == "constant") lambda.col(v) = to_vector(l.coeffs, d, "lambda.coeffs");
        else lambda.col(v) = (1.0 + l.amplitude * std::sin(periodic_angle(x, *mesh, l.axis))) * to_vector(l.coeffs, d, "lambda.coeffs");
      }
    }
    field = PairField::from_vertex_tables(mesh, alg, lambda, omega_tables);
  } else {
    VectorField lambda;
    if (l.type == "zero") {
      lambda = [d](const Point&) { return Eigen::VectorXd::Zero(d).eval(); };
    } else {
      const Eigen::VectorXd c = to_vector(l.coeffs, d, "lambda.coeffs");
      if (l.type == "constant") {
        lambda = [c](const Point&) { return c; };
      } else {
        const double amp = l.amplitude;
        const int axis = l.axis;
        const TorusMesh* m = mesh.get();
        lambda = [c, amp, axis, m](const Point& x) {
          return ((1.0 + amp * std::sin(periodic_angle(x, *m, axis))) * c).eval();
        };
      }
    }
    field = PairField::sample(mesh, alg, lambda, omega_fields);
  }
  if (l.perturbation.amplitude > 0.0)
    field = field->with_lambda_perturbation(perturbation_field(l.perturbation, *mesh, d));
  built.field = std::make_shared<const PairField>(std::move(*field));
  return built;
}

Eigen::MatrixXd read_table_csv(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw Error(ErrorCode::IoError, "cannot open " + path);
  std::vector<std::vector<double>> rows;
  for (std::string line; std::getline(in, line);) {
    const auto hash = line.find('#');
    if (hash != std::string::npos) line.resize(hash);
    for (char& ch : line)
      if (ch == ',' || ch == ';' || ch == '\t') ch = ' ';
    std::istringstream ss(line);
    std::vector<double> row;
    std::string tok;
    while (ss >> tok) {
      try {
        std::size_t used = 0;
        row.push_back(std::stod(tok, &used));
        if (used != tok.size()) throw std::invalid_argument(tok);
      } catch (const std::exception&) {
        throw Error(ErrorCode::IoError, "non-numeric entry '" + tok + "' in " + path);
      }
    }
    if (row.empty()) continue;
    if (!rows.empty() && row.size() != rows.front().size())
      throw Error(ErrorCode::ShapeMismatch, "ragged table in " + path);
    rows.push_back(std::move(row));
  }
  if (rows.empty()) return Eigen::MatrixXd(0, 0);
  Eigen::MatrixXd out(static_cast<Eigen::Index>(rows.size()), static_cast<Eigen::Index>(rows.front().size()));
  for (std::size_t i = 0; i < rows.size(); ++i)
    for (std::size_t j = 0; j < rows[i].size(); ++j) out(static_cast<Eigen::Index>(i), static_cast<Eigen::Index>(j)) = rows[i][j];
  return out;
}

Eigen::VectorXd read_cochain(const std::string& path) {
  const std::filesystem::path p(path);
  if (p.extension() == ".bin") {
    std::filesystem::path header = p;
    header.replace_extension(".json");
    std::ifstream hin(header);
    if (!hin) throw Error(ErrorCode::IoError, "missing header " + header.string());
    nlohmann::json h;
    try {
      hin >> h;
    } catch (const std::exception& e) {
      throw Error(ErrorCode::IoError, "bad header " + header.string());
    }
    if (h.value("dtype", "float64") != "float64") throw Error(ErrorCode::IoError, "only float64 arrays are supported");
    std::size_t count = 1;
    for (const auto& s : h.at("shape")) count *= s.get<std::size_t>();
    std::ifstream in(p, std::ios::binary);
    if (!in) throw Error(ErrorCode::IoError, "cannot open " + path);
    Eigen::VectorXd v(static_cast<Eigen::Index>(count));
    in.read(reinterpret_cast<char*>(v.data()), static_cast<std::streamsize>(count * sizeof(double)));
    if (static_cast<std::size_t>(in.gcount()) != count * sizeof(double))
      throw Error(ErrorCode::ShapeMismatch, "binary array shorter than its header shape");
    return v;
  }
  const Eigen::MatrixXd t = read_table_csv(path);
  Eigen::VectorXd v(t.size());
  Eigen::Index k = 0;
  for (Eigen::Index i = 0; i < t.rows(); ++i)
    for (Eigen::Index j = 0; j < t.cols(); ++j) v[k++] = t(i, j);
  return v;
}

void write_cochain_csv(const std::string& path, const Eigen::VectorXd& values) {
  std::ofstream out(path);
  if (!out) throw Error(ErrorCode::IoError, "cannot write " + path);
  out.precision(17);
  for (Eigen::Index i = 0; i < values.size(); ++i) out << values[i] << '\n';
}

}  // namespace spencer
