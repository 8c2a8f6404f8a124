#include "spencer/cli.hpp"
#include "spencer/error.hpp"
#include "spencer/pipeline.hpp"
#include "spencer/run_config.hpp"
#include "support.hpp"

#include <doctest.h>

#include <cmath>
#include <string>

using namespace spencer;
using testing::e;

namespace {

RunConfig config_from(const std::string& yaml, const std::vector<std::string>& overrides = {}) {
  YAML::Node root = YAML::Load(yaml);
  for (const auto& o : overrides) apply_override(root, o);
  return parse_run_config(resolve_scenario(root));
}

SpectrumReport run(const RunConfig& cfg) {
  const BuiltField built = build_field(cfg);
  return run_pipeline(make_pipeline_config(cfg, built.field));
}

PipelineStep failing_step(const PipelineConfig& cfg) {
  try {
    run_pipeline(cfg);
  } catch (const PipelineError& err) {
    return err.step();
  }
  FAIL("expected a pipeline error");
  return PipelineStep::Analyze;
}

}  // namespace

TEST_CASE("flat torus fluid: cohomology (1, 2, 1) under both metrics") {
  for (const char* metric : {"A", "B"}) {
    const RunConfig cfg = config_from("scenario: torus-fluid\n", {std::string("metric=") + metric});
    const SpectrumReport r = run(cfg);
    CHECK(r.dimensions == std::vector<int>{1, 2, 1});
    CHECK(r.metric_tag == metric);
    for (const auto& d : r.degrees) {
      CHECK(d.spectrum_complete);
      CHECK(d.sorted);
      CHECK(d.nonnegative);
      CHECK(d.self_adjoint_residual < 1e-10);
      CHECK(d.basis_orthonormality < 1e-8);
      REQUIRE(d.first_nonzero.has_value());
      CHECK(*d.first_nonzero > d.tolerance);
    }
    CHECK(r.cartan_max < 1e-14);
    CHECK(r.anticommutation == 0.0);
  }
}

TEST_CASE("dimensions are stable under a small perturbation of lambda") {
  const SpectrumReport base = run(config_from("scenario: torus-fluid\n"));
  const SpectrumReport pert = run(config_from("scenario: torus-fluid\n", {"lambda.perturbation.amplitude=1e-3",
                                                                          "lambda.perturbation.seed=7"}));
  CHECK(pert.dimensions == base.dimensions);
  // the eigenvalue gap above the kernel moves by O(amplitude)
  for (std::size_t n = 0; n < base.degrees.size(); ++n)
    CHECK(std::abs(*pert.degrees[n].first_nonzero - *base.degrees[n].first_nonzero) <
          1e-2 * *base.degrees[n].first_nonzero);

  const SpectrumReport su2 = run(config_from("scenario: su2-flat\n"));
  const SpectrumReport su2p = run(config_from("scenario: su2-flat\n", {"lambda.perturbation.amplitude=1e-3"}));
  CHECK(su2.dimensions == std::vector<int>{1, 5, 7, 3});
  CHECK(su2p.dimensions == su2.dimensions);
}

TEST_CASE("pipeline diagnostics") {
  const SpectrumReport r = run(config_from("scenario: torus-fluid\n"));
  // Delta built to degree max(J, 3): ||Delta_1 Delta_0|| = 0, ||Delta_2 Delta_1|| = sqrt 3 for e3*
  REQUIRE(r.nilpotency.size() == 2);
  CHECK(r.nilpotency[0] == doctest::Approx(0.0));
  CHECK(r.nilpotency[1] == doctest::Approx(std::sqrt(3.0)).epsilon(1e-12));
  REQUIRE(r.elliptic.has_value());
  CHECK(r.elliptic->ratio() == doctest::Approx(1.5).epsilon(1e-12));
  CHECK(r.transversality.min_margin == doctest::Approx(std::sqrt(0.5)).epsilon(1e-12));
  CHECK(r.equivalence.c1 == doctest::Approx(1.5));
  CHECK(r.complex_residuals.size() == 1);

  const SpectrumReport curved = run(config_from("scenario: so3-curved\n"));
  CHECK(curved.equivalence.kappa_min == doctest::Approx(3.0));
  CHECK(curved.dimensions == std::vector<int>{1, 2, 1});
}

TEST_CASE("runs are deterministic") {
  const RunConfig cfg = config_from("scenario: torus-vortex\n", {"lambda.perturbation.amplitude=0.01"});
  const SpectrumReport a = run(cfg);
  const SpectrumReport b = run(cfg);
  REQUIRE(a.degrees.size() == b.degrees.size());
  for (std::size_t n = 0; n < a.degrees.size(); ++n)
    CHECK((a.degrees[n].eigenvalues - b.degrees[n].eigenvalues).cwiseAbs().maxCoeff() == 0.0);
}

TEST_CASE("pipeline errors name the failing step") {
  auto mesh = testing::torus(2, 4);
  auto so3 = testing::algebra("so3");
  auto field = testing::constant_field(mesh, so3, e(3, 2));

  PipelineConfig none;
  CHECK(failing_step(none) == PipelineStep::SelectMetric);

  PipelineConfig bad_alpha;
  bad_alpha.field = field;
  bad_alpha.metric = MetricChoice::mixed(1.5);
  CHECK(failing_step(bad_alpha) == PipelineStep::Assemble);

  PipelineConfig bad_j;
  bad_j.field = field;
  bad_j.truncation = -1;
  CHECK(failing_step(bad_j) == PipelineStep::Assemble);

  PipelineConfig stalled;
  stalled.field = field;
  stalled.eigen.dense_limit = 1;
  stalled.eigen.max_iterations = 1;
  stalled.eigen.residual_tolerance = 1e-300;
  CHECK(failing_step(stalled) == PipelineStep::Eigensolve);

  PipelineConfig strict;
  strict.field = field;
  strict.self_adjoint_tolerance = -1.0;
  try {
    run_pipeline(strict);
    FAIL("expected a pipeline error");
  } catch (const PipelineError& err) {
    CHECK(err.step_number() == 3);
    CHECK(std::string(err.what()).rfind("step 3 (eigenvalue problem): ", 0) == 0);
  }

  PipelineConfig ok;
  ok.field = field;
  ok.keep_harmonic_basis = true;
  const SpectrumReport r = run_pipeline(ok);
  CHECK(r.degrees[1].harmonic_basis.cols() == 2);
  CHECK(r.degrees[1].harmonic_basis.rows() == 32);
}

TEST_CASE("J = 1 on T^1 and T^2: Kunneth with the zero map Sym^0 -> Sym^1") {
  const SpectrumReport circle = run(config_from("scenario: circle\n", {"truncation=1"}));
  CHECK(circle.dimensions == std::vector<int>{1, 4, 3});
}
