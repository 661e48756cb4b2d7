#include <catch2/catch.hpp>

#include <random>

#include "test_support.hpp"

using namespace cpz;
namespace ts = test_support;

namespace {

ConPolyZonotope unit_box(double scale) {
  return make_zonotope(Vector::Zero(2), Matrix(scale * Matrix::Identity(2, 2)));
}

}  // namespace

TEST_CASE("linear feasibility on box pairs", "[solver][lp]") {
  SECTION("half box inside the unit box") {
    const SolveOutcome outcome =
        solve_linear_feasibility(encode_linear_form(unit_box(0.5), unit_box(1.0)));
    REQUIRE(outcome.status == SolveStatus::Feasible);
    REQUIRE(outcome.report->pass());
    // |gamma| + |Gamma| 1 = 0.5 at the forced witness
    REQUIRE(outcome.certificate->Gamma.isApprox(Matrix(0.5 * Matrix::Identity(2, 2)),
                                                1e-9));
  }

  SECTION("double box cannot fit") {
    const SolveOutcome outcome =
        solve_linear_feasibility(encode_linear_form(unit_box(2.0), unit_box(1.0)));
    REQUIRE(outcome.status == SolveStatus::NotProven);
    REQUIRE(outcome.best_violation >= 1.0 - 1e-9);
  }

  SECTION("log-bearing systems are rejected") {
    const ConPolyZonotope example = ts::load_fixture("example");
    REQUIRE_THROWS_AS(solve_linear_feasibility(encode_split_form(example, example)),
                      std::invalid_argument);
  }
}

TEST_CASE("linear feasibility certifies random CZ self inclusions", "[solver][lp]") {
  std::mt19937_64 rng(101);
  for (int trial = 0; trial < 50; ++trial) {
    const ConPolyZonotope set = ts::random_cz(rng);
    const SolveOutcome outcome =
        solve_linear_feasibility(encode_linear_form(set, set));
    REQUIRE(outcome.status == SolveStatus::Feasible);
    REQUIRE(outcome.report->pass());
  }
}

TEST_CASE("linear feasibility is deterministic", "[solver][lp]") {
  std::mt19937_64 rng(103);
  const ConPolyZonotope outer = ts::random_cz(rng);
  const ConPolyZonotope inner = ts::scale_generators(outer, 0.7);
  const FeasibilitySystem sys = encode_linear_form(inner, outer);
  const SolveOutcome a = solve_linear_feasibility(sys);
  const SolveOutcome b = solve_linear_feasibility(sys);
  REQUIRE(a.status == SolveStatus::Feasible);
  REQUIRE(a.certificate->gamma == b.certificate->gamma);
  REQUIRE(a.certificate->Gamma == b.certificate->Gamma);
  REQUIRE(a.certificate->Pi == b.certificate->Pi);
}

TEST_CASE("nonlinear feasibility proves self inclusion of the example",
          "[solver][nlp]") {
  const ConPolyZonotope example = ts::load_fixture("example");
  SolveOptions opts;
  opts.seed = 2;
  const SolveOutcome outcome =
      solve_nonlinear_feasibility(encode_split_form(example, example), opts);
  REQUIRE(outcome.status == SolveStatus::Feasible);
  REQUIRE(outcome.report->pass());
  REQUIRE(outcome.report->max_eq_residual() <= 1e-8);
  REQUIRE(outcome.alpha.has_value());
  REQUIRE((outcome.alpha->alpha_gamma.array() >= -1e-9).all());
  // the known witness is the identity certificate
  REQUIRE((outcome.certificate->Gamma - Matrix::Identity(4, 4))
              .cwiseAbs()
              .maxCoeff() <= 1e-6);
  REQUIRE(outcome.certificate->gamma.cwiseAbs().maxCoeff() <= 1e-6);
}

TEST_CASE("nonlinear feasibility handles the nonsmooth form", "[solver][nlp]") {
  const ConPolyZonotope example = ts::load_fixture("example");
  SolveOptions opts;
  opts.seed = 4;
  const SolveOutcome outcome =
      solve_nonlinear_feasibility(encode_abs_form(example, example), opts);
  REQUIRE(outcome.status == SolveStatus::Feasible);
  REQUIRE(outcome.report->pass());
  REQUIRE_FALSE(outcome.alpha.has_value());
}

TEST_CASE("nonlinear feasibility is deterministic", "[solver][nlp]") {
  const ConPolyZonotope p1 = ts::load_fixture("p1");
  const ConPolyZonotope p2 = ts::load_fixture("p2");
  SolveOptions opts;
  opts.seed = 9;
  const FeasibilitySystem sys = encode_split_form(p1, p2);
  const SolveOutcome a = solve_nonlinear_feasibility(sys, opts);
  const SolveOutcome b = solve_nonlinear_feasibility(sys, opts);
  REQUIRE(a.status == b.status);
  REQUIRE(a.restarts_used == b.restarts_used);
  REQUIRE(a.best_violation == b.best_violation);
  if (a.status == SolveStatus::Feasible) {
    REQUIRE(a.certificate->gamma == b.certificate->gamma);
    REQUIRE(a.certificate->Gamma == b.certificate->Gamma);
  }
}

TEST_CASE("shrunken factor images stay certified", "[solver][nlp]") {
  const ConPolyZonotope example = ts::load_fixture("example");
  for (double delta : {0.5, 0.7, 0.9}) {
    const ConPolyZonotope inner = ts::shrink_factors(example, delta);
    SolveOptions opts;
    opts.seed = 13;
    const SolveOutcome outcome = check_inclusion(inner, example, Method::SplitForm, opts);
    INFO("delta = " << delta);
    REQUIRE(outcome.status == SolveStatus::Feasible);
    REQUIRE(outcome.report->pass());
  }
}

TEST_CASE("bundled pair verdicts in both directions", "[solver][nlp]") {
  const ConPolyZonotope p1 = ts::load_fixture("p1");
  const ConPolyZonotope p2 = ts::load_fixture("p2");
  SolveOptions opts;
  opts.seed = 0;

  const SolveOutcome forward = check_inclusion(p1, p2, Method::SplitForm, opts);
  REQUIRE(forward.status == SolveStatus::Feasible);
  REQUIRE(forward.report->pass());

  const SolveOutcome reverse = check_inclusion(p2, p1, Method::SplitForm, opts);
  REQUIRE(reverse.status == SolveStatus::NotProven);
  REQUIRE(reverse.best_violation > 0.0);
}

TEST_CASE("LP feasibility transports to the split encoding", "[solver][property]") {
  std::mt19937_64 rng(107);
  int lp_feasible = 0;
  for (int trial = 0; trial < 100; ++trial) {
    const ConPolyZonotope outer = ts::random_cz(rng);
    const double delta = ts::uniform_real(rng, 0.4, 1.25);
    ConPolyZonotope inner = ts::scale_generators(outer, delta);
    if (trial % 7 == 0) {
      inner.c = outer.c + 0.05 * ts::random_matrix(rng, outer.dim(), 1);
    }
    const SolveOutcome lp = solve_linear_feasibility(encode_linear_form(inner, outer));
    if (lp.status != SolveStatus::Feasible) continue;
    ++lp_feasible;
    SolveOptions opts;
    opts.seed = 1000 + trial;
    const SolveOutcome nlp =
        solve_nonlinear_feasibility(encode_split_form(inner, outer), opts);
    REQUIRE(nlp.status == SolveStatus::Feasible);
    REQUIRE(nlp.report->pass());
  }
  REQUIRE(lp_feasible >= 30);  // the generator must exercise the implication
}

TEST_CASE("auto routing picks the linear form for CZ pairs", "[solver]") {
  std::mt19937_64 rng(109);
  const ConPolyZonotope outer = ts::random_cz(rng);
  const ConPolyZonotope inner = ts::scale_generators(outer, 0.6);
  const SolveOutcome linear = check_inclusion(inner, outer, Method::Auto);
  REQUIRE(linear.resolved_method == Method::LinearForm);
  REQUIRE(linear.status == SolveStatus::Feasible);

  const ConPolyZonotope example = ts::load_fixture("example");
  SolveOptions opts;
  opts.seed = 3;
  const SolveOutcome split = check_inclusion(example, example, Method::Auto, opts);
  REQUIRE(split.resolved_method == Method::SplitForm);
  REQUIRE(split.status == SolveStatus::Feasible);
}

TEST_CASE("inconsistent equalities fail fast", "[solver]") {
  // a one-generator outer set cannot reproduce two independent directions
  ConPolyZonotope outer;
  outer.c = Vector::Zero(2);
  outer.G = Matrix::Zero(2, 1);
  outer.G(0, 0) = 1.0;
  outer.E = IntMatrix::Identity(1, 1);
  outer.F.resize(0, 0);
  outer.theta.resize(0);
  outer.R.resize(1, 0);

  const ConPolyZonotope inner =
      make_zonotope(Vector::Zero(2), Matrix::Identity(2, 2));
  SolveOptions opts;
  opts.restarts = 2;
  const SolveOutcome outcome =
      solve_nonlinear_feasibility(encode_split_form(inner, outer), opts);
  REQUIRE(outcome.status == SolveStatus::NotProven);
  REQUIRE(outcome.best_violation > 0.1);
  REQUIRE(outcome.wall_time_s < 5.0);
}
