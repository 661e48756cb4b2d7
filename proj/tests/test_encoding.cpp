#include <catch2/catch.hpp>

#include <random>

#include "test_support.hpp"

using namespace cpz;
namespace ts = test_support;

namespace {

Eigen::Index slice_sum(const FeasibilitySystem& sys) {
  return sys.vars.gamma.size + sys.vars.Gamma.size + sys.vars.Pi.size +
         sys.vars.Psi.size + sys.vars.psi.size + sys.vars.alpha_gamma.size +
         sys.vars.alpha_psi.size;
}

SizeReport actual_size(const FeasibilitySystem& sys) {
  Eigen::Index ineq = sys.lin_ineq_matrix.rows() + sys.bounded_count();
  for (const auto& block : sys.log_blocks) ineq += block.coeff.rows();
  return {sys.num_vars, sys.eq_matrix.rows(), ineq};
}

Matrix diag(std::initializer_list<double> values) {
  Vector v(static_cast<Eigen::Index>(values.size()));
  Eigen::Index i = 0;
  for (double value : values) v(i++) = value;
  return v.asDiagonal();
}

}  // namespace

TEST_CASE("encoding sizes on the bundled pair", "[encoding]") {
  const ConPolyZonotope p1 = ts::load_fixture("p1");
  const ConPolyZonotope p2 = ts::load_fixture("p2");

  const FeasibilitySystem abs = encode_abs_form(p1, p2);
  REQUIRE(abs.size_report.vars == 33);
  REQUIRE(abs.size_report.equalities == 14);
  REQUIRE(abs.size_report.inequalities == 6);
  REQUIRE(actual_size(abs) == abs.size_report);

  const FeasibilitySystem split = encode_split_form(p1, p2);
  REQUIRE(split.size_report.vars == 97);
  REQUIRE(split.size_report.equalities == 46);
  REQUIRE(split.size_report.inequalities == 70);
  REQUIRE(actual_size(split) == split.size_report);
}

TEST_CASE("encoding sizes on an unconstrained pair", "[encoding]") {
  const ConPolyZonotope box = make_zonotope(Vector::Zero(2), Matrix::Identity(2, 2));
  const FeasibilitySystem abs = encode_abs_form(box, box);
  REQUIRE(abs.size_report.vars == 6);
  REQUIRE(abs.size_report.equalities == 6);
  REQUIRE(abs.size_report.inequalities == 4);
  REQUIRE(actual_size(abs) == abs.size_report);

  // no split block for the empty constraint side
  const FeasibilitySystem split = encode_split_form(box, box);
  REQUIRE(split.vars.alpha_psi.size == 0);
  REQUIRE(split.vars.Psi.size == 0);
  REQUIRE(actual_size(split) == split.size_report);
}

TEST_CASE("encoding sizes equal the closed forms on random tuples",
          "[encoding][property]") {
  std::mt19937_64 rng(31);
  for (int trial = 0; trial < 50; ++trial) {
    const bool inner_constrained = trial % 4 != 1;
    const bool outer_constrained = trial % 5 != 2;
    const ConPolyZonotope inner = ts::random_cpz(rng, 3, 6, 4, 4, inner_constrained);
    ConPolyZonotope outer = ts::random_cpz(rng, 3, 6, 4, 4, outer_constrained);
    outer.c = ts::random_matrix(rng, inner.dim(), 1);
    outer.G = ts::random_matrix(rng, inner.dim(), outer.num_generators());

    const SizeReport abs_expected = abs_form_size(
        inner.dim(), inner.num_generators(), inner.num_constraint_generators(),
        inner.num_constraints(), outer.num_generators(), outer.num_factors(),
        outer.num_constraints(), outer.num_constraint_generators());
    const SizeReport split_expected = split_form_size(
        inner.dim(), inner.num_generators(), inner.num_constraint_generators(),
        inner.num_constraints(), outer.num_generators(), outer.num_factors(),
        outer.num_constraints(), outer.num_constraint_generators());

    const FeasibilitySystem abs = encode_abs_form(inner, outer);
    const FeasibilitySystem split = encode_split_form(inner, outer);
    REQUIRE(abs.size_report == abs_expected);
    REQUIRE(actual_size(abs) == abs_expected);
    REQUIRE(split.size_report == split_expected);
    REQUIRE(actual_size(split) == split_expected);
    REQUIRE(slice_sum(abs) == abs.num_vars);
    REQUIRE(slice_sum(split) == split.num_vars);
  }
}

TEST_CASE("encoding preconditions", "[encoding]") {
  const ConPolyZonotope example = ts::load_fixture("example");

  SECTION("ambient dimension mismatch") {
    Matrix proj(1, 2);
    proj << 1.0, 0.0;
    const ConPolyZonotope line = linear_map(proj, example);
    REQUIRE_THROWS_WITH(encode_abs_form(line, example),
                        Catch::Contains("ambient dimension mismatch"));
  }

  SECTION("rank-deficient outer exponent matrix") {
    ConPolyZonotope outer = make_polynomial_zonotope(
        Vector::Zero(2), Matrix::Identity(2, 2),
        (IntMatrix(2, 2) << 1, 1, 1, 1).finished());
    const ConPolyZonotope inner =
        make_zonotope(Vector::Zero(2), Matrix(0.5 * Matrix::Identity(2, 2)));
    REQUIRE_THROWS_WITH(encode_split_form(inner, outer),
                        Catch::Contains("rank-deficient"));
  }

  SECTION("linear form rejects polynomial sets") {
    REQUIRE_THROWS_WITH(encode_linear_form(example, example),
                        Catch::Contains("constrained zonotopes"));
  }
}

TEST_CASE("assembled equalities hold at hand-built witnesses", "[encoding]") {
  const ConPolyZonotope example = ts::load_fixture("example");
  const InclusionCertificate identity = identity_certificate(example);

  SECTION("nonsmooth form, self inclusion") {
    const FeasibilitySystem sys = encode_abs_form(example, example);
    const Vector z = ts::pack_solution(sys, identity);
    REQUIRE((sys.eq_matrix * z - sys.eq_rhs).lpNorm<Eigen::Infinity>() <= 1e-12);
  }

  SECTION("split form, self inclusion with minimal split") {
    const FeasibilitySystem sys = encode_split_form(example, example);
    const Vector z = ts::pack_solution(sys, identity);
    REQUIRE((sys.eq_matrix * z - sys.eq_rhs).lpNorm<Eigen::Infinity>() <= 1e-12);
    // the packed point is feasible outright: log of unit column sums is zero
    REQUIRE(detail::max_violation(sys, z, 1e-12) <= 1e-12);
  }

  SECTION("split form, scaled pair") {
    const ConPolyZonotope p1 = ts::load_fixture("p1");
    const ConPolyZonotope p2 = ts::load_fixture("p2");
    InclusionCertificate cert;
    cert.gamma = Vector::Zero(4);
    cert.Gamma = diag({0.9, 0.9, 0.72, 0.72});
    cert.Pi = Matrix::Identity(1, 1);
    cert.Psi = diag({0.9, 0.81, 0.81});
    cert.psi = Vector::Zero(3);
    const FeasibilitySystem sys = encode_split_form(p1, p2);
    const Vector z = ts::pack_solution(sys, cert);
    REQUIRE((sys.eq_matrix * z - sys.eq_rhs).lpNorm<Eigen::Infinity>() <= 1e-12);
    REQUIRE(detail::max_violation(sys, z, 1e-12) <= 1e-12);
  }
}

TEST_CASE("degenerate constraint branches keep the log rows", "[encoding]") {
  const ConPolyZonotope example = ts::load_fixture("example");
  ConPolyZonotope unconstrained = example;
  unconstrained.F.resize(0, 0);
  unconstrained.theta.resize(0);
  unconstrained.R.resize(example.E.rows(), 0);

  SECTION("constrained inner, unconstrained outer") {
    const FeasibilitySystem sys = encode_abs_form(example, unconstrained);
    REQUIRE(sys.vars.Pi.size == 0);
    REQUIRE(sys.vars.Psi.size == 0);
    REQUIRE(sys.vars.psi.size == 0);
    REQUIRE(sys.size_report.inequalities == 2 * example.num_factors());
  }

  SECTION("unconstrained inner, constrained outer keeps psi only") {
    const FeasibilitySystem sys = encode_abs_form(unconstrained, example);
    REQUIRE(sys.vars.Psi.size == 0);
    REQUIRE(sys.vars.psi.size == 3);
    REQUIRE(sys.vars.Pi.size == 0);
    // the offset equation reads F2 psi = theta2
    const Eigen::Index row = sys.eq_matrix.rows() - 1;
    REQUIRE(sys.eq_rhs(row) == Approx(1.5));
  }
}
