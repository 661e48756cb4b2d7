// Acceptance suite: one pass/fail line per criterion, nonzero exit when any
// criterion fails. Heavier randomized checks are seeded and deterministic.

#include <cstdio>
#include <cstdlib>
#include <fstream>
#include <optional>
#include <string>
#include <sys/wait.h>
#include <vector>

#include "test_support.hpp"

using namespace cpz;
namespace ts = test_support;

namespace {

int g_failures = 0;

void report(int id, const std::string& label, bool ok, const std::string& detail = "") {
  std::printf("criterion %d (%s): %s%s%s\n", id, label.c_str(), ok ? "PASS" : "FAIL",
              detail.empty() ? "" : " -- ", detail.c_str());
  std::fflush(stdout);
  if (!ok) ++g_failures;
}

std::string fixture_path(const char* name) {
  return std::string(CPZ_DATA_DIR) + "/" + name + ".json";
}

struct CliRun {
  int exit_code = -1;
  Json verdict;
  bool has_verdict = false;
};

CliRun run_check_cli(const std::string& inner, const std::string& outer,
                     const std::string& extra, const std::string& tag) {
  const std::string json_path = "acceptance_" + tag + ".json";
  const std::string command = std::string(CPZ_CLI_PATH) + " check --inner " +
                              fixture_path(inner.c_str()) + " --outer " +
                              fixture_path(outer.c_str()) + " --method cor1 --seed 0 " +
                              extra + " --json " + json_path +
                              " > acceptance_cli_out.txt 2>&1";
  CliRun run;
  const int status = std::system(command.c_str());
  run.exit_code = WIFEXITED(status) ? WEXITSTATUS(status) : -1;
  std::ifstream stream(json_path);
  if (stream.good()) {
    run.verdict = Json::parse(stream, nullptr, false);
    run.has_verdict = !run.verdict.is_discarded();
  }
  std::remove(json_path.c_str());
  return run;
}

struct RecordedPair {
  ConPolyZonotope inner;
  ConPolyZonotope outer;
  std::string label;
};

std::vector<RecordedPair> g_feasible_pairs;

// ---- criteria 1, 2 and the exit-code part of 8 ----

void run_cli_matrix(bool& codes_ok) {
  struct Case {
    const char* inner;
    const char* outer;
    bool expect_proven;
  };
  const Case cases[] = {
      {"p1", "p2", true},  {"p2", "p1", false}, {"p1", "p3", true},
      {"p3", "p1", false}, {"p2", "p3", true},  {"p3", "p2", false},
  };

  bool verdicts_ok = true;
  bool times_ok = true;
  codes_ok = true;
  std::string detail;
  for (const Case& c : cases) {
    const std::string tag = std::string(c.inner) + "_in_" + c.outer;
    const CliRun run = run_check_cli(c.inner, c.outer, "", tag);
    const int expected = c.expect_proven ? 0 : 2;
    if (run.exit_code != expected) codes_ok = false;
    const std::string status =
        run.has_verdict ? run.verdict.value("status", "?") : "?";
    const double wall =
        run.has_verdict ? run.verdict.value("wall_time_s", 1e9) : 1e9;
    if (c.expect_proven != (status == "proven")) verdicts_ok = false;
    if (wall > 120.0) times_ok = false;
    detail += std::string(c.inner) + "<=" + c.outer + ":" + status + " ";
    if (c.expect_proven) {
      g_feasible_pairs.push_back({parse_set(fixture_path(c.inner)),
                                  parse_set(fixture_path(c.outer)),
                                  tag});
    }
  }
  report(1, "paired verdicts via the cor1 encoding", verdicts_ok && times_ok, detail);
}

void run_falsification(bool& exit3_ok) {
  struct Case {
    const char* inner;
    const char* outer;
  };
  const Case cases[] = {{"p2", "p1"}, {"p3", "p1"}, {"p3", "p2"}};
  bool ok = true;
  exit3_ok = true;
  std::string detail;
  for (const Case& c : cases) {
    const std::string tag = std::string("falsify_") + c.inner + "_" + c.outer;
    const CliRun run = run_check_cli(c.inner, c.outer, "--falsify 10000", tag);
    if (run.exit_code != 3) exit3_ok = false;
    double distance = 0.0;
    if (run.has_verdict && run.verdict.contains("witness")) {
      distance = run.verdict["witness"].value("distance", 0.0);
    }
    if (!(run.exit_code == 3 && distance > 1e-2)) ok = false;
    char buffer[96];
    std::snprintf(buffer, sizeof buffer, "%s!<=%s:d=%.3g ", c.inner, c.outer, distance);
    detail += buffer;
  }
  report(2, "counterexamples for the reversed pairs", ok, detail);
}

// ---- criterion 3 ----

void run_self_inclusion() {
  std::mt19937_64 rng(301);
  bool ok = true;
  int feasible = 0;
  double worst_residual = 0.0;
  for (int trial = 0; trial < 50; ++trial) {
    const bool constrained = trial % 5 != 3;
    const ConPolyZonotope set = ts::random_cpz(rng, 3, 6, 4, 4, constrained);
    SolveOptions opts;
    opts.seed = 300 + trial;
    const SolveOutcome outcome = check_inclusion(set, set, Method::SplitForm, opts);
    if (outcome.status != SolveStatus::Feasible) {
      ok = false;
      continue;
    }
    ++feasible;
    const CertificateCheckReport& report_ = *outcome.report;
    worst_residual = std::max(worst_residual, report_.max_eq_residual());
    if (!report_.pass() || report_.max_eq_residual() > 1e-8) ok = false;
    g_feasible_pairs.push_back({set, set, "self_" + std::to_string(trial)});
  }
  char detail[128];
  std::snprintf(detail, sizeof detail, "%d/50 feasible, worst residual %.2e",
                feasible, worst_residual);
  report(3, "random self inclusions via the split encoding", ok, detail);
}

// ---- criterion 4 ----

void run_size_accounting() {
  std::mt19937_64 rng(401);
  bool ok = true;
  for (int trial = 0; trial < 200; ++trial) {
    const bool inner_constrained = trial % 4 != 1;
    const bool outer_constrained = trial % 5 != 2;
    const ConPolyZonotope inner = ts::random_cpz(rng, 3, 6, 4, 4, inner_constrained);
    ConPolyZonotope outer = ts::random_cpz(rng, 3, 6, 4, 4, outer_constrained);
    outer.c = ts::random_matrix(rng, inner.dim(), 1);
    outer.G = ts::random_matrix(rng, inner.dim(), outer.num_generators());

    const auto dims = [&](const FeasibilitySystem& sys) {
      Eigen::Index ineq = sys.lin_ineq_matrix.rows() + sys.bounded_count();
      for (const auto& block : sys.log_blocks) ineq += block.coeff.rows();
      return SizeReport{sys.num_vars, sys.eq_matrix.rows(), ineq};
    };
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
    if (!(abs.size_report == abs_expected && dims(abs) == abs_expected &&
          split.size_report == split_expected && dims(split) == split_expected)) {
      ok = false;
    }
  }
  // the bundled pair instantiates the first closed form at 33 variables
  const FeasibilitySystem bundled =
      encode_abs_form(parse_set(fixture_path("p1")), parse_set(fixture_path("p2")));
  if (bundled.size_report.vars != 33) ok = false;
  report(4, "encoding sizes match the closed forms", ok);
}

// ---- criterion 5 ----

void run_linear_map_exactness() {
  std::mt19937_64 rng(501);
  bool ok = true;
  double worst = 0.0;
  for (int trial = 0; trial < 100; ++trial) {
    const ConPolyZonotope set = ts::random_cpz(rng);
    const Matrix map = ts::random_matrix(rng, ts::uniform_int(rng, 1, 3), set.dim(), 2.0);
    Vector lambda(set.num_factors());
    for (Eigen::Index k = 0; k < lambda.size(); ++k) {
      lambda(k) = ts::uniform_real(rng, -1, 1);
    }
    const double err = (evaluate(linear_map(map, set), lambda).point -
                        map * evaluate(set, lambda).point)
                           .lpNorm<Eigen::Infinity>();
    worst = std::max(worst, err);
    if (err > 1e-12) ok = false;
  }
  char detail[64];
  std::snprintf(detail, sizeof detail, "worst deviation %.2e", worst);
  report(5, "linear maps are pointwise exact", ok, detail);
}

// ---- criterion 6 ----

void run_cz_consistency() {
  std::mt19937_64 rng(601);
  bool ok = true;
  for (int trial = 0; trial < 100; ++trial) {
    const ConPolyZonotope outer = ts::random_cz(rng);
    const double delta = ts::uniform_real(rng, 0.3, 0.8);
    const ConPolyZonotope inner = ts::scale_generators(outer, delta);
    const SolveOutcome outcome = solve_linear_feasibility(encode_linear_form(inner, outer));
    if (outcome.status != SolveStatus::Feasible) {
      ok = false;
      continue;
    }
    // transported certificate re-verified under the nonsmooth conditions
    const CertificateCheckReport recheck =
        verify_certificate(inner, outer, *outcome.certificate);
    if (!recheck.pass()) ok = false;
    g_feasible_pairs.push_back({inner, outer, "cz_" + std::to_string(trial)});
  }
  report(6, "linear CZ certificates transport to the exact conditions", ok);
}

// ---- criterion 7 ----

void run_soundness_cross_check() {
  bool ok = true;
  std::string first_failure;
  long checked_points = 0;
  for (std::size_t idx = 0; idx < g_feasible_pairs.size(); ++idx) {
    const RecordedPair& pair = g_feasible_pairs[idx];
    OracleOptions fast;
    fast.grid_per_dim = 9;
    fast.refine_iters = 80;
    fast.seed = 700 + idx;
    const SampleBatch batch = sample_points(pair.inner, 10000, 1e-9, 7000 + idx);
    const MembershipSearcher searcher(pair.outer, fast);
    std::optional<MembershipSearcher> fine;
    for (const SamplePair& sample : batch.pairs) {
      ++checked_points;
      double dist = searcher.distance(sample.point, 9.9e-4);
      if (dist > 1e-3) {
        // escalate the search effort before declaring a violation
        if (!fine) {
          OracleOptions slow;
          slow.grid_per_dim = 21;
          slow.refine_iters = 150;
          slow.seed = 7500 + idx;
          fine.emplace(pair.outer, slow);
        }
        dist = fine->distance(sample.point, 9.9e-4);
      }
      if (dist > 1e-3) {
        ok = false;
        if (first_failure.empty()) {
          char buffer[128];
          std::snprintf(buffer, sizeof buffer, "pair %s: distance %.3e",
                        pair.label.c_str(), dist);
          first_failure = buffer;
        }
        break;
      }
    }
  }
  char detail[160];
  std::snprintf(detail, sizeof detail, "%zu feasible pairs, %ld sampled points%s%s",
                g_feasible_pairs.size(), checked_points,
                first_failure.empty() ? "" : "; ", first_failure.c_str());
  report(7, "sampled inner points stay inside certified outers", ok, detail);
}

// ---- criterion 8 ----

void run_round_trip_and_exit_codes(bool matrix_codes_ok, bool falsify_codes_ok) {
  bool round_trip_ok = true;
  for (const char* name : {"example", "p1", "p2", "p3"}) {
    const ConPolyZonotope set = parse_set(fixture_path(name));
    const ConPolyZonotope reparsed =
        set_from_json(Json::parse(set_to_json(set, name).dump()));
    if (!(reparsed.c == set.c && reparsed.G == set.G && reparsed.E == set.E &&
          reparsed.F == set.F && reparsed.theta == set.theta &&
          reparsed.R == set.R)) {
      round_trip_ok = false;
    }
  }
  report(8, "round trips are bit exact and exit codes hold",
         round_trip_ok && matrix_codes_ok && falsify_codes_ok);
}

}  // namespace

int main() {
  bool matrix_codes_ok = false;
  bool falsify_codes_ok = false;
  run_cli_matrix(matrix_codes_ok);
  run_falsification(falsify_codes_ok);
  run_self_inclusion();
  run_size_accounting();
  run_linear_map_exactness();
  run_cz_consistency();
  run_soundness_cross_check();
  run_round_trip_and_exit_codes(matrix_codes_ok, falsify_codes_ok);

  if (g_failures == 0) {
    std::printf("acceptance: all criteria passed\n");
  } else {
    std::printf("acceptance: %d criterion(s) failed\n", g_failures);
  }
  return g_failures == 0 ? 0 : 1;
}
