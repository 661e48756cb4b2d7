// Command-line front end: inclusion checks with optional falsification,
// constraint-respecting sampling to CSV, and linear maps of set documents.
//
// Exit codes: 0 proven, 2 not proven (or an empty sample), 3 falsified,
// 1 usage/IO/encoding errors.

#include <cstdio>
#include <exception>
#include <fstream>
#include <optional>
#include <string>

#include <CLI11.hpp>

#include "cpz/cpz.hpp"

namespace {

constexpr int kExitProven = 0;
constexpr int kExitUsage = 1;
constexpr int kExitNotProven = 2;
constexpr int kExitFalsified = 3;

std::string describe(const cpz::ConPolyZonotope& set) {
  char buffer[128];
  std::snprintf(buffer, sizeof buffer, "[%s d=%ld n=%ld s=%ld p=%ld q=%ld]",
                cpz::to_string(cpz::classify(set)), static_cast<long>(set.dim()),
                static_cast<long>(set.num_generators()),
                static_cast<long>(set.num_factors()),
                static_cast<long>(set.num_constraints()),
                static_cast<long>(set.num_constraint_generators()));
  return buffer;
}

struct CheckArgs {
  std::string inner_path;
  std::string outer_path;
  std::string method = "auto";
  double tol_eq = 1e-8;
  double tol_ineq = 1e-8;
  int restarts = 16;
  std::uint64_t seed = 0;
  int falsify_samples = 0;
  std::string json_path;
  double time_limit = 120.0;
};

int run_check(const CheckArgs& args) {
  const cpz::ConPolyZonotope inner = cpz::parse_set(args.inner_path);
  const cpz::ConPolyZonotope outer = cpz::parse_set(args.outer_path);
  const cpz::Method method = cpz::method_from_token(args.method);

  cpz::SolveOptions opts;
  opts.tol_eq = args.tol_eq;
  opts.tol_ineq = args.tol_ineq;
  opts.restarts = args.restarts;
  opts.seed = args.seed;
  opts.time_limit_s = args.time_limit;

  const cpz::SolveOutcome outcome = cpz::check_inclusion(inner, outer, method, opts);

  std::optional<cpz::Witness> witness;
  double falsify_time = 0.0;
  if (outcome.status == cpz::SolveStatus::NotProven && args.falsify_samples > 0) {
    const auto t0 = std::chrono::steady_clock::now();
    cpz::OracleOptions oracle_opts;
    oracle_opts.seed = args.seed;
    oracle_opts.tol_c = args.tol_eq;
    witness = cpz::falsify_inclusion(inner, outer, args.falsify_samples, oracle_opts);
    falsify_time = std::chrono::duration<double>(std::chrono::steady_clock::now() - t0)
                       .count();
  }

  cpz::VerdictDocument verdict;
  verdict.inner_name = args.inner_path;
  verdict.outer_name = args.outer_path;
  verdict.method = cpz::method_token(outcome.resolved_method);
  verdict.wall_time_s = outcome.wall_time_s + falsify_time;
  if (outcome.status == cpz::SolveStatus::Feasible) {
    verdict.status = "proven";
    verdict.certificate = outcome.certificate;
    verdict.alpha = outcome.alpha;
    verdict.residuals = outcome.report;
  } else {
    verdict.status = witness ? "falsified" : "not_proven";
    verdict.witness = witness;
  }

  std::printf("inner : %s  %s\n", args.inner_path.c_str(), describe(inner).c_str());
  std::printf("outer : %s  %s\n", args.outer_path.c_str(), describe(outer).c_str());
  std::printf("method: %s\n", verdict.method.c_str());
  std::printf("seed  : %llu\n", static_cast<unsigned long long>(args.seed));
  if (verdict.status == "proven") {
    std::printf("status: proven  (%d restart%s, %.3f s)\n", outcome.restarts_used,
                outcome.restarts_used == 1 ? "" : "s", verdict.wall_time_s);
    std::printf("max equality residual: %.3e\n", outcome.report->max_eq_residual());
  } else if (verdict.status == "falsified") {
    std::printf("status: falsified  (%.3f s)\n", verdict.wall_time_s);
    std::printf("witness distance outside outer set: %.6g\n", witness->outer_distance);
  } else {
    std::printf("status: not proven  (%d restart%s, %.3f s, best violation %.3e)\n",
                outcome.restarts_used, outcome.restarts_used == 1 ? "" : "s",
                verdict.wall_time_s, outcome.best_violation);
    std::printf("note  : the test is sufficient only; no claim of non-inclusion\n");
  }

  if (!args.json_path.empty()) {
    cpz::write_json(args.json_path, cpz::verdict_to_json(verdict));
  }
  if (verdict.status == "proven") return kExitProven;
  return verdict.status == "falsified" ? kExitFalsified : kExitNotProven;
}

struct SampleArgs {
  std::string set_path;
  int count = 0;
  std::uint64_t seed = 0;
  std::string out_path;
};

int run_sample(const SampleArgs& args) {
  const cpz::ConPolyZonotope set = cpz::parse_set(args.set_path);
  const double tol_c = 1e-9;
  const cpz::SampleBatch batch = cpz::sample_points(set, args.count, tol_c, args.seed);
  cpz::write_csv_points(args.out_path, batch.pairs, set.dim());
  std::printf("sampled %zu of %d points (seed %llu, %ld attempts) -> %s\n",
              batch.pairs.size(), batch.requested,
              static_cast<unsigned long long>(args.seed), batch.attempts,
              args.out_path.c_str());
  return batch.pairs.empty() ? kExitNotProven : kExitProven;
}

struct MapArgs {
  std::string matrix_path;
  std::string set_path;
  std::string out_path;
};

int run_map(const MapArgs& args) {
  std::ifstream matrix_stream(args.matrix_path);
  if (!matrix_stream) throw cpz::ParseError("cannot open " + args.matrix_path);
  cpz::Json matrix_doc;
  try {
    matrix_doc = cpz::Json::parse(matrix_stream);
  } catch (const cpz::Json::parse_error& err) {
    throw cpz::ParseError(args.matrix_path + ": " + err.what());
  }
  std::vector<std::string> issues;
  cpz::Matrix map_matrix;
  if (!cpz::detail::read_real_matrix(matrix_doc, "matrix", issues, map_matrix)) {
    throw cpz::ParseError(args.matrix_path + ": invalid matrix", issues);
  }

  std::ifstream set_stream(args.set_path);
  if (!set_stream) throw cpz::ParseError("cannot open " + args.set_path);
  const cpz::Json set_doc = cpz::Json::parse(set_stream);
  const cpz::ConPolyZonotope set = cpz::set_from_json(set_doc);

  const cpz::ConPolyZonotope mapped = cpz::linear_map(map_matrix, set);
  std::string name;
  if (set_doc.contains("name") && set_doc["name"].is_string()) {
    name = set_doc["name"].get<std::string>();
  }
  cpz::write_json(args.out_path, cpz::set_to_json(mapped, name));
  std::printf("mapped %s by a %ldx%ld matrix -> %s\n", args.set_path.c_str(),
              static_cast<long>(map_matrix.rows()), static_cast<long>(map_matrix.cols()),
              args.out_path.c_str());
  return kExitProven;
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"constrained polynomial zonotopes: inclusion checks, sampling, maps"};
  app.require_subcommand(1);

  CheckArgs check_args;
  CLI::App* check = app.add_subcommand("check", "test inclusion of one set in another");
  check->add_option("--inner", check_args.inner_path, "inner set document")->required();
  check->add_option("--outer", check_args.outer_path, "outer set document")->required();
  check->add_option("--method", check_args.method,
                    "encoding: prop1, cor1, cz-lp or auto (default auto)");
  check->add_option("--tol-eq", check_args.tol_eq, "equality tolerance");
  check->add_option("--tol-ineq", check_args.tol_ineq, "inequality tolerance");
  check->add_option("--restarts", check_args.restarts, "solver restarts");
  check->add_option("--seed", check_args.seed, "random seed");
  check->add_option("--falsify", check_args.falsify_samples,
                    "on not-proven, search a counterexample over N samples");
  check->add_option("--json", check_args.json_path, "write the verdict document here");
  check->add_option("--time-limit", check_args.time_limit, "solver time limit [s]");

  SampleArgs sample_args;
  CLI::App* sample = app.add_subcommand("sample", "sample admissible points to CSV");
  sample->add_option("--set", sample_args.set_path, "set document")->required();
  sample->add_option("--count", sample_args.count, "requested number of points")
      ->required();
  sample->add_option("--seed", sample_args.seed, "random seed");
  sample->add_option("--out", sample_args.out_path, "output CSV path")->required();

  MapArgs map_args;
  CLI::App* map_cmd = app.add_subcommand("map", "apply a left matrix map to a set");
  map_cmd->add_option("--matrix", map_args.matrix_path, "JSON m x d matrix")->required();
  map_cmd->add_option("--set", map_args.set_path, "set document")->required();
  map_cmd->add_option("--out", map_args.out_path, "output set document")->required();

  try {
    app.parse(argc, argv);
  } catch (const CLI::ParseError& err) {
    const int code = app.exit(err);
    return code == 0 ? 0 : kExitUsage;
  }

  try {
    if (check->parsed()) return run_check(check_args);
    if (sample->parsed()) return run_sample(sample_args);
    if (map_cmd->parsed()) return run_map(map_args);
  } catch (const std::exception& err) {
    std::fprintf(stderr, "error: %s\n", err.what());
    return kExitUsage;
  }
  return kExitUsage;
}
