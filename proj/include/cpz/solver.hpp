#ifndef CPZ_SOLVER_HPP_
#define CPZ_SOLVER_HPP_

#include <chrono>
#include <cmath>
#include <cstdint>
#include <limits>
#include <optional>
#include <random>
#include <vector>

#include "cpz/certificate.hpp"
#include "cpz/encoding.hpp"
#include "cpz/linalg.hpp"
#include "cpz/set.hpp"

namespace cpz {

struct SolveOptions {
  double tol_eq = 1e-8;
  double tol_ineq = 1e-8;
  int max_iter = 2000;
  int restarts = 16;
  std::uint64_t seed = 0;
  double eps_log = 1e-12;
  double time_limit_s = 120.0;
};

enum class SolveStatus { Feasible, NotProven };

enum class Method { AbsForm, SplitForm, LinearForm, Auto };

/**
 * @brief Outcome of a feasibility solve.
 *
 * Feasible always carries a certificate that passed verify_certificate; a
 * NotProven outcome never claims non-inclusion, it only reports the smallest
 * worst-case violation encountered.
 */
struct SolveOutcome {
  SolveStatus status = SolveStatus::NotProven;
  std::optional<InclusionCertificate> certificate;
  std::optional<AlphaCertificate> alpha;
  std::optional<CertificateCheckReport> report;
  double best_violation = std::numeric_limits<double>::infinity();
  double wall_time_s = 0.0;
  int restarts_used = 0;
  Method resolved_method = Method::Auto;  ///< encoding that produced the outcome
};

namespace detail {

inline double log_eps(double a, double eps) {
  return a >= eps ? std::log(a) : std::log(eps) + (a - eps) / eps;
}

inline double dlog_eps(double a, double eps) {
  return a >= eps ? 1.0 / a : 1.0 / eps;
}

/// Values (and optionally jacobian rows) of every inequality row of a
/// system: log rows first, then linear rows, then lower-bound rows.
/// A row is violated when its value is positive.
struct IneqEval {
  Vector values;
  Matrix jacobian;  ///< rows x num_vars, filled only on request
};

inline Eigen::Index inequality_row_count(const FeasibilitySystem& sys) {
  Eigen::Index rows = sys.lin_ineq_matrix.rows() + sys.bounded_count();
  for (const auto& block : sys.log_blocks) rows += block.coeff.rows();
  return rows;
}

inline IneqEval evaluate_inequalities(const FeasibilitySystem& sys, const Vector& z,
                                      double eps_log, bool with_jacobian) {
  IneqEval eval;
  const Eigen::Index total = inequality_row_count(sys);
  eval.values.resize(total);
  if (with_jacobian) eval.jacobian = Matrix::Zero(total, sys.num_vars);

  Eigen::Index row = 0;
  for (const auto& block : sys.log_blocks) {
    const Eigen::Index m = block.arg_matrix.rows();
    const Eigen::Index rows = block.coeff.rows();
    Vector zeff = block.abs_arg ? Vector(z.cwiseAbs()) : z;
    Vector arg = block.arg_matrix * zeff + block.arg_offset;
    Vector logs(m), dlogs(m);
    for (Eigen::Index j = 0; j < m; ++j) {
      logs(j) = log_eps(arg(j), eps_log);
      dlogs(j) = dlog_eps(arg(j), eps_log);
    }
    eval.values.segment(row, rows) = block.coeff * logs;
    if (with_jacobian && rows > 0) {
      Matrix darg = dlogs.asDiagonal() * block.arg_matrix;  // m x nv
      if (block.abs_arg) {
        // softened subgradient of |z|; keeps descent alive across the kinks
        for (Eigen::Index k = 0; k < sys.num_vars; ++k) {
          const double zk = z(k);
          darg.col(k) *= zk / std::sqrt(zk * zk + 1e-12);
        }
      }
      eval.jacobian.middleRows(row, rows) = block.coeff * darg;
    }
    row += rows;
  }

  const Eigen::Index lin_rows = sys.lin_ineq_matrix.rows();
  if (lin_rows > 0) {
    eval.values.segment(row, lin_rows) = sys.lin_ineq_matrix * z + sys.lin_ineq_offset;
    if (with_jacobian) eval.jacobian.middleRows(row, lin_rows) = sys.lin_ineq_matrix;
    row += lin_rows;
  }

  for (Eigen::Index k = 0; k < sys.num_vars; ++k) {
    if (!std::isfinite(sys.lower_bounds(k))) continue;
    eval.values(row) = sys.lower_bounds(k) - z(k);
    if (with_jacobian) eval.jacobian(row, k) = -1.0;
    ++row;
  }
  return eval;
}

/// Worst violation of any constraint of the system at z (equalities included).
inline double max_violation(const FeasibilitySystem& sys, const Vector& z,
                            double eps_log) {
  double worst = 0.0;
  if (sys.eq_matrix.rows() > 0) {
    worst = (sys.eq_matrix * z - sys.eq_rhs).lpNorm<Eigen::Infinity>();
  }
  const IneqEval eval = evaluate_inequalities(sys, z, eps_log, false);
  for (Eigen::Index i = 0; i < eval.values.size(); ++i) {
    worst = std::max(worst, eval.values(i));
  }
  return worst;
}

struct Phase1Result {
  Vector z;
  double optimum = std::numeric_limits<double>::infinity();
  bool converged = false;
  long pivots = 0;
};

/**
 * @brief Phase-1 simplex for A z = b, C z + e <= 0, z >= lb (entrywise,
 * -inf meaning free).
 *
 * Free variables are split into nonnegative pairs, inequality rows receive
 * slacks and every row an artificial variable; the sum of artificials is
 * minimized first. When phase2_cost is given (one entry per z variable,
 * meaningful for bounded variables) the run continues minimizing that cost
 * over the feasible set. Deterministic.
 */
inline Phase1Result phase1_simplex(const Matrix& A, const Vector& b, const Matrix& C,
                                   const Vector& e, const Vector& lb,
                                   const Vector* phase2_cost = nullptr) {
  const Eigen::Index nz = lb.size();
  const Eigen::Index me = A.rows();
  const Eigen::Index mi = C.rows();
  const Eigen::Index m = me + mi;

  // column layout per variable: bounded -> one shifted column, free -> pair
  std::vector<Eigen::Index> col_of(nz), neg_col_of(nz, -1);
  Eigen::Index nx = 0;
  for (Eigen::Index k = 0; k < nz; ++k) {
    col_of[k] = nx++;
    if (!std::isfinite(lb(k))) neg_col_of[k] = nx++;
  }
  const Eigen::Index slack0 = nx;
  const Eigen::Index art0 = nx + mi;
  const Eigen::Index ncols = art0 + m;

  Matrix T = Matrix::Zero(m, ncols + 1);
  auto fill_row = [&](Eigen::Index row, const auto& coeff_row, double rhs) {
    for (Eigen::Index k = 0; k < nz; ++k) {
      const double a = coeff_row(k);
      if (a == 0.0) continue;
      T(row, col_of[k]) += a;
      if (neg_col_of[k] >= 0) {
        T(row, neg_col_of[k]) -= a;
      } else {
        rhs -= a * lb(k);
      }
    }
    T(row, ncols) = rhs;
  };
  for (Eigen::Index i = 0; i < me; ++i) fill_row(i, A.row(i), b(i));
  for (Eigen::Index i = 0; i < mi; ++i) {
    fill_row(me + i, C.row(i), -e(i));
    T(me + i, slack0 + i) = 1.0;
  }
  for (Eigen::Index i = 0; i < m; ++i) {
    if (T(i, ncols) < 0.0) T.row(i) = -T.row(i);
    T(i, art0 + i) = 1.0;
  }

  std::vector<Eigen::Index> basis(m);
  for (Eigen::Index i = 0; i < m; ++i) basis[i] = art0 + i;

  // per-column costs: phase 1 prices the artificials, phase 2 the callers'
  // cost mapped onto the bounded single columns
  Vector col_cost = Vector::Zero(ncols);
  col_cost.tail(m).setOnes();
  Vector col_cost2;
  if (phase2_cost != nullptr) {
    col_cost2 = Vector::Zero(ncols);
    for (Eigen::Index k = 0; k < nz; ++k) {
      if (neg_col_of[k] < 0) col_cost2(col_of[k]) = (*phase2_cost)(k);
    }
  }

  Eigen::RowVectorXd red(ncols + 1);
  const auto refresh_reduced_costs = [&]() {
    for (Eigen::Index j = 0; j <= ncols; ++j) {
      double value = j < ncols ? col_cost(j) : 0.0;
      for (Eigen::Index i = 0; i < m; ++i) {
        const double basis_cost = col_cost(basis[i]);
        if (basis_cost != 0.0) value -= basis_cost * T(i, j);
      }
      red(j) = value;
    }
  };
  refresh_reduced_costs();

  Phase1Result result;
  const long max_pivots = 20000 + 200L * ncols;
  bool in_phase2 = false;
  while (result.pivots < max_pivots) {
    if (result.pivots > 0 && result.pivots % 64 == 0) refresh_reduced_costs();

    // Dantzig rule: most negative reduced cost, smallest index on ties;
    // artificials may not re-enter during phase 2
    Eigen::Index enter = -1;
    double most_negative = -1e-9;
    for (Eigen::Index j = 0; j < ncols; ++j) {
      if (in_phase2 && j >= art0) continue;
      if (red(j) < most_negative) {
        most_negative = red(j);
        enter = j;
      }
    }
    if (enter < 0) {
      if (!in_phase2 && col_cost2.size() > 0) {
        double artificial_level = 0.0;
        for (Eigen::Index i = 0; i < m; ++i) {
          if (basis[i] >= art0) artificial_level += std::max(T(i, ncols), 0.0);
        }
        if (artificial_level <= 1e-9) {
          in_phase2 = true;
          col_cost = col_cost2;
          refresh_reduced_costs();
          continue;
        }
      }
      result.converged = true;
      break;
    }

    // ratio test; among near-minimal ratios take the largest pivot, which
    // keeps the tableau well conditioned
    const double column_max = T.col(enter).cwiseAbs().maxCoeff();
    const double pivot_tol = std::max(1e-11, 1e-9 * column_max);
    double min_ratio = std::numeric_limits<double>::infinity();
    for (Eigen::Index i = 0; i < m; ++i) {
      if (T(i, enter) > pivot_tol) {
        min_ratio = std::min(min_ratio, T(i, ncols) / T(i, enter));
      }
    }
    if (!std::isfinite(min_ratio)) break;  // numerically unbounded; bail out
    Eigen::Index leave = -1;
    double best_pivot = 0.0;
    const double ratio_band = min_ratio + 1e-9 * (1.0 + std::abs(min_ratio));
    for (Eigen::Index i = 0; i < m; ++i) {
      if (T(i, enter) > pivot_tol && T(i, ncols) / T(i, enter) <= ratio_band) {
        if (T(i, enter) > best_pivot) {
          best_pivot = T(i, enter);
          leave = i;
        }
      }
    }
    if (leave < 0) break;

    const double pivot = T(leave, enter);
    T.row(leave) /= pivot;
    for (Eigen::Index i = 0; i < m; ++i) {
      if (i == leave) continue;
      const double factor = T(i, enter);
      if (factor != 0.0) {
        T.row(i) -= factor * T.row(leave);
        T(i, enter) = 0.0;
      }
    }
    const double red_factor = red(enter);
    if (red_factor != 0.0) {
      red -= red_factor * T.row(leave);
      red(enter) = 0.0;
    }
    basis[leave] = enter;
    ++result.pivots;
  }

  Vector x = Vector::Zero(ncols);
  for (Eigen::Index i = 0; i < m; ++i) x(basis[i]) = std::max(T(i, ncols), 0.0);
  result.optimum = x.tail(m).sum();
  result.z.resize(nz);
  for (Eigen::Index k = 0; k < nz; ++k) {
    if (neg_col_of[k] >= 0) {
      result.z(k) = x(col_of[k]) - x(neg_col_of[k]);
    } else {
      result.z(k) = lb(k) + x(col_of[k]);
    }
  }
  return result;
}

inline double elapsed_seconds(std::chrono::steady_clock::time_point start) {
  return std::chrono::duration<double>(std::chrono::steady_clock::now() - start)
      .count();
}

}  // namespace detail

/**
 * @brief Decide feasibility of a purely linear system by a phase-1 LP.
 *
 * Feasible iff the artificial optimum is within tol_eq and the extracted
 * certificate passes the exact verifier. Deterministic.
 */
inline SolveOutcome solve_linear_feasibility(const FeasibilitySystem& sys,
                                             const SolveOptions& opts = {}) {
  for (const auto& block : sys.log_blocks) {
    if (block.coeff.rows() > 0 && block.arg_matrix.rows() > 0) {
      throw std::invalid_argument(
          "solve_linear_feasibility: system contains log constraints");
    }
  }
  const auto start = std::chrono::steady_clock::now();
  SolveOutcome outcome;
  outcome.restarts_used = 1;
  outcome.resolved_method = Method::LinearForm;

  const detail::Phase1Result lp = detail::phase1_simplex(
      sys.eq_matrix, sys.eq_rhs, sys.lin_ineq_matrix, sys.lin_ineq_offset,
      sys.lower_bounds);
  const double violation = detail::max_violation(sys, lp.z, opts.eps_log);
  outcome.best_violation = violation;

  if (lp.converged && violation <= opts.tol_eq) {
    InclusionCertificate cert = unpack_certificate(sys, lp.z);
    CertificateCheckReport report =
        verify_certificate(sys.inner, sys.outer, cert, opts.tol_eq, opts.tol_ineq);
    if (report.pass()) {
      outcome.status = SolveStatus::Feasible;
      outcome.certificate = std::move(cert);
      outcome.report = std::move(report);
    }
  }
  outcome.wall_time_s = detail::elapsed_seconds(start);
  return outcome;
}

namespace detail {

/// Smooth lifting of a system with absolute-value log arguments: every
/// variable selected by an abs block gains a nonnegative pair (u, v) with
/// z_k = u - v, and |z_k| becomes u + v inside the arguments. The original
/// variables keep their positions, so certificates unpack unchanged.
struct LiftedSystem {
  FeasibilitySystem sys;
  std::vector<Eigen::Index> split_vars;  ///< original index per (u, v) pair
  Eigen::Index base_vars = 0;
};

inline LiftedSystem lift_abs_blocks(const FeasibilitySystem& in) {
  LiftedSystem out;
  out.base_vars = in.num_vars;
  std::vector<bool> touched(static_cast<std::size_t>(in.num_vars), false);
  for (const auto& block : in.log_blocks) {
    if (!block.abs_arg) continue;
    for (Eigen::Index j = 0; j < block.arg_matrix.rows(); ++j) {
      for (Eigen::Index k = 0; k < in.num_vars; ++k) {
        if (block.arg_matrix(j, k) != 0.0) touched[static_cast<std::size_t>(k)] = true;
      }
    }
  }
  for (Eigen::Index k = 0; k < in.num_vars; ++k) {
    if (touched[static_cast<std::size_t>(k)]) out.split_vars.push_back(k);
  }
  const Eigen::Index pairs = static_cast<Eigen::Index>(out.split_vars.size());
  const Eigen::Index total = in.num_vars + 2 * pairs;

  FeasibilitySystem& sys = out.sys;
  sys.kind = in.kind;
  sys.num_vars = total;
  sys.vars = in.vars;
  sys.inner = in.inner;
  sys.outer = in.outer;
  sys.size_report = in.size_report;

  sys.eq_matrix = Matrix::Zero(in.eq_matrix.rows() + pairs, total);
  sys.eq_matrix.topLeftCorner(in.eq_matrix.rows(), in.num_vars) = in.eq_matrix;
  sys.eq_rhs = Vector::Zero(in.eq_matrix.rows() + pairs);
  sys.eq_rhs.head(in.eq_rhs.size()) = in.eq_rhs;
  for (Eigen::Index pair = 0; pair < pairs; ++pair) {
    const Eigen::Index row = in.eq_matrix.rows() + pair;
    sys.eq_matrix(row, out.split_vars[static_cast<std::size_t>(pair)]) = 1.0;
    sys.eq_matrix(row, in.num_vars + 2 * pair) = -1.0;
    sys.eq_matrix(row, in.num_vars + 2 * pair + 1) = 1.0;
  }

  sys.lower_bounds = Vector::Constant(total, -std::numeric_limits<double>::infinity());
  sys.lower_bounds.head(in.num_vars) = in.lower_bounds;
  sys.lower_bounds.tail(2 * pairs).setZero();

  for (const auto& block : in.log_blocks) {
    LogBlock lifted;
    lifted.coeff = block.coeff;
    lifted.arg_offset = block.arg_offset;
    lifted.floor_eps = block.floor_eps;
    lifted.abs_arg = false;
    lifted.arg_matrix = Matrix::Zero(block.arg_matrix.rows(), total);
    if (block.abs_arg) {
      for (Eigen::Index pair = 0; pair < pairs; ++pair) {
        const Eigen::Index k = out.split_vars[static_cast<std::size_t>(pair)];
        for (Eigen::Index j = 0; j < block.arg_matrix.rows(); ++j) {
          const double w = block.arg_matrix(j, k);
          if (w == 0.0) continue;
          lifted.arg_matrix(j, in.num_vars + 2 * pair) = w;
          lifted.arg_matrix(j, in.num_vars + 2 * pair + 1) = w;
        }
      }
    } else {
      lifted.arg_matrix.leftCols(in.num_vars) = block.arg_matrix;
    }
    sys.log_blocks.push_back(std::move(lifted));
  }

  sys.lin_ineq_matrix = Matrix::Zero(in.lin_ineq_matrix.rows(), total);
  sys.lin_ineq_matrix.leftCols(in.num_vars) = in.lin_ineq_matrix;
  sys.lin_ineq_offset = in.lin_ineq_offset;
  return out;
}

/// Snap the lifted pairs onto the minimal split of the current base values.
inline Vector tighten_lifted(const LiftedSystem& lifted, Vector z) {
  for (std::size_t pair = 0; pair < lifted.split_vars.size(); ++pair) {
    const double value = z(lifted.split_vars[pair]);
    z(lifted.base_vars + 2 * static_cast<Eigen::Index>(pair)) = std::max(value, 0.0);
    z(lifted.base_vars + 2 * static_cast<Eigen::Index>(pair) + 1) =
        std::max(-value, 0.0);
  }
  return z;
}

struct GnState {
  Vector y;
  double merit = std::numeric_limits<double>::infinity();
};

/// Levenberg-damped Gauss-Newton descent on the squared-hinge merit of the
/// inequality rows, in nullspace coordinates. Returns the iterations spent.
inline int gauss_newton_descent(const FeasibilitySystem& sys, const Vector& z0,
                                const Matrix& N, double eps_log, int budget,
                                GnState& state) {
  const Eigen::Index k = N.cols();
  auto merit_of = [&](const Vector& y) {
    const Vector z = z0 + N * y;
    const IneqEval eval = evaluate_inequalities(sys, z, eps_log, false);
    double m = 0.0;
    for (Eigen::Index i = 0; i < eval.values.size(); ++i) {
      const double h = std::max(eval.values(i), 0.0);
      m += h * h;
    }
    return m;
  };

  state.merit = merit_of(state.y);
  double tau = 1e-3;
  int iters = 0;
  int stalled = 0;
  while (iters < budget && state.merit > 1e-22 && stalled < 8) {
    ++iters;
    const Vector z = z0 + N * state.y;
    const IneqEval eval = evaluate_inequalities(sys, z, eps_log, true);
    std::vector<Eigen::Index> active;
    for (Eigen::Index i = 0; i < eval.values.size(); ++i) {
      if (eval.values(i) > 0.0) active.push_back(i);
    }
    if (active.empty()) {
      state.merit = 0.0;
      break;
    }
    Matrix J(active.size(), k);
    Vector h(active.size());
    for (std::size_t a = 0; a < active.size(); ++a) {
      J.row(a) = eval.jacobian.row(active[a]) * N;
      h(a) = eval.values(active[a]);
    }
    const Matrix H = J.transpose() * J;
    const Vector g = J.transpose() * h;
    if (g.lpNorm<Eigen::Infinity>() < 1e-14) break;

    bool accepted = false;
    for (int attempt = 0; attempt < 16; ++attempt) {
      Matrix Hd = H;
      Hd.diagonal().array() += tau;
      const Vector dy = Hd.ldlt().solve(-g);
      if (!dy.allFinite()) {
        tau *= 4.0;
        continue;
      }
      const double candidate = merit_of(state.y + dy);
      if (candidate < state.merit) {
        state.y += dy;
        const bool tiny_gain = state.merit - candidate < 1e-16 * (1.0 + state.merit);
        state.merit = candidate;
        tau = std::max(tau / 3.0, 1e-12);
        accepted = true;
        stalled = tiny_gain ? stalled + 1 : 0;
        break;
      }
      tau *= 4.0;
    }
    if (!accepted) ++stalled;
  }
  return iters;
}

}  // namespace detail

/**
 * @brief Multi-start nonlinear feasibility search.
 *
 * Linear equalities are eliminated through a particular solution plus an
 * orthonormal nullspace basis; the remaining inequality rows are driven to
 * feasibility by damped Gauss-Newton descent on a squared-hinge merit.
 * The first restarts are deterministic (column-matched diagonal anchor,
 * minimum-norm solution, minimum-split LP vertex, argument centering), the
 * rest draw seeded Gaussian nullspace coordinates. A candidate becomes
 * Feasible only after its certificate passes the exact verifier.
 */
inline SolveOutcome solve_nonlinear_feasibility(const FeasibilitySystem& sys,
                                                const SolveOptions& opts = {}) {
  if (opts.restarts < 1) throw std::invalid_argument("solve: restarts must be >= 1");
  if (opts.tol_eq <= 0 || opts.tol_ineq <= 0 || opts.eps_log <= 0) {
    throw std::invalid_argument("solve: tolerances must be positive");
  }
  const auto start = std::chrono::steady_clock::now();
  SolveOutcome outcome;
  outcome.resolved_method =
      sys.kind == EncodingKind::AbsForm ? Method::AbsForm : Method::SplitForm;

  // nonsmooth arguments are searched through their smooth nonnegative-split
  // lifting; candidates are snapped back before the exact checks
  bool has_abs = false;
  for (const auto& block : sys.log_blocks) has_abs = has_abs || block.abs_arg;
  detail::LiftedSystem lifted;
  const FeasibilitySystem* work = &sys;
  if (has_abs) {
    lifted = detail::lift_abs_blocks(sys);
    work = &lifted.sys;
  }
  const auto snap = [&](Vector z) {
    return has_abs ? detail::tighten_lifted(lifted, std::move(z))
                   : tighten_alpha(sys, z);
  };

  const AffineSolution aff = solve_affine(work->eq_matrix, work->eq_rhs);
  if (aff.residual > opts.tol_eq) {
    // equalities are inconsistent: no certificate can exist in this encoding
    outcome.best_violation = aff.residual;
    outcome.wall_time_s = detail::elapsed_seconds(start);
    return outcome;
  }
  const Vector& z0 = aff.particular;
  const Matrix& N = aff.nullspace;
  const Eigen::Index k = N.cols();

  // deterministic start that centers every log argument near the unit bound
  const auto centered_start = [&]() {
    Eigen::Index rows = 0;
    for (const auto& block : work->log_blocks) rows += block.arg_matrix.rows();
    if (rows == 0 || k == 0) return Vector(Vector::Zero(k));
    Matrix lhs(rows, k);
    Vector rhs(rows);
    Eigen::Index at = 0;
    for (const auto& block : work->log_blocks) {
      const Eigen::Index m = block.arg_matrix.rows();
      if (m == 0) continue;
      lhs.middleRows(at, m) = block.arg_matrix * N;
      rhs.segment(at, m) =
          Vector::Constant(m, 0.9) - block.arg_matrix * z0 - block.arg_offset;
      at += m;
    }
    return Vector(lhs.completeOrthogonalDecomposition().solve(rhs));
  };

  // deterministic start at the minimum-aggregate-split vertex: minimizing the
  // sum of the nonnegative split variables by LP minimizes the log arguments
  const auto min_split_start = [&]() {
    if (work->bounded_count() == 0 || k == 0) return Vector();
    Vector cost = Vector::Zero(work->num_vars);
    for (Eigen::Index i = 0; i < work->num_vars; ++i) {
      if (std::isfinite(work->lower_bounds(i))) cost(i) = 1.0;
    }
    const detail::Phase1Result lp = detail::phase1_simplex(
        work->eq_matrix, work->eq_rhs, work->lin_ineq_matrix, work->lin_ineq_offset,
        work->lower_bounds, &cost);
    if (!lp.converged || lp.optimum > 1e-7) return Vector();
    return Vector(N.transpose() * (lp.z - z0));
  };
  const Vector lp_start = min_split_start();

  // deterministic start at the column-matched diagonal certificate: each
  // diagonal entry is the least-squares ratio of the inner column to the
  // outer one, projected onto the equality manifold. Nested scaled pairs
  // (self-inclusion included) sit exactly at a witness of this shape.
  const auto anchored_start = [&]() {
    Vector z_anchor = Vector::Zero(work->num_vars);
    const auto put_matched_diag = [&](const VarSlice& slice, const Matrix& outer_cols,
                                      const Matrix& inner_cols) {
      if (slice.size == 0) return;
      Eigen::Map<Matrix> block(z_anchor.data() + slice.offset, outer_cols.cols(),
                               inner_cols.cols());
      block.setZero();
      const Eigen::Index count = std::min(outer_cols.cols(), inner_cols.cols());
      for (Eigen::Index j = 0; j < count; ++j) {
        const double denom = outer_cols.col(j).squaredNorm();
        block(j, j) =
            denom > 0.0 ? outer_cols.col(j).dot(inner_cols.col(j)) / denom : 0.0;
      }
    };
    put_matched_diag(sys.vars.Gamma, sys.outer.G, sys.inner.G);
    put_matched_diag(sys.vars.Psi, sys.outer.F, sys.inner.F);
    if (sys.vars.Pi.size > 0) {
      Eigen::Map<Matrix> block(z_anchor.data() + sys.vars.Pi.offset,
                               sys.outer.num_constraints(),
                               sys.inner.num_constraints());
      block.setZero();
      block.diagonal().setOnes();
    }
    return Vector(N.transpose() * (snap(std::move(z_anchor)) - z0));
  };

  for (int restart = 0; restart < opts.restarts; ++restart) {
    outcome.restarts_used = restart + 1;
    std::mt19937_64 rng(opts.seed + 0x9E3779B97F4A7C15ULL *
                                        static_cast<std::uint64_t>(restart + 1));
    std::normal_distribution<double> gauss(0.0, 1.0);

    detail::GnState state;
    state.y = Vector::Zero(k);
    if (restart == 0) {
      state.y = anchored_start();
    } else if (restart == 2) {
      state.y = lp_start.size() == k ? lp_start : centered_start();
    } else if (restart == 3) {
      state.y = centered_start();
    } else if (restart > 3) {
      const double scale = 0.25 * (1 + restart % 4);
      for (Eigen::Index i = 0; i < k; ++i) state.y(i) = scale * gauss(rng);
    }
    // restart 1 keeps the minimum-norm particular solution (y = 0)

    int budget = opts.max_iter;
    detail::GnState best;
    best.y = state.y;
    for (int phase = 0; phase < 4 && budget > 0; ++phase) {
      if (phase > 0) {
        // kick out of a stalled basin, then descend again
        const double kick = 0.2 * (1.0 + state.y.norm() / std::sqrt(double(k) + 1));
        for (Eigen::Index i = 0; i < k; ++i) state.y(i) += kick * gauss(rng);
      }
      for (int round = 0; round < 3 && budget > 0; ++round) {
        budget -=
            detail::gauss_newton_descent(*work, z0, N, opts.eps_log, budget, state);
        // snap the split variables to the minimal nonnegative split; the exact
        // bounds and the smooth arguments then coincide
        const Vector z_tight = snap(Vector(z0 + N * state.y));
        state.y = N.transpose() * (z_tight - z0);
        const double merit_before = state.merit;
        detail::GnState probe;
        probe.y = state.y;
        budget -= detail::gauss_newton_descent(*work, z0, N, opts.eps_log,
                                               std::min(budget, 60), probe);
        state = probe;
        if (state.merit <= 1e-22 || state.merit >= merit_before * (1.0 - 1e-12)) {
          break;
        }
      }
      if (state.merit < best.merit) best = state;
      if (best.merit <= 1e-22) break;
      if (detail::elapsed_seconds(start) > opts.time_limit_s) break;
    }
    state = best;

    const Vector z_work = snap(Vector(z0 + N * state.y));
    const Vector z = has_abs ? Vector(z_work.head(sys.num_vars)) : z_work;
    const double violation = detail::max_violation(sys, z, opts.eps_log);
    outcome.best_violation = std::min(outcome.best_violation, violation);

    if (violation <= std::min(opts.tol_eq, opts.tol_ineq)) {
      InclusionCertificate cert = unpack_certificate(sys, z);
      CertificateCheckReport report =
          verify_certificate(sys.inner, sys.outer, cert, opts.tol_eq, opts.tol_ineq);
      if (report.pass()) {
        outcome.status = SolveStatus::Feasible;
        if (sys.kind != EncodingKind::AbsForm) {
          outcome.alpha = unpack_alpha_certificate(sys, z);
        }
        outcome.certificate = std::move(cert);
        outcome.report = std::move(report);
        break;
      }
    }
    if (detail::elapsed_seconds(start) > opts.time_limit_s) break;
  }
  outcome.wall_time_s = detail::elapsed_seconds(start);
  return outcome;
}

/**
 * @brief Inclusion test entry point: encode, solve, verify.
 *
 * Auto picks the linear encoding when both sets are constrained zonotopes
 * (or zonotopes) and the split encoding otherwise.
 */
inline SolveOutcome check_inclusion(const ConPolyZonotope& inner,
                                    const ConPolyZonotope& outer,
                                    Method method = Method::Auto,
                                    const SolveOptions& opts = {}) {
  const auto start = std::chrono::steady_clock::now();
  Method resolved = method;
  if (resolved == Method::Auto) {
    const SetKind ki = classify(inner);
    const SetKind ko = classify(outer);
    const bool linear = (ki == SetKind::CZ || ki == SetKind::Z) &&
                        (ko == SetKind::CZ || ko == SetKind::Z);
    resolved = linear ? Method::LinearForm : Method::SplitForm;
  }

  SolveOutcome outcome;
  switch (resolved) {
    case Method::AbsForm:
      outcome = solve_nonlinear_feasibility(encode_abs_form(inner, outer), opts);
      break;
    case Method::SplitForm:
      outcome = solve_nonlinear_feasibility(encode_split_form(inner, outer), opts);
      break;
    case Method::LinearForm:
      outcome = solve_linear_feasibility(encode_linear_form(inner, outer), opts);
      break;
    case Method::Auto:
      break;  // unreachable
  }
  outcome.wall_time_s = detail::elapsed_seconds(start);
  return outcome;
}

}  // namespace cpz

#endif  // CPZ_SOLVER_HPP_
