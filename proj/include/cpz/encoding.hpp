#ifndef CPZ_ENCODING_HPP_
#define CPZ_ENCODING_HPP_

#include <limits>
#include <string>
#include <vector>

#include "cpz/certificate.hpp"
#include "cpz/linalg.hpp"
#include "cpz/set.hpp"

namespace cpz {

/// Contiguous block of variables inside the stacked unknown vector.
struct VarSlice {
  Eigen::Index offset = 0;
  Eigen::Index size = 0;
};

/// Locations of the certificate blocks inside z. Matrix blocks are stored
/// column-major. Absent blocks have size 0.
struct VarMap {
  VarSlice gamma;
  VarSlice Gamma;
  VarSlice Pi;
  VarSlice Psi;
  VarSlice psi;
  VarSlice alpha_gamma;
  VarSlice alpha_psi;
};

struct SizeReport {
  Eigen::Index vars = 0;
  Eigen::Index equalities = 0;
  Eigen::Index inequalities = 0;

  bool operator==(const SizeReport&) const = default;
};

/**
 * @brief One block of log-domain inequality rows
 * coeff * log(arg_matrix * z + arg_offset) <= 0.
 *
 * With abs_arg set, the argument is arg_matrix * |z| + arg_offset (entrywise
 * absolute values of the unknowns). floor_eps guards the log domain inside
 * solvers; exact verification goes through verify_certificate instead.
 */
struct LogBlock {
  Matrix coeff;       ///< rows x m
  Matrix arg_matrix;  ///< m x num_vars
  Vector arg_offset;  ///< m
  bool abs_arg = false;
  double floor_eps = 1e-12;
};

enum class EncodingKind { AbsForm, SplitForm, LinearForm };

/**
 * @brief Assembled feasibility system for one inclusion query.
 *
 * Linear equalities eq_matrix * z = eq_rhs, optional per-variable lower
 * bounds, linear inequality rows lin_ineq_matrix * z + lin_ineq_offset <= 0,
 * and log-domain blocks. The inner/outer pair is carried along so solver
 * results can be verified against the exact conditions.
 */
struct FeasibilitySystem {
  EncodingKind kind = EncodingKind::AbsForm;
  Eigen::Index num_vars = 0;
  Matrix eq_matrix;
  Vector eq_rhs;
  Vector lower_bounds;  ///< -inf where unbounded
  std::vector<LogBlock> log_blocks;
  Matrix lin_ineq_matrix;
  Vector lin_ineq_offset;
  VarMap vars;
  SizeReport size_report;

  ConPolyZonotope inner;
  ConPolyZonotope outer;

  Eigen::Index bounded_count() const {
    Eigen::Index count = 0;
    for (Eigen::Index i = 0; i < lower_bounds.size(); ++i) {
      if (std::isfinite(lower_bounds(i))) ++count;
    }
    return count;
  }
};

namespace detail {

struct EncodeContext {
  Eigen::Index d, n1, s1, p1, q1, n2, s2, p2, q2;
  Matrix pinv_e2t;  ///< s2 x n2
  Matrix pinv_r2t;  ///< s2 x q2
};

inline EncodeContext prepare_pair(const ConPolyZonotope& inner,
                                  const ConPolyZonotope& outer, bool need_rank) {
  require_valid(inner, "encode: inner");
  require_valid(outer, "encode: outer");
  if (inner.dim() != outer.dim()) {
    throw std::invalid_argument("encode: ambient dimension mismatch (inner d=" +
                                std::to_string(inner.dim()) + ", outer d=" +
                                std::to_string(outer.dim()) + ")");
  }
  EncodeContext ctx;
  ctx.d = inner.dim();
  ctx.n1 = inner.num_generators();
  ctx.s1 = inner.num_factors();
  ctx.p1 = inner.num_constraints();
  ctx.q1 = inner.num_constraint_generators();
  ctx.n2 = outer.num_generators();
  ctx.s2 = outer.num_factors();
  ctx.p2 = outer.num_constraints();
  ctx.q2 = outer.num_constraint_generators();

  const PseudoInverse pe = pseudo_inverse(Matrix(outer.E.cast<double>().transpose()));
  const PseudoInverse pr = pseudo_inverse(Matrix(outer.R.cast<double>().transpose()));
  if (need_rank) {
    if (pe.rank != ctx.s2) {
      throw std::invalid_argument(
          "encode: rank-deficient outer exponent matrix E^T (rank " +
          std::to_string(pe.rank) + " of " + std::to_string(ctx.s2) +
          "); the linear encoding applies when both sets are constrained zonotopes");
    }
    if (outer.has_constraints() && pr.rank != ctx.s2) {
      throw std::invalid_argument(
          "encode: rank-deficient outer constraint exponent matrix R^T (rank " +
          std::to_string(pr.rank) + " of " + std::to_string(ctx.s2) +
          "); the linear encoding applies when both sets are constrained zonotopes");
    }
  }
  ctx.pinv_e2t = pe.pinv;
  ctx.pinv_r2t = pr.pinv;
  return ctx;
}

/// Rows for c1 = c2 + G2 gamma, G1 = G2 Gamma, Pi F1 = F2 Psi and
/// Pi theta1 = theta2 - F2 psi. The Psi columns may alias the Gamma block
/// (the linear CZ form reuses Gamma and gamma in the constraint equations).
inline void fill_equalities(const EncodeContext& ctx, const ConPolyZonotope& inner,
                            const ConPolyZonotope& outer, const VarMap& vars,
                            bool reuse_gamma_block, Matrix& A, Vector& b) {
  Eigen::Index row = 0;
  // center
  for (Eigen::Index r = 0; r < ctx.d; ++r, ++row) {
    for (Eigen::Index k = 0; k < ctx.n2; ++k) {
      A(row, vars.gamma.offset + k) = outer.G(r, k);
    }
    b(row) = inner.c(r) - outer.c(r);
  }
  // generators, one outer-solve per inner column
  for (Eigen::Index j = 0; j < ctx.n1; ++j) {
    for (Eigen::Index r = 0; r < ctx.d; ++r, ++row) {
      for (Eigen::Index k = 0; k < ctx.n2; ++k) {
        A(row, vars.Gamma.offset + j * ctx.n2 + k) = outer.G(r, k);
      }
      b(row) = inner.G(r, j);
    }
  }
  // constraint generator map
  const Eigen::Index psi_cols = reuse_gamma_block ? ctx.n2 : ctx.q2;
  const Eigen::Index psi_off = reuse_gamma_block ? vars.Gamma.offset : vars.Psi.offset;
  for (Eigen::Index j = 0; j < ctx.q1; ++j) {
    for (Eigen::Index r = 0; r < ctx.p2; ++r, ++row) {
      for (Eigen::Index col = 0; col < ctx.p1; ++col) {
        A(row, vars.Pi.offset + col * ctx.p2 + r) += inner.F(col, j);
      }
      for (Eigen::Index k = 0; k < psi_cols; ++k) {
        A(row, psi_off + j * psi_cols + k) -= outer.F(r, k);
      }
      b(row) = 0.0;
    }
  }
  // constraint right-hand side
  const Eigen::Index psivec_off = reuse_gamma_block ? vars.gamma.offset : vars.psi.offset;
  for (Eigen::Index r = 0; r < ctx.p2; ++r, ++row) {
    for (Eigen::Index col = 0; col < ctx.p1; ++col) {
      A(row, vars.Pi.offset + col * ctx.p2 + r) += inner.theta(col);
    }
    for (Eigen::Index k = 0; k < ctx.q2; ++k) {
      A(row, psivec_off + k) += outer.F(r, k);
    }
    b(row) = outer.theta(r);
  }
}

/// Rows tying a matrix/vector pair to its nonnegative split:
/// value(i, j) - alpha(j, i) + alpha(half + j, i) = 0.
inline void fill_split_links(Eigen::Index rows, Eigen::Index cols_plus_one,
                             Eigen::Index mat_off, Eigen::Index vec_off,
                             Eigen::Index alpha_off, Eigen::Index mat_rows,
                             Matrix& A, Vector& b, Eigen::Index& row) {
  const Eigen::Index half = cols_plus_one;
  for (Eigen::Index i = 0; i < rows; ++i) {
    for (Eigen::Index j = 0; j < cols_plus_one; ++j, ++row) {
      if (j + 1 < cols_plus_one) {
        A(row, mat_off + j * mat_rows + i) = 1.0;
      } else {
        A(row, vec_off + i) = 1.0;
      }
      A(row, alpha_off + i * 2 * half + j) = -1.0;
      A(row, alpha_off + i * 2 * half + half + j) = 1.0;
      b(row) = 0.0;
    }
  }
}

}  // namespace detail

/**
 * @brief Nonsmooth encoding of the inclusion conditions.
 *
 * Equalities in z = (gamma, Gamma, Pi, Psi, psi) plus the two log-domain
 * inequality blocks with entrywise absolute values on the arguments. Meant
 * for verification and subgradient-aware solvers; the split form is the
 * default solving path.
 */
inline FeasibilitySystem encode_abs_form(const ConPolyZonotope& inner,
                                         const ConPolyZonotope& outer) {
  const auto ctx = detail::prepare_pair(inner, outer, true);
  FeasibilitySystem sys;
  sys.kind = EncodingKind::AbsForm;
  sys.inner = inner;
  sys.outer = outer;

  VarMap& v = sys.vars;
  Eigen::Index off = 0;
  v.gamma = {off, ctx.n2};
  off += v.gamma.size;
  v.Gamma = {off, ctx.n2 * ctx.n1};
  off += v.Gamma.size;
  v.Pi = {off, ctx.p2 * ctx.p1};
  off += v.Pi.size;
  v.Psi = {off, ctx.q2 * ctx.q1};
  off += v.Psi.size;
  v.psi = {off, ctx.q2};
  off += v.psi.size;
  sys.num_vars = off;

  const Eigen::Index eq_rows = ctx.d * (ctx.n1 + 1) + ctx.p2 * (ctx.q1 + 1);
  sys.eq_matrix = Matrix::Zero(eq_rows, sys.num_vars);
  sys.eq_rhs = Vector::Zero(eq_rows);
  detail::fill_equalities(ctx, inner, outer, v, false, sys.eq_matrix, sys.eq_rhs);

  sys.lower_bounds =
      Vector::Constant(sys.num_vars, -std::numeric_limits<double>::infinity());

  LogBlock gen_block;
  gen_block.coeff = ctx.pinv_e2t;
  gen_block.arg_matrix = Matrix::Zero(ctx.n2, sys.num_vars);
  gen_block.arg_offset = Vector::Zero(ctx.n2);
  gen_block.abs_arg = true;
  for (Eigen::Index i = 0; i < ctx.n2; ++i) {
    gen_block.arg_matrix(i, v.gamma.offset + i) = 1.0;
    for (Eigen::Index j = 0; j < ctx.n1; ++j) {
      gen_block.arg_matrix(i, v.Gamma.offset + j * ctx.n2 + i) = 1.0;
    }
  }
  sys.log_blocks.push_back(std::move(gen_block));

  LogBlock con_block;
  con_block.coeff = ctx.pinv_r2t;
  con_block.arg_matrix = Matrix::Zero(ctx.q2, sys.num_vars);
  con_block.arg_offset = Vector::Zero(ctx.q2);
  con_block.abs_arg = true;
  for (Eigen::Index i = 0; i < ctx.q2; ++i) {
    con_block.arg_matrix(i, v.psi.offset + i) = 1.0;
    for (Eigen::Index j = 0; j < ctx.q1; ++j) {
      con_block.arg_matrix(i, v.Psi.offset + j * ctx.q2 + i) = 1.0;
    }
  }
  sys.log_blocks.push_back(std::move(con_block));

  sys.lin_ineq_matrix.resize(0, sys.num_vars);
  sys.lin_ineq_offset.resize(0);
  sys.size_report = {sys.num_vars, eq_rows, 2 * ctx.s2};
  return sys;
}

/**
 * @brief Smooth encoding via nonnegative splits of [Gamma gamma]^T and
 * [Psi psi]^T.
 *
 * Adds the split variables with linking equalities and lower bounds; the
 * log arguments become plain column sums, which keeps every inequality
 * differentiable.
 */
inline FeasibilitySystem encode_split_form(const ConPolyZonotope& inner,
                                           const ConPolyZonotope& outer) {
  const auto ctx = detail::prepare_pair(inner, outer, true);
  FeasibilitySystem sys;
  sys.kind = EncodingKind::SplitForm;
  sys.inner = inner;
  sys.outer = outer;

  const Eigen::Index gen_half = ctx.n1 + 1;
  const Eigen::Index con_half = ctx.q1 + 1;
  VarMap& v = sys.vars;
  Eigen::Index off = 0;
  v.gamma = {off, ctx.n2};
  off += v.gamma.size;
  v.Gamma = {off, ctx.n2 * ctx.n1};
  off += v.Gamma.size;
  v.Pi = {off, ctx.p2 * ctx.p1};
  off += v.Pi.size;
  v.Psi = {off, ctx.q2 * ctx.q1};
  off += v.Psi.size;
  v.psi = {off, ctx.q2};
  off += v.psi.size;
  v.alpha_gamma = {off, 2 * gen_half * ctx.n2};
  off += v.alpha_gamma.size;
  v.alpha_psi = {off, 2 * con_half * ctx.q2};
  off += v.alpha_psi.size;
  sys.num_vars = off;

  const Eigen::Index eq_rows = (ctx.d + ctx.n2) * (ctx.n1 + 1) +
                               (ctx.p2 + ctx.q2) * (ctx.q1 + 1);
  sys.eq_matrix = Matrix::Zero(eq_rows, sys.num_vars);
  sys.eq_rhs = Vector::Zero(eq_rows);
  detail::fill_equalities(ctx, inner, outer, v, false, sys.eq_matrix, sys.eq_rhs);
  Eigen::Index row = ctx.d * (ctx.n1 + 1) + ctx.p2 * (ctx.q1 + 1);
  detail::fill_split_links(ctx.n2, gen_half, v.Gamma.offset, v.gamma.offset,
                           v.alpha_gamma.offset, ctx.n2, sys.eq_matrix, sys.eq_rhs,
                           row);
  detail::fill_split_links(ctx.q2, con_half, v.Psi.offset, v.psi.offset,
                           v.alpha_psi.offset, ctx.q2, sys.eq_matrix, sys.eq_rhs,
                           row);

  sys.lower_bounds =
      Vector::Constant(sys.num_vars, -std::numeric_limits<double>::infinity());
  sys.lower_bounds.segment(v.alpha_gamma.offset, v.alpha_gamma.size).setZero();
  sys.lower_bounds.segment(v.alpha_psi.offset, v.alpha_psi.size).setZero();

  LogBlock gen_block;
  gen_block.coeff = ctx.pinv_e2t;
  gen_block.arg_matrix = Matrix::Zero(ctx.n2, sys.num_vars);
  gen_block.arg_offset = Vector::Zero(ctx.n2);
  for (Eigen::Index i = 0; i < ctx.n2; ++i) {
    for (Eigen::Index k = 0; k < 2 * gen_half; ++k) {
      gen_block.arg_matrix(i, v.alpha_gamma.offset + i * 2 * gen_half + k) = 1.0;
    }
  }
  sys.log_blocks.push_back(std::move(gen_block));

  LogBlock con_block;
  con_block.coeff = ctx.pinv_r2t;
  con_block.arg_matrix = Matrix::Zero(ctx.q2, sys.num_vars);
  con_block.arg_offset = Vector::Zero(ctx.q2);
  for (Eigen::Index i = 0; i < ctx.q2; ++i) {
    for (Eigen::Index k = 0; k < 2 * con_half; ++k) {
      con_block.arg_matrix(i, v.alpha_psi.offset + i * 2 * con_half + k) = 1.0;
    }
  }
  sys.log_blocks.push_back(std::move(con_block));

  sys.lin_ineq_matrix.resize(0, sys.num_vars);
  sys.lin_ineq_offset.resize(0);
  sys.size_report = {sys.num_vars, eq_rows,
                     2 * (ctx.s2 + ctx.n2 * (ctx.n1 + 1) + ctx.q2 * (ctx.q1 + 1))};
  return sys;
}

/**
 * @brief Purely linear encoding for constrained zonotopes.
 *
 * Gamma and gamma are reused in the constraint equations and the unit bound
 * |gamma| + |Gamma| * 1 <= 1 is linearized with one nonnegative split.
 */
inline FeasibilitySystem encode_linear_form(const ConPolyZonotope& inner,
                                            const ConPolyZonotope& outer) {
  {
    const SetKind ki = classify(inner);
    const SetKind ko = classify(outer);
    const bool ok_i = ki == SetKind::CZ || ki == SetKind::Z;
    const bool ok_o = ko == SetKind::CZ || ko == SetKind::Z;
    if (!ok_i || !ok_o) {
      throw std::invalid_argument(
          "encode: the linear form requires constrained zonotopes (got inner " +
          std::string(to_string(ki)) + ", outer " + std::string(to_string(ko)) + ")");
    }
  }
  const auto ctx = detail::prepare_pair(inner, outer, false);
  FeasibilitySystem sys;
  sys.kind = EncodingKind::LinearForm;
  sys.inner = inner;
  sys.outer = outer;

  const Eigen::Index gen_half = ctx.n1 + 1;
  VarMap& v = sys.vars;
  Eigen::Index off = 0;
  v.gamma = {off, ctx.n2};
  off += v.gamma.size;
  v.Gamma = {off, ctx.n2 * ctx.n1};
  off += v.Gamma.size;
  v.Pi = {off, ctx.p2 * ctx.p1};
  off += v.Pi.size;
  v.alpha_gamma = {off, 2 * gen_half * ctx.n2};
  off += v.alpha_gamma.size;
  sys.num_vars = off;

  const Eigen::Index eq_rows = ctx.d * (ctx.n1 + 1) + ctx.p2 * (ctx.q1 + 1) +
                               ctx.n2 * (ctx.n1 + 1);
  sys.eq_matrix = Matrix::Zero(eq_rows, sys.num_vars);
  sys.eq_rhs = Vector::Zero(eq_rows);
  detail::fill_equalities(ctx, inner, outer, v, true, sys.eq_matrix, sys.eq_rhs);
  Eigen::Index row = ctx.d * (ctx.n1 + 1) + ctx.p2 * (ctx.q1 + 1);
  detail::fill_split_links(ctx.n2, gen_half, v.Gamma.offset, v.gamma.offset,
                           v.alpha_gamma.offset, ctx.n2, sys.eq_matrix, sys.eq_rhs,
                           row);

  sys.lower_bounds =
      Vector::Constant(sys.num_vars, -std::numeric_limits<double>::infinity());
  sys.lower_bounds.segment(v.alpha_gamma.offset, v.alpha_gamma.size).setZero();

  sys.lin_ineq_matrix = Matrix::Zero(ctx.n2, sys.num_vars);
  sys.lin_ineq_offset = Vector::Constant(ctx.n2, -1.0);
  for (Eigen::Index i = 0; i < ctx.n2; ++i) {
    for (Eigen::Index k = 0; k < 2 * gen_half; ++k) {
      sys.lin_ineq_matrix(i, v.alpha_gamma.offset + i * 2 * gen_half + k) = 1.0;
    }
  }

  sys.size_report = {sys.num_vars, eq_rows,
                     ctx.n2 + 2 * gen_half * ctx.n2};
  return sys;
}

/// Closed-form size of the nonsmooth encoding for a dimension tuple.
inline SizeReport abs_form_size(Eigen::Index d, Eigen::Index n1, Eigen::Index q1,
                                Eigen::Index p1, Eigen::Index n2, Eigen::Index s2,
                                Eigen::Index p2, Eigen::Index q2) {
  return {n2 * (n1 + 1) + p2 * p1 + q2 * (q1 + 1),
          d * (n1 + 1) + p2 * (q1 + 1), 2 * s2};
}

/// Closed-form size of the split encoding for a dimension tuple.
inline SizeReport split_form_size(Eigen::Index d, Eigen::Index n1, Eigen::Index q1,
                                  Eigen::Index p1, Eigen::Index n2, Eigen::Index s2,
                                  Eigen::Index p2, Eigen::Index q2) {
  return {3 * n2 * (n1 + 1) + p2 * p1 + 3 * q2 * (q1 + 1),
          (d + n2) * (n1 + 1) + (p2 + q2) * (q1 + 1),
          2 * (s2 + n2 * (n1 + 1) + q2 * (q1 + 1))};
}

/// Read the certificate blocks out of a solution vector.
inline InclusionCertificate unpack_certificate(const FeasibilitySystem& sys,
                                               const Vector& z) {
  const Eigen::Index n1 = sys.inner.num_generators();
  const Eigen::Index n2 = sys.outer.num_generators();
  const Eigen::Index p1 = sys.inner.num_constraints();
  const Eigen::Index p2 = sys.outer.num_constraints();
  const Eigen::Index q1 = sys.inner.num_constraint_generators();
  const Eigen::Index q2 = sys.outer.num_constraint_generators();

  const Vector gamma = z.segment(sys.vars.gamma.offset, sys.vars.gamma.size);
  const Matrix Gamma =
      Eigen::Map<const Matrix>(z.data() + sys.vars.Gamma.offset, n2, n1);
  if (sys.kind == EncodingKind::LinearForm) {
    InclusionCertificate cert =
        transport_linear_certificate(sys.inner, sys.outer, gamma, Gamma);
    return cert;
  }
  InclusionCertificate cert;
  cert.gamma = gamma;
  cert.Gamma = Gamma;
  cert.Pi = Eigen::Map<const Matrix>(z.data() + sys.vars.Pi.offset, p2, p1);
  cert.Psi = Eigen::Map<const Matrix>(z.data() + sys.vars.Psi.offset, q2, q1);
  cert.psi = z.segment(sys.vars.psi.offset, sys.vars.psi.size);
  return cert;
}

/// Read the split variables out of a solution vector (split form only).
inline AlphaCertificate unpack_alpha_certificate(const FeasibilitySystem& sys,
                                                 const Vector& z) {
  AlphaCertificate cert;
  cert.base = unpack_certificate(sys, z);
  const Eigen::Index n1 = sys.inner.num_generators();
  const Eigen::Index n2 = sys.outer.num_generators();
  const Eigen::Index q1 = sys.inner.num_constraint_generators();
  const Eigen::Index q2 = sys.outer.num_constraint_generators();
  cert.alpha_gamma = Eigen::Map<const Matrix>(z.data() + sys.vars.alpha_gamma.offset,
                                              2 * (n1 + 1), n2);
  if (sys.kind == EncodingKind::SplitForm) {
    cert.alpha_psi = Eigen::Map<const Matrix>(z.data() + sys.vars.alpha_psi.offset,
                                              2 * (q1 + 1), q2);
  } else {
    cert.alpha_psi.resize(2 * (q1 + 1), 0);
  }
  return cert;
}

/// Replace the split variables by the minimal nonnegative split of the
/// current certificate blocks. Keeps every equality satisfied and makes the
/// smooth log arguments coincide with the exact absolute-value bounds.
inline Vector tighten_alpha(const FeasibilitySystem& sys, const Vector& z) {
  if (sys.kind == EncodingKind::AbsForm) return z;
  Vector out = z;
  const Eigen::Index n1 = sys.inner.num_generators();
  const Eigen::Index n2 = sys.outer.num_generators();
  const Vector gamma = z.segment(sys.vars.gamma.offset, sys.vars.gamma.size);
  const Matrix Gamma =
      Eigen::Map<const Matrix>(z.data() + sys.vars.Gamma.offset, n2, n1);
  const Matrix alpha_g = minimal_split(Gamma, gamma);
  Eigen::Map<Matrix>(out.data() + sys.vars.alpha_gamma.offset, alpha_g.rows(),
                     alpha_g.cols()) = alpha_g;
  if (sys.kind == EncodingKind::SplitForm && sys.vars.alpha_psi.size > 0) {
    const Eigen::Index q1 = sys.inner.num_constraint_generators();
    const Eigen::Index q2 = sys.outer.num_constraint_generators();
    const Vector psi = z.segment(sys.vars.psi.offset, sys.vars.psi.size);
    const Matrix Psi =
        Eigen::Map<const Matrix>(z.data() + sys.vars.Psi.offset, q2, q1);
    const Matrix alpha_p = minimal_split(Psi, psi);
    Eigen::Map<Matrix>(out.data() + sys.vars.alpha_psi.offset, alpha_p.rows(),
                       alpha_p.cols()) = alpha_p;
  }
  return out;
}

}  // namespace cpz

#endif  // CPZ_ENCODING_HPP_
