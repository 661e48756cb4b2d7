#ifndef CPZ_CERTIFICATE_HPP_
#define CPZ_CERTIFICATE_HPP_

#include <cmath>
#include <limits>

#include "cpz/linalg.hpp"
#include "cpz/set.hpp"

namespace cpz {

/**
 * @brief Witness for the inclusion of one CPZ in another.
 *
 * The equality part rewrites the inner center and generators in terms of the
 * outer ones (gamma, Gamma) and maps the constraint blocks onto each other
 * (Pi, Psi, psi). The constraint fields are empty when both sets are
 * unconstrained.
 */
struct InclusionCertificate {
  Vector gamma;  ///< n2
  Matrix Gamma;  ///< n2 x n1
  Matrix Pi;     ///< p2 x p1
  Matrix Psi;    ///< q2 x q1
  Vector psi;    ///< q2
};

/// Identity witness for self-inclusion of a valid set.
inline InclusionCertificate identity_certificate(const ConPolyZonotope& set) {
  InclusionCertificate cert;
  const Eigen::Index n = set.num_generators();
  const Eigen::Index p = set.num_constraints();
  const Eigen::Index q = set.num_constraint_generators();
  cert.gamma = Vector::Zero(n);
  cert.Gamma = Matrix::Identity(n, n);
  cert.Pi = Matrix::Identity(p, p);
  cert.Psi = Matrix::Identity(q, q);
  cert.psi = Vector::Zero(q);
  return cert;
}

/**
 * @brief Certificate extended with the nonnegative split variables of the
 * smooth reformulation.
 *
 * Feasibility requires [Gamma gamma]^T = [I -I] alpha_gamma with
 * alpha_gamma >= 0, and likewise for [Psi psi]^T and alpha_psi.
 */
struct AlphaCertificate {
  InclusionCertificate base;
  Matrix alpha_gamma;  ///< 2(n1+1) x n2
  Matrix alpha_psi;    ///< 2(q1+1) x q2
};

/// Minimal nonnegative split of [Gamma gamma]^T: positive parts stacked on
/// negative parts, so each column sum equals |gamma_i| + |Gamma(i,:)|*1.
inline Matrix minimal_split(const Matrix& Gamma, const Vector& gamma) {
  const Eigen::Index rows = Gamma.rows();
  const Eigen::Index cols = Gamma.cols() + 1;
  Matrix alpha = Matrix::Zero(2 * cols, rows);
  for (Eigen::Index i = 0; i < rows; ++i) {
    for (Eigen::Index j = 0; j < cols; ++j) {
      const double v = j < Gamma.cols() ? Gamma(i, j) : gamma(i);
      alpha(j, i) = std::max(v, 0.0);
      alpha(cols + j, i) = std::max(-v, 0.0);
    }
  }
  return alpha;
}

/**
 * @brief Exact residuals and bounds of the inclusion conditions for one
 * certificate, evaluated without smoothing.
 *
 * Every solver result must pass this check before it may be reported
 * feasible.
 */
struct CertificateCheckReport {
  double res_center = 0.0;          ///< |c1 - c2 - G2 gamma|_inf
  double res_generators = 0.0;      ///< |G1 - G2 Gamma|_max
  double res_constraint_map = 0.0;  ///< |Pi F1 - F2 Psi|_max
  double res_constraint_rhs = 0.0;  ///< |Pi theta1 - theta2 + F2 psi|_inf

  Vector gen_monomial_bound;  ///< |gamma| + |Gamma| * 1, length n2
  Vector con_monomial_bound;  ///< |psi| + |Psi| * 1, length q2
  Vector gen_log_lhs;         ///< pinv(E2^T) * log(gen bound), length s2
  Vector con_log_lhs;         ///< pinv(R2^T) * log(con bound), length s2

  bool pass_center = false;
  bool pass_generators = false;
  bool pass_constraint_map = false;
  bool pass_constraint_rhs = false;
  bool pass_gen_ineq = false;
  bool pass_con_ineq = false;

  bool pass() const {
    return pass_center && pass_generators && pass_constraint_map &&
           pass_constraint_rhs && pass_gen_ineq && pass_con_ineq;
  }

  double max_eq_residual() const {
    return std::max(std::max(res_center, res_generators),
                    std::max(res_constraint_map, res_constraint_rhs));
  }
};

namespace detail {

/// coeff . log(values) with exact zero arguments handled sign-carefully:
/// a zero argument contributes -inf with a positive coefficient (the row
/// still satisfies <= 0) and +inf with a negative one (the row fails).
inline double log_dot(const Eigen::RowVectorXd& coeff, const Vector& values) {
  constexpr double inf = std::numeric_limits<double>::infinity();
  bool minus_inf = false;
  double finite = 0.0;
  for (Eigen::Index j = 0; j < values.size(); ++j) {
    const double c = coeff(j);
    if (c == 0.0) continue;
    const double v = values(j);
    if (v == 0.0) {
      if (c < 0.0) return inf;
      minus_inf = true;
    } else {
      finite += c * std::log(v);
    }
  }
  return minus_inf ? -inf : finite;
}

inline Vector log_product(const Matrix& coeff, const Vector& values) {
  Vector out(coeff.rows());
  for (Eigen::Index r = 0; r < coeff.rows(); ++r) {
    out(r) = log_dot(coeff.row(r), values);
  }
  return out;
}

inline double max_abs(const Matrix& m) {
  return m.size() == 0 ? 0.0 : m.cwiseAbs().maxCoeff();
}

inline double max_abs(const Vector& v) {
  return v.size() == 0 ? 0.0 : v.cwiseAbs().maxCoeff();
}

}  // namespace detail

/**
 * @brief Check a certificate against the exact inclusion conditions.
 *
 * Computes the four equality residuals, the absolute-value bounds on the
 * transported monomials and the log-domain inequality rows, and passes
 * exactly when every residual is within tol_eq and every inequality row is
 * within tol_ineq. This is the single source of truth for feasibility.
 */
inline CertificateCheckReport verify_certificate(const ConPolyZonotope& inner,
                                                 const ConPolyZonotope& outer,
                                                 const InclusionCertificate& cert,
                                                 double tol_eq = 1e-8,
                                                 double tol_ineq = 1e-8) {
  const Eigen::Index n1 = inner.num_generators();
  const Eigen::Index n2 = outer.num_generators();
  const Eigen::Index p1 = inner.num_constraints();
  const Eigen::Index p2 = outer.num_constraints();
  const Eigen::Index q1 = inner.num_constraint_generators();
  const Eigen::Index q2 = outer.num_constraint_generators();

  if (inner.dim() != outer.dim()) {
    throw std::invalid_argument("verify_certificate: ambient dimension mismatch");
  }
  if (cert.gamma.size() != n2 || cert.Gamma.rows() != n2 || cert.Gamma.cols() != n1 ||
      cert.Pi.rows() != p2 || cert.Pi.cols() != p1 || cert.Psi.rows() != q2 ||
      cert.Psi.cols() != q1 || cert.psi.size() != q2) {
    throw std::invalid_argument("verify_certificate: certificate dimension mismatch");
  }

  CertificateCheckReport report;
  report.res_center =
      detail::max_abs(Vector(inner.c - outer.c - outer.G * cert.gamma));
  report.res_generators = detail::max_abs(Matrix(inner.G - outer.G * cert.Gamma));
  if (p2 > 0) {
    report.res_constraint_map =
        detail::max_abs(Matrix(cert.Pi * inner.F - outer.F * cert.Psi));
    report.res_constraint_rhs = detail::max_abs(
        Vector(cert.Pi * inner.theta - outer.theta + outer.F * cert.psi));
  }

  report.gen_monomial_bound =
      cert.gamma.cwiseAbs() + cert.Gamma.cwiseAbs() * Vector::Ones(n1);
  report.con_monomial_bound =
      cert.psi.cwiseAbs() + cert.Psi.cwiseAbs() * Vector::Ones(q1);
  report.gen_log_lhs = detail::log_product(
      pseudo_inverse(Matrix(outer.E.cast<double>().transpose())).pinv,
      report.gen_monomial_bound);
  report.con_log_lhs = detail::log_product(
      pseudo_inverse(Matrix(outer.R.cast<double>().transpose())).pinv,
      report.con_monomial_bound);

  report.pass_center = report.res_center <= tol_eq;
  report.pass_generators = report.res_generators <= tol_eq;
  report.pass_constraint_map = report.res_constraint_map <= tol_eq;
  report.pass_constraint_rhs = report.res_constraint_rhs <= tol_eq;
  report.pass_gen_ineq =
      report.gen_log_lhs.size() == 0 || (report.gen_log_lhs.array() <= tol_ineq).all();
  report.pass_con_ineq =
      report.con_log_lhs.size() == 0 || (report.con_log_lhs.array() <= tol_ineq).all();
  return report;
}

/**
 * @brief Certificate transport for the linear (CZ) test.
 *
 * Reuses gamma and Gamma for the constraint block (Psi = Gamma, psi = gamma
 * up to the constraint generator count) and recovers Pi as the least-squares
 * solution of Pi [F1 | theta1] = [F2 Psi | theta2 - F2 psi].
 */
inline InclusionCertificate transport_linear_certificate(const ConPolyZonotope& inner,
                                                         const ConPolyZonotope& outer,
                                                         const Vector& gamma,
                                                         const Matrix& Gamma) {
  const Eigen::Index p1 = inner.num_constraints();
  const Eigen::Index p2 = outer.num_constraints();
  const Eigen::Index q1 = inner.num_constraint_generators();
  const Eigen::Index q2 = outer.num_constraint_generators();

  InclusionCertificate cert;
  cert.gamma = gamma;
  cert.Gamma = Gamma;
  cert.Psi = Gamma.topLeftCorner(q2, q1);
  cert.psi = gamma.head(q2);
  if (p1 == 0 || p2 == 0) {
    cert.Pi = Matrix::Zero(p2, p1);
    return cert;
  }
  Matrix stacked(p1, q1 + 1);
  stacked.leftCols(q1) = inner.F;
  stacked.col(q1) = inner.theta;
  Matrix rhs(p2, q1 + 1);
  rhs.leftCols(q1) = outer.F * cert.Psi;
  rhs.col(q1) = outer.theta - outer.F * cert.psi;
  cert.Pi = rhs * pseudo_inverse(stacked).pinv;
  return cert;
}

}  // namespace cpz

#endif  // CPZ_CERTIFICATE_HPP_
