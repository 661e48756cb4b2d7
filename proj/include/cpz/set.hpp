#ifndef CPZ_SET_HPP_
#define CPZ_SET_HPP_

#include <Eigen/Dense>

#include <stdexcept>
#include <string>
#include <vector>

namespace cpz {

using Vector = Eigen::VectorXd;
using Matrix = Eigen::MatrixXd;
using IntMatrix = Eigen::MatrixXi;

/**
 * @brief Constrained polynomial zonotope <c, G, E, F, theta, R>.
 *
 * Represents the compact set
 *
 *   { c + sum_i (prod_k lambda(k)^E(k,i)) G(:,i)  :
 *     sum_j (prod_k lambda(k)^R(k,j)) F(:,j) = theta,  ||lambda||_inf <= 1 }
 *
 * with d = dim, n = generator count, s = factor count, p = constraint count
 * and q = constraint generator count. The constraint block (F, theta, R) is
 * either jointly empty (p = q = 0) or jointly present.
 *
 * Sets are immutable values; operations return new sets.
 */
struct ConPolyZonotope {
  Vector c;      ///< center, length d
  Matrix G;      ///< generator matrix, d x n
  IntMatrix E;   ///< generator exponent matrix, s x n, entries >= 0
  Matrix F;      ///< constraint generator matrix, p x q
  Vector theta;  ///< constraint right-hand side, length p
  IntMatrix R;   ///< constraint exponent matrix, s x q, entries >= 0

  Eigen::Index dim() const { return c.size(); }
  Eigen::Index num_generators() const { return G.cols(); }
  Eigen::Index num_factors() const { return E.rows(); }
  Eigen::Index num_constraints() const { return F.rows(); }
  Eigen::Index num_constraint_generators() const { return F.cols(); }
  bool has_constraints() const { return F.rows() > 0 && F.cols() > 0; }
};

/// Factor assignment for a CPZ. Admissible when ||lambda||_inf <= 1.
struct LambdaPoint {
  Vector lambda;

  bool admissible(double tol = 0.0) const {
    return lambda.size() == 0 || lambda.lpNorm<Eigen::Infinity>() <= 1.0 + tol;
  }
};

/// Specialization hierarchy: Z and CZ have identity exponent matrices,
/// Z and PZ have no equality constraints.
enum class SetKind { CPZ, PZ, CZ, Z };

inline const char* to_string(SetKind kind) {
  switch (kind) {
    case SetKind::CPZ: return "CPZ";
    case SetKind::PZ: return "PZ";
    case SetKind::CZ: return "CZ";
    case SetKind::Z: return "Z";
  }
  return "?";
}

/// Zonotope <c, G> with linear factors and no constraints.
inline ConPolyZonotope make_zonotope(const Vector& c, const Matrix& G) {
  ConPolyZonotope set;
  set.c = c;
  set.G = G;
  set.E = IntMatrix::Identity(G.cols(), G.cols());
  set.F.resize(0, 0);
  set.theta.resize(0);
  set.R.resize(G.cols(), 0);
  return set;
}

/// Polynomial zonotope <c, G, E> without constraints.
inline ConPolyZonotope make_polynomial_zonotope(const Vector& c, const Matrix& G,
                                                const IntMatrix& E) {
  ConPolyZonotope set;
  set.c = c;
  set.G = G;
  set.E = E;
  set.F.resize(0, 0);
  set.theta.resize(0);
  set.R.resize(E.rows(), 0);
  return set;
}

/// Constrained zonotope <c, G, A, b> with linear factors.
inline ConPolyZonotope make_constrained_zonotope(const Vector& c, const Matrix& G,
                                                 const Matrix& A, const Vector& b) {
  ConPolyZonotope set;
  set.c = c;
  set.G = G;
  set.E = IntMatrix::Identity(G.cols(), G.cols());
  set.F = A;
  set.theta = b;
  set.R = IntMatrix::Identity(G.cols(), A.cols());
  return set;
}

/**
 * @brief Collect every representation invariant violation of a set.
 *
 * Valid sets return an empty list; violations are reported as data rather
 * than thrown.
 */
inline std::vector<std::string> validate(const ConPolyZonotope& set) {
  std::vector<std::string> violations;
  const Eigen::Index d = set.c.size();
  const Eigen::Index n = set.G.cols();
  const Eigen::Index s = set.E.rows();
  const Eigen::Index p = set.F.rows();
  const Eigen::Index q = set.F.cols();

  if (set.G.rows() != d) {
    violations.push_back("generator matrix row count mismatch (G has " +
                         std::to_string(set.G.rows()) + " rows, center has " +
                         std::to_string(d) + " entries)");
  }
  if (set.E.cols() != n) {
    violations.push_back("exponent matrix column count mismatch (E has " +
                         std::to_string(set.E.cols()) + " columns, G has " +
                         std::to_string(n) + ")");
  }
  if ((set.E.array() < 0).any()) {
    violations.push_back("negative exponent in E");
  }

  const bool f_present = p > 0 && q > 0;
  if ((p > 0) != (q > 0)) {
    violations.push_back("constraint block incomplete (F is " + std::to_string(p) +
                         "x" + std::to_string(q) + ")");
  }
  if (f_present) {
    if (set.theta.size() != p) {
      violations.push_back("theta length mismatch (got " +
                           std::to_string(set.theta.size()) + ", expected " +
                           std::to_string(p) + ")");
    }
    if (set.R.cols() != q) {
      violations.push_back("constraint exponent matrix column count mismatch (R has " +
                           std::to_string(set.R.cols()) + " columns, F has " +
                           std::to_string(q) + ")");
    }
    if (set.R.rows() != s) {
      violations.push_back("constraint exponent matrix row count mismatch (R has " +
                           std::to_string(set.R.rows()) + " rows, E has " +
                           std::to_string(s) + ")");
    }
    if ((set.R.array() < 0).any()) {
      violations.push_back("negative exponent in R");
    }
  } else {
    if (set.theta.size() != 0) {
      violations.push_back("theta length mismatch (got " +
                           std::to_string(set.theta.size()) + ", expected 0)");
    }
    if (set.R.cols() != 0) {
      violations.push_back("constraint block incomplete (R nonempty without F)");
    }
  }
  return violations;
}

/// Throw unless the set passes validate().
inline void require_valid(const ConPolyZonotope& set, const char* what) {
  const auto violations = validate(set);
  if (!violations.empty()) {
    std::string msg = std::string(what) + ": invalid set:";
    for (const auto& v : violations) msg += " [" + v + "]";
    throw std::invalid_argument(msg);
  }
}

/// Exact integer power by repeated multiplication; base^0 == 1 for any base.
inline double int_pow(double base, int exponent) {
  double result = 1.0;
  for (int k = 0; k < exponent; ++k) result *= base;
  return result;
}

/// Monomial vector: entry i is prod_k lambda(k)^exps(k,i).
inline Vector monomials(const IntMatrix& exps, const Vector& lambda) {
  Vector m(exps.cols());
  for (Eigen::Index i = 0; i < exps.cols(); ++i) {
    double value = 1.0;
    for (Eigen::Index k = 0; k < exps.rows(); ++k) {
      value *= int_pow(lambda(k), exps(k, i));
    }
    m(i) = value;
  }
  return m;
}

namespace detail {

/// Jacobian of lambda -> sum_i (prod_k lambda^exps(k,i)) coeffs(:,i),
/// shaped rows(coeffs) x s.
inline Matrix polynomial_jacobian(const Matrix& coeffs, const IntMatrix& exps,
                                  const Vector& lambda) {
  const Eigen::Index s = exps.rows();
  Matrix jac = Matrix::Zero(coeffs.rows(), s);
  for (Eigen::Index i = 0; i < exps.cols(); ++i) {
    for (Eigen::Index k = 0; k < s; ++k) {
      const int e = exps(k, i);
      if (e == 0) continue;
      double dmono = e * int_pow(lambda(k), e - 1);
      for (Eigen::Index k2 = 0; k2 < s; ++k2) {
        if (k2 != k) dmono *= int_pow(lambda(k2), exps(k2, i));
      }
      jac.col(k) += dmono * coeffs.col(i);
    }
  }
  return jac;
}

}  // namespace detail

struct Evaluation {
  Vector point;        ///< length d
  Vector eq_residual;  ///< length p, zero iff lambda satisfies the constraints
};

/**
 * @brief Evaluate the generator polynomial and the constraint residual.
 *
 * Does not check admissibility of lambda; the residual is
 * sum_j (prod_k lambda^R(k,j)) F(:,j) - theta.
 */
inline Evaluation evaluate(const ConPolyZonotope& set, const Vector& lambda) {
  if (lambda.size() != set.num_factors()) {
    throw std::invalid_argument("evaluate: lambda has length " +
                                std::to_string(lambda.size()) + ", expected " +
                                std::to_string(set.num_factors()));
  }
  Evaluation out;
  out.point = set.c + set.G * monomials(set.E, lambda);
  if (set.has_constraints()) {
    out.eq_residual = set.F * monomials(set.R, lambda) - set.theta;
  } else {
    out.eq_residual.resize(0);
  }
  return out;
}

inline Evaluation evaluate(const ConPolyZonotope& set, const LambdaPoint& lp) {
  return evaluate(set, lp.lambda);
}

inline bool is_identity(const IntMatrix& m) {
  if (m.rows() != m.cols()) return false;
  for (Eigen::Index i = 0; i < m.rows(); ++i) {
    for (Eigen::Index j = 0; j < m.cols(); ++j) {
      if (m(i, j) != (i == j ? 1 : 0)) return false;
    }
  }
  return true;
}

/// Most specific kind of the set: Z and CZ require identity exponent
/// matrices, Z and PZ an empty constraint block.
inline SetKind classify(const ConPolyZonotope& set) {
  const bool constrained = set.has_constraints();
  const bool e_identity = is_identity(set.E);
  if (!constrained) {
    return e_identity ? SetKind::Z : SetKind::PZ;
  }
  if (e_identity && is_identity(set.R)) return SetKind::CZ;
  return SetKind::CPZ;
}

/**
 * @brief Left matrix map M * set = <M c, M G, E, F, theta, R>.
 *
 * Exponent and constraint data are copied unchanged, so the kind of the set
 * is preserved.
 */
inline ConPolyZonotope linear_map(const Matrix& M, const ConPolyZonotope& set) {
  if (M.cols() != set.dim()) {
    throw std::invalid_argument("linear_map: matrix has " + std::to_string(M.cols()) +
                                " columns, set has dimension " +
                                std::to_string(set.dim()));
  }
  ConPolyZonotope out = set;
  out.c = M * set.c;
  out.G = M * set.G;
  return out;
}

}  // namespace cpz

#endif  // CPZ_SET_HPP_
