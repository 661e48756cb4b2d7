#ifndef CPZ_LINALG_HPP_
#define CPZ_LINALG_HPP_

#include <Eigen/Dense>
#include <Eigen/SVD>

#include "cpz/set.hpp"

namespace cpz {

struct PseudoInverse {
  Matrix pinv;
  Eigen::Index rank = 0;
};

/**
 * @brief Moore-Penrose pseudo-inverse via SVD.
 *
 * Singular values below rel_tol * sigma_max are treated as zero. Zero and
 * zero-sized matrices yield a zero pseudo-inverse of transposed shape with
 * rank 0.
 */
inline PseudoInverse pseudo_inverse(const Matrix& M, double rel_tol = 1e-10) {
  PseudoInverse out;
  out.pinv = Matrix::Zero(M.cols(), M.rows());
  if (M.rows() == 0 || M.cols() == 0) return out;

  Eigen::JacobiSVD<Matrix> svd(M, Eigen::ComputeThinU | Eigen::ComputeThinV);
  const Vector& sigma = svd.singularValues();
  const double cutoff = rel_tol * sigma(0);
  Vector inv_sigma = Vector::Zero(sigma.size());
  for (Eigen::Index i = 0; i < sigma.size(); ++i) {
    if (sigma(i) > cutoff && sigma(i) > 0.0) {
      inv_sigma(i) = 1.0 / sigma(i);
      ++out.rank;
    }
  }
  out.pinv = svd.matrixV() * inv_sigma.asDiagonal() * svd.matrixU().transpose();
  return out;
}

/// True when rank(M) == min(rows, cols).
inline bool has_full_rank(const PseudoInverse& p, const Matrix& M) {
  return p.rank == std::min(M.rows(), M.cols());
}

/**
 * @brief Solution set of A z = b described as particular + nullspace.
 *
 * particular is the minimum-norm least-squares solution; nullspace columns
 * are an orthonormal basis of ker(A). residual is ||A particular - b||_inf
 * and is positive when the system is inconsistent.
 */
struct AffineSolution {
  Vector particular;
  Matrix nullspace;
  double residual = 0.0;
};

inline AffineSolution solve_affine(const Matrix& A, const Vector& b,
                                   double rel_tol = 1e-12) {
  AffineSolution out;
  const Eigen::Index nvars = A.cols();
  if (A.rows() == 0) {
    out.particular = Vector::Zero(nvars);
    out.nullspace = Matrix::Identity(nvars, nvars);
    return out;
  }
  if (nvars == 0) {
    out.particular.resize(0);
    out.nullspace.resize(0, 0);
    out.residual = b.size() > 0 ? b.lpNorm<Eigen::Infinity>() : 0.0;
    return out;
  }

  Eigen::JacobiSVD<Matrix> svd(A, Eigen::ComputeFullU | Eigen::ComputeFullV);
  const Vector& sigma = svd.singularValues();
  const double cutoff = sigma.size() > 0 ? rel_tol * sigma(0) : 0.0;
  Eigen::Index rank = 0;
  for (Eigen::Index i = 0; i < sigma.size(); ++i) {
    if (sigma(i) > cutoff && sigma(i) > 0.0) ++rank;
  }

  Vector coeffs = svd.matrixU().transpose() * b;
  Vector scaled = Vector::Zero(nvars);
  for (Eigen::Index i = 0; i < rank; ++i) scaled(i) = coeffs(i) / sigma(i);
  out.particular = svd.matrixV() * scaled;
  out.nullspace = svd.matrixV().rightCols(nvars - rank);
  if (b.size() > 0) {
    out.residual = (A * out.particular - b).lpNorm<Eigen::Infinity>();
  }
  return out;
}

}  // namespace cpz

#endif  // CPZ_LINALG_HPP_
