#ifndef CPZ_SAMPLING_HPP_
#define CPZ_SAMPLING_HPP_

#include <cstdint>
#include <random>
#include <vector>

#include "cpz/set.hpp"

namespace cpz {

struct SamplePair {
  Vector point;
  LambdaPoint lambda;
};

/// Result of sample_points. May hold fewer pairs than requested when the
/// constraint set is hard to hit; that is reported, not an error.
struct SampleBatch {
  std::vector<SamplePair> pairs;
  int requested = 0;
  long attempts = 0;
};

namespace detail {

/// Damped Newton refinement of the constraint residual. Returns true when
/// the residual drops below tol_c with lambda still in the unit box.
inline bool project_to_constraints(const ConPolyZonotope& set, Vector& lambda,
                                   double tol_c, int max_iter = 50) {
  if (!set.has_constraints()) return lambda.lpNorm<Eigen::Infinity>() <= 1.0;
  Vector residual = set.F * monomials(set.R, lambda) - set.theta;
  double res_norm = residual.lpNorm<Eigen::Infinity>();
  for (int iter = 0; iter < max_iter && res_norm > tol_c; ++iter) {
    Matrix jac = polynomial_jacobian(set.F, set.R, lambda);
    Vector step = jac.completeOrthogonalDecomposition().solve(-residual);
    if (!step.allFinite()) return false;
    // step damping 1/2 while the residual grows
    double scale = 1.0;
    Vector next;
    Vector next_res;
    double next_norm = res_norm;
    for (int halving = 0; halving < 8; ++halving) {
      next = lambda + scale * step;
      next_res = set.F * monomials(set.R, next) - set.theta;
      next_norm = next_res.lpNorm<Eigen::Infinity>();
      if (next_norm < res_norm) break;
      scale *= 0.5;
    }
    if (next_norm >= res_norm) return false;  // stalled
    lambda = next;
    residual = next_res;
    res_norm = next_norm;
  }
  return res_norm <= tol_c && lambda.lpNorm<Eigen::Infinity>() <= 1.0;
}

}  // namespace detail

/**
 * @brief Draw up to `count` admissible factor assignments and their points.
 *
 * Candidates are drawn uniformly in [-1,1]^s and projected onto the
 * constraint set by damped Newton iteration; failures are discarded.
 * Deterministic for a fixed seed.
 */
inline SampleBatch sample_points(const ConPolyZonotope& set, int count, double tol_c,
                                 std::uint64_t seed) {
  if (count < 0) throw std::invalid_argument("sample_points: negative count");
  if (tol_c <= 0) throw std::invalid_argument("sample_points: tol_c must be positive");
  require_valid(set, "sample_points");

  SampleBatch batch;
  batch.requested = count;
  batch.pairs.reserve(static_cast<std::size_t>(count));
  const Eigen::Index s = set.num_factors();
  std::mt19937_64 rng(seed);
  std::uniform_real_distribution<double> unit(-1.0, 1.0);

  const long max_attempts = 64L * count + 256;
  while (static_cast<int>(batch.pairs.size()) < count && batch.attempts < max_attempts) {
    ++batch.attempts;
    Vector lambda(s);
    for (Eigen::Index k = 0; k < s; ++k) lambda(k) = unit(rng);
    if (!detail::project_to_constraints(set, lambda, tol_c)) continue;
    Evaluation eval = evaluate(set, lambda);
    batch.pairs.push_back(SamplePair{eval.point, LambdaPoint{lambda}});
  }
  return batch;
}

}  // namespace cpz

#endif  // CPZ_SAMPLING_HPP_
