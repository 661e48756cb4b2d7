#ifndef CPZ_ORACLE_HPP_
#define CPZ_ORACLE_HPP_

#include <algorithm>
#include <cstdint>
#include <limits>
#include <numeric>
#include <optional>
#include <random>
#include <vector>

#include "cpz/sampling.hpp"
#include "cpz/set.hpp"

namespace cpz {

struct OracleOptions {
  int grid_per_dim = 21;      ///< seeds per factor axis, odd keeps lambda = 0 on the grid
  int refine_iters = 100;     ///< local descent iterations per seed
  double tol_c = 1e-8;        ///< constraint residual acceptance
  double outside_margin = 1e-2;  ///< separation treated as genuine exteriority
  std::uint64_t seed = 0;
};

/// Counterexample to an inclusion claim: a point of the inner set whose
/// best-found distance to the outer set exceeds the margin.
struct Witness {
  Vector point;
  LambdaPoint inner_lambda;
  double outer_distance = 0.0;
};

/**
 * @brief Membership distance search with a reusable seed grid.
 *
 * Seeds a local search from a grid over the factor box (coarsened so the
 * seed count stays below 1e6, falling back to random seeding for very many
 * factors) and refines each seed by penalized Gauss-Newton descent with an
 * escalating constraint penalty. Distances are upper bounds on the true
 * distance: zero certifies membership, a large value is evidence (never
 * proof) of non-membership.
 */
class MembershipSearcher {
 public:
  explicit MembershipSearcher(const ConPolyZonotope& set, const OracleOptions& opts = {})
      : set_(set), opts_(opts) {
    if (opts_.grid_per_dim < 2) {
      throw std::invalid_argument("oracle: grid_per_dim must be >= 2");
    }
    require_valid(set_, "oracle");
    build_seeds();
  }

  /// Best distance from `point` to the set found by refinement; stops early
  /// once the running best drops to stop_below or less.
  double distance(const Vector& point, double stop_below = 0.0) const {
    if (point.size() != set_.dim()) {
      throw std::invalid_argument("oracle: point dimension mismatch");
    }
    // rank seeds by distance of their cached evaluation plus residual penalty
    const Eigen::Index count = seeds_.cols();
    std::vector<Eigen::Index> order(static_cast<std::size_t>(count));
    std::iota(order.begin(), order.end(), 0);
    Vector scores(count);
    for (Eigen::Index i = 0; i < count; ++i) {
      scores(i) = (seed_points_.col(i) - point).norm() + seed_penalty_(i);
    }
    std::stable_sort(order.begin(), order.end(),
                     [&](Eigen::Index a, Eigen::Index b) { return scores(a) < scores(b); });

    double best = std::numeric_limits<double>::infinity();
    for (Eigen::Index idx : order) {
      if (best <= stop_below) break;
      Vector lambda = seeds_.col(idx);
      if (refine(point, lambda)) {
        best = std::min(best, (evaluate(set_, lambda).point - point).norm());
      }
    }
    return best;
  }

  const ConPolyZonotope& set() const { return set_; }

 private:
  void build_seeds() {
    const Eigen::Index s = set_.num_factors();
    constexpr double seed_cap = 1e6;
    if (s == 0) {
      seeds_.resize(0, 1);
    } else if (std::pow(2.0, static_cast<double>(s)) > seed_cap) {
      // too many factors for any grid: random seeding
      const Eigen::Index count = 100000;
      seeds_.resize(s, count);
      std::mt19937_64 rng(opts_.seed);
      std::uniform_real_distribution<double> unit(-1.0, 1.0);
      for (Eigen::Index i = 0; i < count; ++i) {
        for (Eigen::Index k = 0; k < s; ++k) seeds_(k, i) = unit(rng);
      }
    } else {
      int g = opts_.grid_per_dim;
      while (g > 2 && std::pow(static_cast<double>(g), static_cast<double>(s)) > seed_cap) {
        g -= 2;
      }
      Eigen::Index count = 1;
      for (Eigen::Index k = 0; k < s; ++k) count *= g;
      seeds_.resize(s, count);
      for (Eigen::Index i = 0; i < count; ++i) {
        Eigen::Index rest = i;
        for (Eigen::Index k = 0; k < s; ++k) {
          const Eigen::Index cell = rest % g;
          rest /= g;
          seeds_(k, i) = -1.0 + 2.0 * static_cast<double>(cell) / (g - 1);
        }
      }
    }
    seed_points_.resize(set_.dim(), seeds_.cols());
    seed_penalty_.resize(seeds_.cols());
    for (Eigen::Index i = 0; i < seeds_.cols(); ++i) {
      const Evaluation eval = evaluate(set_, Vector(seeds_.col(i)));
      seed_points_.col(i) = eval.point;
      seed_penalty_(i) = eval.eq_residual.size() > 0 ? eval.eq_residual.norm() : 0.0;
    }
  }

  /// Penalized descent on |x(lambda) - point|^2 + rho |residual|^2 with the
  /// factor box enforced by clamping. Returns true when the final residual
  /// meets tol_c.
  bool refine(const Vector& point, Vector& lambda) const {
    const bool constrained = set_.has_constraints();
    double rho = constrained ? 1e2 : 0.0;

    auto merit = [&](const Vector& lam, double penalty) {
      const Evaluation eval = evaluate(set_, lam);
      double m = (eval.point - point).squaredNorm();
      if (constrained) m += penalty * eval.eq_residual.squaredNorm();
      return m;
    };

    double current = merit(lambda, rho);
    for (int iter = 0; iter < opts_.refine_iters; ++iter) {
      const Evaluation eval = evaluate(set_, lambda);
      Matrix jac_x = detail::polynomial_jacobian(set_.G, set_.E, lambda);
      Vector grad = jac_x.transpose() * (eval.point - point);
      Matrix hess = jac_x.transpose() * jac_x;
      if (constrained) {
        Matrix jac_r = detail::polynomial_jacobian(set_.F, set_.R, lambda);
        grad += rho * jac_r.transpose() * eval.eq_residual;
        hess += rho * jac_r.transpose() * jac_r;
      }
      hess.diagonal().array() += 1e-10;
      Vector step = hess.ldlt().solve(-grad);
      if (!step.allFinite()) break;

      bool accepted = false;
      double scale = 1.0;
      for (int halving = 0; halving < 8; ++halving) {
        Vector next = (lambda + scale * step).cwiseMax(-1.0).cwiseMin(1.0);
        const double next_merit = merit(next, rho);
        if (next_merit < current) {
          const double moved = (next - lambda).lpNorm<Eigen::Infinity>();
          lambda = next;
          current = next_merit;
          accepted = moved > 1e-13;
          break;
        }
        scale *= 0.5;
      }
      if (!accepted) {
        // converged for this penalty; escalate until the residual is met
        if (constrained && rho < 1e12 &&
            evaluate(set_, lambda).eq_residual.lpNorm<Eigen::Infinity>() > opts_.tol_c) {
          rho *= 100.0;
          current = merit(lambda, rho);
          continue;
        }
        break;
      }
    }
    if (!constrained) return true;
    return evaluate(set_, lambda).eq_residual.lpNorm<Eigen::Infinity>() <= opts_.tol_c;
  }

  ConPolyZonotope set_;
  OracleOptions opts_;
  Matrix seeds_;        // s x count
  Matrix seed_points_;  // d x count
  Vector seed_penalty_;
};

/// One-shot membership distance; see MembershipSearcher.
inline double membership_distance(const Vector& point, const ConPolyZonotope& set,
                                  const OracleOptions& opts = {}) {
  return MembershipSearcher(set, opts).distance(point);
}

/**
 * @brief Sampling-based falsification of an inclusion claim.
 *
 * Draws points of the inner set and returns the first (in deterministic
 * sample order) whose membership distance to the outer set exceeds the
 * margin. Absence of a witness proves nothing.
 */
inline std::optional<Witness> falsify_inclusion(const ConPolyZonotope& inner,
                                                const ConPolyZonotope& outer,
                                                int samples,
                                                const OracleOptions& opts = {}) {
  if (inner.dim() != outer.dim()) {
    throw std::invalid_argument("falsify_inclusion: ambient dimension mismatch");
  }
  const SampleBatch batch = sample_points(inner, samples, opts.tol_c, opts.seed);
  const MembershipSearcher searcher(outer, opts);
  for (const SamplePair& pair : batch.pairs) {
    const double dist = searcher.distance(pair.point, opts.outside_margin);
    if (std::isfinite(dist) && dist > opts.outside_margin) {
      return Witness{pair.point, pair.lambda, dist};
    }
  }
  return std::nullopt;
}

}  // namespace cpz

#endif  // CPZ_ORACLE_HPP_
