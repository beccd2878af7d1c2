#pragma once

#include <optional>
#include <vector>

#include "smcd/types.hpp"

namespace smcd {

/// Location and scatter of an h-subset. The inverse and log-determinant are
/// filled in by `factorize` and then carried through rank-one updates.
struct LocationScatter {
  Vector mu;
  Matrix sigma;
  std::optional<Matrix> sigma_inv;
  std::optional<double> log_det;
  Index h = 0;

  Index dim() const noexcept { return mu.size(); }
  bool invertible() const noexcept { return sigma_inv.has_value() && log_det.has_value(); }
};

/// Mean and covariance (divisor h) of the rows in `subset`.
LocationScatter subset_estimate(const Eigen::Ref<const Matrix>& x, const SubsetIndex& subset);

/// Returns `est` with sigma_inv and log_det computed from a Cholesky factor.
/// Throws RankDeficientScatter when sigma is singular to working precision.
LocationScatter factorize(LocationScatter est);

/// Squared Mahalanobis distance (x - mu)' sigma^-1 (x - mu).
double mahalanobis_sq(const Eigen::Ref<const Vector>& x, const LocationScatter& est);
/// Squared Mahalanobis distance of every row of `x`.
Vector mahalanobis_sq_rows(const Eigen::Ref<const Matrix>& x, const LocationScatter& est);

/// One concentration step: the h rows closest to `est` in Mahalanobis
/// distance, ties by ascending row index.
SubsetIndex c_step(const Eigen::Ref<const Matrix>& z, const LocationScatter& est, Index h);

struct ConcentrationResult {
  SubsetIndex subset;
  LocationScatter estimate;
  int iterations = 0;
  bool converged = false;
  /// log det sigma of the subset entering each step, plus the final one.
  std::vector<double> log_det_path;
  /// Number of times the incremental path fell back to a dense refactorization.
  int dense_refreshes = 0;
};

inline constexpr int kDefaultMaxConcentrationSteps = 100;

/// Iterates c_step from `initial` until the subset repeats or `max_iter`
/// steps have run. Between steps the estimate is moved to the new subset by
/// rank-one updates and downdates when fewer than half the rows change.
ConcentrationResult concentrate(const Eigen::Ref<const Matrix>& z, const SubsetIndex& initial,
                                int max_iter = kDefaultMaxConcentrationSteps);

struct RankOneResult {
  LocationScatter estimate;
  /// The Sherman-Morrison denominator was below threshold and the inverse
  /// was recomputed from the updated scatter.
  bool dense_fallback = false;
};

inline constexpr double kShermanMorrisonGuard = 1e-12;

/// Adds observation y to the subset behind `est` (Welford update of mu and
/// sigma, Sherman-Morrison for the inverse, determinant lemma for log det).
RankOneResult rank_one_update(const LocationScatter& est, const Eigen::Ref<const Vector>& y);

/// Removes observation y, which must belong to the subset behind `est`.
RankOneResult rank_one_downdate(const LocationScatter& est, const Eigen::Ref<const Vector>& y);

/// Exact univariate MCD: the window of h consecutive order statistics with
/// the smallest variance. Ties go to the window starting lowest in sorted order.
SubsetIndex univariate_mcd_exact(const Eigen::Ref<const Vector>& x, Index h);

}  // namespace smcd
