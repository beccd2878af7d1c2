#pragma once

#include "smcd/depth.hpp"
#include "smcd/mcd.hpp"
#include "smcd/types.hpp"

namespace smcd {

/// Ordinary PCA of one data matrix: column means, the leading right
/// singular vectors of the centered data and the resulting scores.
struct SpectralModel {
  Vector center;            ///< column means, length p
  Matrix basis;             ///< p x q, orthonormal columns, decreasing singular value
  Vector singular_values;   ///< length q, non-increasing
  Matrix scores;            ///< n x q, centered data times basis
  bool rank_deficient = false;  ///< some retained singular value is numerically zero

  Index q() const noexcept { return basis.cols(); }
  /// The leading `q` components of this model.
  SpectralModel truncated(Index q) const;
};

/// Centers X and keeps the top q right singular vectors. Each vector is
/// signed so that its largest-magnitude entry is positive.
SpectralModel fit_embedding(const Eigen::Ref<const Matrix>& x, Index q);

/// (X - 1 center') basis
Matrix project(const SpectralModel& model, const Eigen::Ref<const Matrix>& x);

struct BestSubsetResult {
  SubsetIndex subset;
  SubsetIndex initial_subset;   ///< depth-ranked start of the concentration steps
  LocationScatter estimate;     ///< in score space
  SpectralModel model;
  BinaryMap labels;
  bool converged = false;
  int iterations = 0;
  std::vector<double> log_det_path;
};

/// Depth-initialized concentration steps on a score matrix.
BestSubsetResult best_subset_from_scores(const Eigen::Ref<const Matrix>& scores, Index h, const DirectionSet& dirs,
                                         int max_iter = kDefaultMaxConcentrationSteps);

/// SpectralMCD: embed X into q principal component scores, take the h
/// deepest rows as the starting subset, then concentrate in score space.
/// `k` = 0 selects default_direction_count(q).
BestSubsetResult spectral_mcd(const DataMatrix& x, Index h, Index q, Index k, Seed seed,
                              int max_iter = kDefaultMaxConcentrationSteps);

}  // namespace smcd
