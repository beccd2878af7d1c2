#pragma once

#include "smcd/types.hpp"

namespace smcd {

/// k unit-norm directions in q dimensions, one per row.
struct DirectionSet {
  Matrix directions;
  Seed seed = 0;

  Index count() const noexcept { return directions.rows(); }
  Index dim() const noexcept { return directions.cols(); }
};

/// max(1000, 10 q)
Index default_direction_count(Index q);

/// i.i.d. directions uniform on the unit sphere (normalized Gaussian draws).
DirectionSet sample_directions(Index k, Index q, Seed seed);

struct DepthVector {
  Vector values;
  Index reference_size = 0;
};

/// Per-direction median and unscaled MAD of projected reference points.
struct ProjectionScale {
  Vector median;
  Vector mad;
};

/// Sample median; averages the two central order statistics when even.
/// Reorders `values`.
double median_inplace(std::span<double> values);

/// `projected` is m x k: reference rows already multiplied by the directions.
ProjectionScale projection_scale(const Eigen::Ref<const Matrix>& projected);
/// Same, restricted to the listed rows of `projected`.
ProjectionScale projection_scale(const Eigen::Ref<const Matrix>& projected, const SubsetIndex& rows);

/// Depth 1 / (1 + O) of each projected query row, where O is the largest
/// |projection - median| / MAD over directions. A direction with MAD = 0
/// contributes 0 when the query sits on the median and infinity otherwise.
Vector depths_from_projections(const Eigen::Ref<const Matrix>& projected_query, const ProjectionScale& scale);

/// Approximate projection depth of each query row relative to `reference`.
DepthVector projection_depths(const Eigen::Ref<const Matrix>& query, const Eigen::Ref<const Matrix>& reference,
                              const DirectionSet& dirs);

/// Self-referenced depths of the rows of z.
Vector self_depths(const Eigen::Ref<const Matrix>& z, const DirectionSet& dirs);

/// The h deepest rows of z with respect to z itself, ties by ascending index.
SubsetIndex depth_rank_subset(const Eigen::Ref<const Matrix>& z, Index h, const DirectionSet& dirs);

}  // namespace smcd
