#include "smcd/depth.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <vector>

#include "smcd/rng.hpp"

namespace smcd {

Index default_direction_count(Index q) { return std::max<Index>(1000, 10 * q); }

DirectionSet sample_directions(Index k, Index q, Seed seed) {
  if (k < 1 || q < 1) throw ContractViolation("sample_directions: k and q must be positive");
  Rng rng(seed);
  DirectionSet out;
  out.seed = seed;
  out.directions.resize(k, q);
  Vector draw(q);
  for (Index r = 0; r < k; ++r) {
    double norm = 0.0;
    do {
      for (Index c = 0; c < q; ++c) draw[c] = rng.normal();
      norm = draw.norm();
    } while (!(norm > 0.0));
    out.directions.row(r) = (draw / norm).transpose();
  }
  return out;
}

double median_inplace(std::span<double> values) {
  if (values.empty()) throw ContractViolation("median of an empty sample");
  const std::size_t m = values.size();
  const std::size_t mid = m / 2;
  std::nth_element(values.begin(), values.begin() + static_cast<std::ptrdiff_t>(mid), values.end());
  const double upper = values[mid];
  if (m % 2 == 1) return upper;
  const double lower = *std::max_element(values.begin(), values.begin() + static_cast<std::ptrdiff_t>(mid));
  return 0.5 * (lower + upper);
}

namespace {

template <typename RowAt>
ProjectionScale scale_impl(Index rows, Index k, RowAt value_at) {
  if (rows < 2) throw ContractViolation("projection depth needs at least 2 reference rows");
  ProjectionScale out;
  out.median.resize(k);
  out.mad.resize(k);
  std::vector<double> buf(static_cast<std::size_t>(rows));
  for (Index j = 0; j < k; ++j) {
    for (Index r = 0; r < rows; ++r) buf[static_cast<std::size_t>(r)] = value_at(r, j);
    const double med = median_inplace(buf);
    for (auto& v : buf) v = std::abs(v - med);
    out.median[j] = med;
    out.mad[j] = median_inplace(buf);
  }
  return out;
}

}  // namespace

ProjectionScale projection_scale(const Eigen::Ref<const Matrix>& projected) {
  return scale_impl(projected.rows(), projected.cols(), [&](Index r, Index j) { return projected(r, j); });
}

ProjectionScale projection_scale(const Eigen::Ref<const Matrix>& projected, const SubsetIndex& rows) {
  rows.check_bounds(projected.rows());
  const auto& idx = rows.indices();
  return scale_impl(rows.size(), projected.cols(),
                    [&](Index r, Index j) { return projected(idx[static_cast<std::size_t>(r)], j); });
}

Vector depths_from_projections(const Eigen::Ref<const Matrix>& projected_query, const ProjectionScale& scale) {
  const Index n = projected_query.rows();
  const Index k = projected_query.cols();
  if (scale.median.size() != k) throw ContractViolation("projection depth: direction count mismatch");
  constexpr double inf = std::numeric_limits<double>::infinity();

  Vector outlying = Vector::Zero(n);
  for (Index j = 0; j < k; ++j) {
    const double med = scale.median[j];
    const double mad = scale.mad[j];
    for (Index i = 0; i < n; ++i) {
      const double x = projected_query(i, j);
      const double dev = std::abs(x - med);
      double o;
      if (mad > 0.0) {
        o = dev / mad;
      } else {
        // Identical rows can project through different GEMM paths, so
        // "on the median" allows a few ulps of slack.
        o = dev <= 1e-12 * (std::abs(x) + std::abs(med)) ? 0.0 : inf;
      }
      if (o > outlying[i]) outlying[i] = o;
    }
  }
  Vector depth(n);
  for (Index i = 0; i < n; ++i) depth[i] = std::isinf(outlying[i]) ? 0.0 : 1.0 / (1.0 + outlying[i]);
  return depth;
}

DepthVector projection_depths(const Eigen::Ref<const Matrix>& query, const Eigen::Ref<const Matrix>& reference,
                              const DirectionSet& dirs) {
  if (query.cols() != reference.cols() || query.cols() != dirs.dim()) {
    throw ContractViolation("projection_depths: query, reference and directions must share a dimension");
  }
  const Matrix ref_proj = reference * dirs.directions.transpose();
  const Matrix query_proj = query * dirs.directions.transpose();
  return DepthVector{depths_from_projections(query_proj, projection_scale(ref_proj)), reference.rows()};
}

Vector self_depths(const Eigen::Ref<const Matrix>& z, const DirectionSet& dirs) {
  if (z.cols() != dirs.dim()) throw ContractViolation("self_depths: dimension mismatch with directions");
  const Matrix proj = z * dirs.directions.transpose();
  return depths_from_projections(proj, projection_scale(proj));
}

SubsetIndex depth_rank_subset(const Eigen::Ref<const Matrix>& z, Index h, const DirectionSet& dirs) {
  if (h < 1 || h > z.rows()) throw ContractViolation("depth_rank_subset: h must lie in [1, n]");
  if (h == z.rows()) return SubsetIndex::all(h);
  return largest_k(self_depths(z, dirs), h);
}

}  // namespace smcd
