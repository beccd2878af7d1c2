#include "smcd/types.hpp"

#include <algorithm>
#include <cmath>
#include <numeric>

namespace smcd {

RankDeficientScatter::RankDeficientScatter(Index deficient_dims, Index dim, const std::string& advice)
    : NumericalError("rank-deficient scatter: " + std::to_string(deficient_dims) + " of " +
                     std::to_string(dim) + " dimensions have (near-)zero variance" +
                     (advice.empty() ? std::string{} : "; " + advice)),
      deficient_dims_(deficient_dims) {}

DataMatrix::DataMatrix(Matrix values) : values_(std::move(values)) {
  if (values_.rows() < 2) throw DataError("data matrix needs at least 2 rows");
  if (values_.cols() < 1) throw DataError("data matrix needs at least 1 column");
  for (Index j = 0; j < values_.cols(); ++j) {
    for (Index i = 0; i < values_.rows(); ++i) {
      if (!std::isfinite(values_(i, j))) {
        throw DataError("non-finite value at row " + std::to_string(i) + ", column " + std::to_string(j));
      }
    }
  }
}

SubsetIndex::SubsetIndex(std::vector<Index> indices) : indices_(std::move(indices)) {
  std::sort(indices_.begin(), indices_.end());
  if (std::adjacent_find(indices_.begin(), indices_.end()) != indices_.end()) {
    throw ContractViolation("subset index contains duplicates");
  }
  if (!indices_.empty() && indices_.front() < 0) throw ContractViolation("subset index is negative");
}

SubsetIndex SubsetIndex::all(Index n) {
  std::vector<Index> idx(static_cast<std::size_t>(n));
  std::iota(idx.begin(), idx.end(), Index{0});
  return SubsetIndex(std::move(idx));
}

bool SubsetIndex::contains(Index i) const { return std::binary_search(indices_.begin(), indices_.end(), i); }

void SubsetIndex::check_bounds(Index n) const {
  if (!indices_.empty() && indices_.back() >= n) {
    throw ContractViolation("subset index " + std::to_string(indices_.back()) + " out of range for " +
                            std::to_string(n) + " rows");
  }
}

BinaryMap::BinaryMap(std::vector<std::uint8_t> labels) : labels_(std::move(labels)) {
  for (auto v : labels_) {
    if (v > 1) throw ContractViolation("binary map entries must be 0 or 1");
  }
}

BinaryMap BinaryMap::complement_of(const SubsetIndex& inliers, Index n) {
  inliers.check_bounds(n);
  std::vector<std::uint8_t> labels(static_cast<std::size_t>(n), 1);
  for (Index i : inliers) labels[static_cast<std::size_t>(i)] = 0;
  return BinaryMap(std::move(labels));
}

Index BinaryMap::outlier_count() const {
  return static_cast<Index>(std::count(labels_.begin(), labels_.end(), std::uint8_t{1}));
}

BinaryMap BinaryMap::complemented() const {
  std::vector<std::uint8_t> flipped(labels_.size());
  std::transform(labels_.begin(), labels_.end(), flipped.begin(), [](std::uint8_t v) { return std::uint8_t(1 - v); });
  return BinaryMap(std::move(flipped));
}

Matrix select_rows(const Eigen::Ref<const Matrix>& x, std::span<const Index> subset) {
  Matrix out(static_cast<Index>(subset.size()), x.cols());
  for (std::size_t r = 0; r < subset.size(); ++r) out.row(static_cast<Index>(r)) = x.row(subset[r]);
  return out;
}

namespace {

template <typename Less>
SubsetIndex select_k(const Vector& scores, Index h, Less less) {
  const Index n = scores.size();
  if (h < 0 || h > n) throw ContractViolation("subset size " + std::to_string(h) + " outside [0, " + std::to_string(n) + "]");
  std::vector<Index> order(static_cast<std::size_t>(n));
  std::iota(order.begin(), order.end(), Index{0});
  // (score, index) is a strict total order, so the selected set is unique.
  auto cmp = [&](Index a, Index b) {
    if (less(scores[a], scores[b])) return true;
    if (less(scores[b], scores[a])) return false;
    return a < b;
  };
  if (h < n) std::nth_element(order.begin(), order.begin() + h, order.end(), cmp);
  order.resize(static_cast<std::size_t>(h));
  return SubsetIndex(std::move(order));
}

}  // namespace

SubsetIndex smallest_k(const Vector& scores, Index h) { return select_k(scores, h, std::less<double>{}); }

SubsetIndex largest_k(const Vector& scores, Index h) { return select_k(scores, h, std::greater<double>{}); }

Index subset_size_from_fraction(double fraction, Index n) {
  if (!(fraction > 0.0) || fraction > 1.0) throw ContractViolation("subset fraction must lie in (0, 1]");
  return static_cast<Index>(std::floor(fraction * static_cast<double>(n) + 1e-9));
}

}  // namespace smcd
