#pragma once

#include <cstdint>
#include <span>
#include <stdexcept>
#include <string>
#include <vector>

#include <Eigen/Core>

namespace smcd {

using Matrix = Eigen::MatrixXd;
using Vector = Eigen::VectorXd;
using Index = Eigen::Index;
using Seed = std::uint64_t;

class Error : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

/// Violated precondition or mismatched dimensions.
class ContractViolation : public Error {
 public:
  using Error::Error;
};

/// Malformed or unreadable input data.
class DataError : public Error {
 public:
  using Error::Error;
};

class NumericalError : public Error {
 public:
  using Error::Error;
};

/// A scatter matrix that cannot be inverted. `deficient_dims` counts the
/// eigenvalues at or below the numerical-rank tolerance.
class RankDeficientScatter : public NumericalError {
 public:
  RankDeficientScatter(Index deficient_dims, Index dim, const std::string& advice = {});
  Index deficient_dims() const noexcept { return deficient_dims_; }

 private:
  Index deficient_dims_;
};

/// Corrected stability distances are undefined when h is 0 or n.
class DegenerateCorrection : public Error {
 public:
  using Error::Error;
};

/// n x p observation matrix, rows are cases. Entries are finite, n >= 2, p >= 1.
class DataMatrix {
 public:
  explicit DataMatrix(Matrix values);

  const Matrix& values() const noexcept { return values_; }
  Index rows() const noexcept { return values_.rows(); }
  Index cols() const noexcept { return values_.cols(); }
  auto row(Index i) const { return values_.row(i); }

 private:
  Matrix values_;
};

/// Strictly increasing set of row indices.
class SubsetIndex {
 public:
  SubsetIndex() = default;
  /// Takes indices in any order; throws on duplicates or negatives.
  explicit SubsetIndex(std::vector<Index> indices);

  static SubsetIndex all(Index n);

  Index size() const noexcept { return static_cast<Index>(indices_.size()); }
  bool empty() const noexcept { return indices_.empty(); }
  bool contains(Index i) const;
  Index operator[](Index i) const { return indices_[static_cast<std::size_t>(i)]; }
  const std::vector<Index>& indices() const noexcept { return indices_; }
  auto begin() const noexcept { return indices_.begin(); }
  auto end() const noexcept { return indices_.end(); }

  /// Throws ContractViolation if any index falls outside [0, n).
  void check_bounds(Index n) const;

  friend bool operator==(const SubsetIndex&, const SubsetIndex&) = default;

 private:
  std::vector<Index> indices_;
};

/// Per-observation outlier indicator; 1 = outlier, 0 = inlier.
class BinaryMap {
 public:
  BinaryMap() = default;
  explicit BinaryMap(std::vector<std::uint8_t> labels);

  /// Rows outside `inliers` are marked 1.
  static BinaryMap complement_of(const SubsetIndex& inliers, Index n);

  Index size() const noexcept { return static_cast<Index>(labels_.size()); }
  std::uint8_t operator[](Index i) const { return labels_[static_cast<std::size_t>(i)]; }
  const std::vector<std::uint8_t>& labels() const noexcept { return labels_; }
  Index outlier_count() const;
  BinaryMap complemented() const;

  friend bool operator==(const BinaryMap&, const BinaryMap&) = default;

 private:
  std::vector<std::uint8_t> labels_;
};

/// Gathers the rows listed in `subset`.
Matrix select_rows(const Eigen::Ref<const Matrix>& x, std::span<const Index> subset);
inline Matrix select_rows(const Eigen::Ref<const Matrix>& x, const SubsetIndex& subset) {
  return select_rows(x, std::span<const Index>(subset.indices()));
}

/// Indices of the h smallest entries of `scores`, ties by ascending index.
SubsetIndex smallest_k(const Vector& scores, Index h);
/// Indices of the h largest entries of `scores`, ties by ascending index.
SubsetIndex largest_k(const Vector& scores, Index h);

/// floor(fraction * n) with a small guard against representation error
/// (0.29 * 100 must give 29, not 28).
Index subset_size_from_fraction(double fraction, Index n);

}  // namespace smcd
