#pragma once

#include <optional>

#include "smcd/mcd.hpp"
#include "smcd/types.hpp"

namespace smcd {

/// Regularized lower incomplete gamma P(a, x).
double regularized_gamma_p(double a, double x);
/// Regularized upper incomplete gamma Q(a, x) = 1 - P(a, x), accurate in the tail.
double regularized_gamma_q(double a, double x);

double chi2_cdf(double x, double df);
/// Inverse chi-square CDF, relative accuracy about 1e-12.
double chi2_quantile(double prob, double df);

struct ReweightResult {
  std::vector<std::uint8_t> weights;
  Vector mu_re;
  Matrix sigma_re;   ///< divisor sum(w) - 1
  double cutoff = 0.0;   ///< chi-square quantile at `level`
  double scale_c = 0.0;  ///< median(D^2) / chi2_{p,0.5}

  Index kept() const;
};

inline constexpr double kDefaultReweightLevel = 0.975;

/// One-step reweighting: rescale sigma by the median consistency factor,
/// keep rows whose squared distance is within the chi-square cutoff, and
/// re-estimate location and scatter from the kept rows.
ReweightResult reweight(const Eigen::Ref<const Matrix>& x, const LocationScatter& est,
                        double level = kDefaultReweightLevel);

struct FdbResult {
  BinaryMap labels;
  SubsetIndex depth_subset;
  LocationScatter subset_estimate;
  /// Absent when p >= n or the subset scatter is singular.
  std::optional<ReweightResult> reweighted;
};

/// Fast depth-based estimator: the h deepest rows in the raw space, their
/// mean and covariance, then one reweighting pass when p < n. Without the
/// reweighting pass the rows outside the depth subset are the outliers.
/// `k` = 0 selects default_direction_count(p).
FdbResult fdb(const DataMatrix& x, Index h, Index k, Seed seed, double level = kDefaultReweightLevel);

}  // namespace smcd
