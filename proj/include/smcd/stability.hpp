#pragma once

#include <functional>
#include <span>
#include <string>
#include <vector>

#include "smcd/types.hpp"

namespace smcd {

/// Fraction of rows on which the two maps disagree.
double probability_distance(const BinaryMap& a, const BinaryMap& b);

/// Two-cluster clustering distance, computed as 2 p (1 - p) from the
/// probability distance p.
double clustering_distance(const BinaryMap& a, const BinaryMap& b);

/// c = 2 (h/n) ((n-h)/n): expected disagreement rate of two random h-subsets.
double correction_c(Index n, Index h);
/// c' = [C(h,2) + C(n-h,2)] / C(n,2): chance that two random rows share a label.
double correction_c_prime(Index n, Index h);

/// p / c
double corrected_probability_distance(const BinaryMap& a, const BinaryMap& b, Index h);
/// d / (2 c' (1 - c')) - 1. Equals -1 for identical maps and 0 at the
/// value expected from unrelated random subsets.
double corrected_clustering_distance(const BinaryMap& a, const BinaryMap& b, Index h);

enum class FailurePolicy { Abort, Skip };

enum class PairMethod {
  /// SpectralMCD on each resample, then projection depths of the original
  /// rows against the selected subset.
  Spectral,
  /// One-column data only: exact univariate MCD on each resample; the h
  /// original rows closest to the subset mean are inliers.
  UnivariateExact,
};

struct StabilityOptions {
  Index k = 0;  ///< random directions; 0 selects max(1000, 10 q)
  int max_iter = 100;
  unsigned workers = 1;
  FailurePolicy on_failure = FailurePolicy::Abort;
  PairMethod method = PairMethod::Spectral;
  /// Called after each bootstrap pair finishes, with (finished, total).
  /// May be invoked from worker threads, one call at a time.
  std::function<void(std::size_t, std::size_t)> progress;
};

/// A bootstrap pair that failed under FailurePolicy::Skip.
struct FailedPair {
  Index pair = 0;
  std::string message;
};

struct InstabilityCell {
  double h_fraction = 0.0;  ///< NaN when h was given as a count
  Index h = 0;
  Index q = 0;
  std::vector<double> distances;  ///< corrected clustering distance per successful pair
  double s_hat = 0.0;
  double std_err = 0.0;
  std::vector<FailedPair> failures;
};

struct InstabilityPath {
  std::vector<InstabilityCell> cells;  ///< q-major, h ascending within each q
  std::size_t argmin = 0;
  Index pairs = 0;
  Seed master_seed = 0;

  const InstabilityCell& best() const { return cells.at(argmin); }
};

/// Thrown when a bootstrap pair fails under FailurePolicy::Abort.
class PairFailure : public NumericalError {
 public:
  PairFailure(Index pair, Index h, Index q, const std::string& cause);
  Index pair() const noexcept { return pair_; }
  Index h() const noexcept { return h_; }
  Index q() const noexcept { return q_; }

 private:
  Index pair_, h_, q_;
};

/// Seed of bootstrap pair `pair` under `master_seed`.
Seed pair_seed(Seed master_seed, Index pair);

/// Both resamples of a pair, their best subsets and the corrected
/// clustering distance between the induced maps on the original rows.
double bootstrap_pair_distance(const DataMatrix& x, Index h, Index q, Seed pair_seed,
                               const StabilityOptions& options = {});

/// Mean corrected clustering distance over `pairs` bootstrap pairs.
InstabilityCell instability(const DataMatrix& x, Index h, Index q, Index pairs, Seed master_seed,
                            const StabilityOptions& options = {});

/// Instability over every (floor(frac n), q) cell. Each pair's resamples are
/// shared by all cells, the SVD is computed once per resample, and the
/// projections and self-depths once per (resample, q).
InstabilityPath grid_search(const DataMatrix& x, std::span<const double> h_fractions, std::span<const Index> q_grid,
                            Index pairs, Seed master_seed, const StabilityOptions& options = {});

/// 0.50, 0.55, ..., 0.95
std::vector<double> default_h_grid();

/// Index of the minimal s_hat among cells with a finite value; ties prefer
/// larger h, then smaller q.
std::size_t argmin_cell(const std::vector<InstabilityCell>& cells);

/// Runs fn(0) ... fn(count - 1) on up to `workers` threads.
void parallel_for(std::size_t count, unsigned workers, const std::function<void(std::size_t)>& fn);

}  // namespace smcd
