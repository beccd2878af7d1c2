#include "smcd/stability.hpp"

#include <algorithm>
#include <atomic>
#include <cmath>
#include <exception>
#include <limits>
#include <mutex>
#include <optional>
#include <thread>

#include "smcd/depth.hpp"
#include "smcd/mcd.hpp"
#include "smcd/rng.hpp"
#include "smcd/spectral.hpp"

namespace smcd {

namespace {

void check_same_size(const BinaryMap& a, const BinaryMap& b) {
  if (a.size() != b.size()) throw ContractViolation("binary maps have different lengths");
  if (a.size() == 0) throw ContractViolation("binary maps are empty");
}

// Seed-derivation tags.
constexpr std::uint64_t kPairTag = 0x70616972;      // "pair"
constexpr std::uint64_t kResampleTag = 0x72736d70;  // "rsmp"
constexpr std::uint64_t kDirectionTag = 0x64697273; // "dirs"

}  // namespace

double probability_distance(const BinaryMap& a, const BinaryMap& b) {
  check_same_size(a, b);
  Index disagree = 0;
  for (Index i = 0; i < a.size(); ++i) disagree += (a[i] != b[i]);
  return static_cast<double>(disagree) / static_cast<double>(a.size());
}

double clustering_distance(const BinaryMap& a, const BinaryMap& b) {
  const double p = probability_distance(a, b);
  return 2.0 * p * (1.0 - p);
}

double correction_c(Index n, Index h) {
  if (n < 1 || h < 0 || h > n) throw ContractViolation("correction_c: need 0 <= h <= n");
  const double nd = static_cast<double>(n);
  return 2.0 * (static_cast<double>(h) / nd) * (static_cast<double>(n - h) / nd);
}

double correction_c_prime(Index n, Index h) {
  if (n < 2 || h < 0 || h > n) throw ContractViolation("correction_c_prime: need n >= 2 and 0 <= h <= n");
  auto choose2 = [](Index m) { return 0.5 * static_cast<double>(m) * static_cast<double>(m - 1); };
  return (choose2(h) + choose2(n - h)) / choose2(n);
}

double corrected_probability_distance(const BinaryMap& a, const BinaryMap& b, Index h) {
  check_same_size(a, b);
  const Index n = a.size();
  if (h <= 0 || h >= n) throw DegenerateCorrection("corrected probability distance needs 0 < h < n");
  return probability_distance(a, b) / correction_c(n, h);
}

double corrected_clustering_distance(const BinaryMap& a, const BinaryMap& b, Index h) {
  check_same_size(a, b);
  const Index n = a.size();
  if (n < 2 || h <= 0 || h >= n) throw DegenerateCorrection("corrected clustering distance needs 0 < h < n");
  const double cp = correction_c_prime(n, h);
  if (!(cp > 0.0 && cp < 1.0)) throw DegenerateCorrection("corrected clustering distance: c' must lie in (0, 1)");
  return clustering_distance(a, b) / (2.0 * cp * (1.0 - cp)) - 1.0;
}

PairFailure::PairFailure(Index pair, Index h, Index q, const std::string& cause)
    : NumericalError("bootstrap pair " + std::to_string(pair) + " failed at (h = " + std::to_string(h) +
                     ", q = " + std::to_string(q) + "): " + cause),
      pair_(pair),
      h_(h),
      q_(q) {}

Seed pair_seed(Seed master_seed, Index pair) {
  return derive_seed(master_seed, {kPairTag, static_cast<std::uint64_t>(pair)});
}

std::vector<double> default_h_grid() {
  std::vector<double> grid;
  for (int i = 10; i <= 19; ++i) grid.push_back(static_cast<double>(i) / 20.0);
  return grid;
}

void parallel_for(std::size_t count, unsigned workers, const std::function<void(std::size_t)>& fn) {
  const std::size_t threads = std::min<std::size_t>(std::max(1u, workers), count);
  if (threads <= 1) {
    for (std::size_t i = 0; i < count; ++i) fn(i);
    return;
  }
  std::atomic<std::size_t> next{0};
  std::mutex err_mutex;
  std::exception_ptr first_error;
  std::size_t first_error_index = count;
  auto worker = [&] {
    for (;;) {
      const std::size_t i = next.fetch_add(1);
      if (i >= count) return;
      try {
        fn(i);
      } catch (...) {
        std::lock_guard lock(err_mutex);
        if (i < first_error_index) {
          first_error_index = i;
          first_error = std::current_exception();
        }
      }
    }
  };
  std::vector<std::thread> pool;
  pool.reserve(threads);
  for (std::size_t t = 0; t < threads; ++t) pool.emplace_back(worker);
  for (auto& t : pool) t.join();
  if (first_error) std::rethrow_exception(first_error);
}

namespace {

/// Outlier maps of one resample for every (q, h) cell; empty optional on failure.
struct ResampleMaps {
  std::vector<std::vector<std::optional<BinaryMap>>> maps;  // [qi][hi]
  std::vector<std::vector<std::string>> errors;
};

std::vector<Index> draw_resample(Index n, Seed seed) {
  Rng rng(seed);
  std::vector<Index> rows(static_cast<std::size_t>(n));
  for (auto& r : rows) r = static_cast<Index>(rng.below(static_cast<std::uint64_t>(n)));
  return rows;
}

ResampleMaps spectral_resample_maps(const Matrix& x, std::span<const Index> hs, std::span<const Index> qs,
                                    Seed pair, int which, const StabilityOptions& opt) {
  const Index n = x.rows();
  ResampleMaps out;
  out.maps.assign(qs.size(), std::vector<std::optional<BinaryMap>>(hs.size()));
  out.errors.assign(qs.size(), std::vector<std::string>(hs.size()));

  const auto rows = draw_resample(n, derive_seed(pair, {kResampleTag, static_cast<std::uint64_t>(which)}));
  const Matrix xb = select_rows(x, rows);
  const Index q_max = *std::max_element(qs.begin(), qs.end());

  std::optional<SpectralModel> full;
  try {
    full = fit_embedding(xb, q_max);
  } catch (const std::exception& e) {
    for (auto& row : out.errors) std::fill(row.begin(), row.end(), std::string("embedding failed: ") + e.what());
    return out;
  }

  for (std::size_t qi = 0; qi < qs.size(); ++qi) {
    const Index q = qs[qi];
    const SpectralModel model = full->truncated(q);
    const Index k = opt.k > 0 ? opt.k : default_direction_count(q);
    const DirectionSet dirs =
        sample_directions(k, q, derive_seed(pair, {kDirectionTag, static_cast<std::uint64_t>(which),
                                                   static_cast<std::uint64_t>(q)}));
    const Matrix dirs_t = dirs.directions.transpose();
    // Recycled across h: resample projections, its self-depths, and the
    // projections of the original rows through this resample's embedding.
    const Matrix proj_resample = model.scores * dirs_t;
    const Matrix proj_original = project(model, x) * dirs_t;
    const Vector self = depths_from_projections(proj_resample, projection_scale(proj_resample));

    for (std::size_t hi = 0; hi < hs.size(); ++hi) {
      const Index h = hs[hi];
      try {
        const SubsetIndex start = largest_k(self, h);
        const ConcentrationResult conc = concentrate(model.scores, start, opt.max_iter);
        const Vector depth = depths_from_projections(proj_original, projection_scale(proj_resample, conc.subset));
        out.maps[qi][hi] = BinaryMap::complement_of(largest_k(depth, h), n);
      } catch (const std::exception& e) {
        out.errors[qi][hi] = e.what();
      }
    }
  }
  return out;
}

ResampleMaps univariate_resample_maps(const Matrix& x, std::span<const Index> hs, Seed pair, int which) {
  const Index n = x.rows();
  ResampleMaps out;
  out.maps.assign(1, std::vector<std::optional<BinaryMap>>(hs.size()));
  out.errors.assign(1, std::vector<std::string>(hs.size()));

  const auto rows = draw_resample(n, derive_seed(pair, {kResampleTag, static_cast<std::uint64_t>(which)}));
  Vector xb(n);
  for (Index i = 0; i < n; ++i) xb[i] = x(rows[static_cast<std::size_t>(i)], 0);

  for (std::size_t hi = 0; hi < hs.size(); ++hi) {
    const Index h = hs[hi];
    try {
      const SubsetIndex best = univariate_mcd_exact(xb, h);
      double mean = 0.0;
      for (Index i : best) mean += xb[i];
      mean /= static_cast<double>(h);
      const Vector dist = (x.col(0).array() - mean).abs().matrix();
      out.maps[0][hi] = BinaryMap::complement_of(smallest_k(dist, h), n);
    } catch (const std::exception& e) {
      out.errors[0][hi] = e.what();
    }
  }
  return out;
}

ResampleMaps resample_maps(const Matrix& x, std::span<const Index> hs, std::span<const Index> qs, Seed pair,
                           int which, const StabilityOptions& opt) {
  if (opt.method == PairMethod::UnivariateExact) return univariate_resample_maps(x, hs, pair, which);
  return spectral_resample_maps(x, hs, qs, pair, which, opt);
}

struct PairResult {
  std::vector<std::vector<std::optional<double>>> distance;  // [qi][hi]
  std::vector<std::vector<std::string>> errors;
};

PairResult evaluate_pair(const Matrix& x, std::span<const Index> hs, std::span<const Index> qs, Seed pair,
                         const StabilityOptions& opt) {
  const ResampleMaps first = resample_maps(x, hs, qs, pair, 0, opt);
  const ResampleMaps second = resample_maps(x, hs, qs, pair, 1, opt);
  PairResult out;
  out.distance.assign(qs.size(), std::vector<std::optional<double>>(hs.size()));
  out.errors.assign(qs.size(), std::vector<std::string>(hs.size()));
  for (std::size_t qi = 0; qi < qs.size(); ++qi) {
    const std::size_t mi = opt.method == PairMethod::UnivariateExact ? 0 : qi;
    for (std::size_t hi = 0; hi < hs.size(); ++hi) {
      const auto& a = first.maps[mi][hi];
      const auto& b = second.maps[mi][hi];
      if (a && b) {
        out.distance[qi][hi] = corrected_clustering_distance(*a, *b, hs[hi]);
      } else {
        out.errors[qi][hi] = !a ? first.errors[mi][hi] : second.errors[mi][hi];
      }
    }
  }
  return out;
}

void validate_cell(const DataMatrix& x, Index h, Index q, const StabilityOptions& opt) {
  const Index n = x.rows();
  if (!(h > 0 && h < n)) {
    throw ContractViolation("instability: h = " + std::to_string(h) + " must satisfy 0 < h < n = " + std::to_string(n));
  }
  if (opt.method == PairMethod::UnivariateExact) {
    if (x.cols() != 1 || q != 1) throw ContractViolation("univariate instability needs one column and q = 1");
    if (h < 2) throw ContractViolation("univariate instability needs h >= 2");
    return;
  }
  if (q < 1 || q > std::min(n, x.cols())) throw ContractViolation("instability: q must lie in [1, min(n, p)]");
  if (!(q < h)) {
    throw ContractViolation("instability: need q < h (q = " + std::to_string(q) + ", h = " + std::to_string(h) + ")");
  }
}

InstabilityPath run_grid(const DataMatrix& x, const std::vector<Index>& hs, const std::vector<double>& fracs,
                         std::span<const Index> qs, Index pairs, Seed master_seed, const StabilityOptions& opt) {
  if (hs.empty() || qs.empty()) throw ContractViolation("grid search needs nonempty h and q grids");
  if (pairs < 1) throw ContractViolation("number of bootstrap pairs must be at least 1");
  if (opt.k < 0) throw ContractViolation("direction count k must be positive (0 = automatic)");
  for (Index q : qs)
    for (Index h : hs) validate_cell(x, h, q, opt);

  const auto total = static_cast<std::size_t>(pairs);
  std::vector<PairResult> results(total);
  // Under Abort, pairs above the lowest failed index are skipped; every pair
  // below it still runs, so the reported failure does not depend on timing.
  std::atomic<std::size_t> lowest_failed{total};
  std::mutex progress_mutex;
  std::size_t finished = 0;

  parallel_for(total, opt.workers, [&](std::size_t b) {
    if (b > lowest_failed.load()) return;
    results[b] = evaluate_pair(x.values(), hs, qs, pair_seed(master_seed, static_cast<Index>(b)), opt);
    if (opt.on_failure == FailurePolicy::Abort) {
      bool failed = false;
      for (const auto& row : results[b].errors)
        for (const auto& e : row) failed = failed || !e.empty();
      if (failed) {
        std::size_t cur = lowest_failed.load();
        while (b < cur && !lowest_failed.compare_exchange_weak(cur, b)) {
        }
      }
    }
    if (opt.progress) {
      std::lock_guard lock(progress_mutex);
      opt.progress(++finished, total);
    }
  });

  if (const std::size_t b = lowest_failed.load(); b < total) {
    const PairResult& r = results[b];
    for (std::size_t qi = 0; qi < qs.size(); ++qi)
      for (std::size_t hi = 0; hi < hs.size(); ++hi)
        if (!r.distance[qi][hi]) throw PairFailure(static_cast<Index>(b), hs[hi], qs[qi], r.errors[qi][hi]);
  }

  InstabilityPath path;
  path.pairs = pairs;
  path.master_seed = master_seed;
  for (std::size_t qi = 0; qi < qs.size(); ++qi) {
    for (std::size_t hi = 0; hi < hs.size(); ++hi) {
      InstabilityCell cell;
      cell.h = hs[hi];
      cell.q = qs[qi];
      cell.h_fraction = fracs[hi];
      for (std::size_t b = 0; b < total; ++b) {
        const PairResult& r = results[b];
        if (r.distance[qi][hi]) {
          cell.distances.push_back(*r.distance[qi][hi]);
        } else {
          cell.failures.push_back({static_cast<Index>(b), r.errors[qi][hi]});
        }
      }
      const auto m = static_cast<double>(cell.distances.size());
      if (cell.distances.empty()) {
        cell.s_hat = std::numeric_limits<double>::quiet_NaN();
        cell.std_err = std::numeric_limits<double>::quiet_NaN();
      } else {
        double sum = 0.0;
        for (double d : cell.distances) sum += d;
        cell.s_hat = sum / m;
        double ss = 0.0;
        for (double d : cell.distances) ss += (d - cell.s_hat) * (d - cell.s_hat);
        cell.std_err = cell.distances.size() > 1 ? std::sqrt(ss / (m - 1.0) / m) : 0.0;
      }
      path.cells.push_back(std::move(cell));
    }
  }
  path.argmin = argmin_cell(path.cells);
  return path;
}

}  // namespace

std::size_t argmin_cell(const std::vector<InstabilityCell>& cells) {
  std::optional<std::size_t> best;
  for (std::size_t i = 0; i < cells.size(); ++i) {
    const auto& c = cells[i];
    if (!std::isfinite(c.s_hat)) continue;
    if (!best) {
      best = i;
      continue;
    }
    const auto& b = cells[*best];
    if (c.s_hat < b.s_hat || (c.s_hat == b.s_hat && (c.h > b.h || (c.h == b.h && c.q < b.q)))) best = i;
  }
  if (!best) throw NumericalError("no grid cell produced a finite instability estimate");
  return *best;
}

double bootstrap_pair_distance(const DataMatrix& x, Index h, Index q, Seed pair, const StabilityOptions& options) {
  validate_cell(x, h, q, options);
  const Index hs[] = {h};
  const Index qs[] = {q};
  const PairResult r = evaluate_pair(x.values(), hs, qs, pair, options);
  if (!r.distance[0][0]) throw PairFailure(0, h, q, r.errors[0][0]);
  return *r.distance[0][0];
}

InstabilityCell instability(const DataMatrix& x, Index h, Index q, Index pairs, Seed master_seed,
                            const StabilityOptions& options) {
  const Index qs[] = {q};
  InstabilityPath path =
      run_grid(x, {h}, {std::numeric_limits<double>::quiet_NaN()}, qs, pairs, master_seed, options);
  return std::move(path.cells.front());
}

InstabilityPath grid_search(const DataMatrix& x, std::span<const double> h_fractions, std::span<const Index> q_grid,
                            Index pairs, Seed master_seed, const StabilityOptions& options) {
  std::vector<Index> hs;
  std::vector<double> fracs(h_fractions.begin(), h_fractions.end());
  for (double f : h_fractions) {
    if (!(f > 0.0 && f < 1.0)) throw ContractViolation("h fractions must lie in (0, 1)");
    hs.push_back(subset_size_from_fraction(f, x.rows()));
  }
  return run_grid(x, hs, fracs, q_grid, pairs, master_seed, options);
}

}  // namespace smcd
