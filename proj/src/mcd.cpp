#include "smcd/mcd.hpp"

#include <algorithm>
#include <cmath>
#include <numeric>
#include <string>

#include <Eigen/Cholesky>
#include <Eigen/Eigenvalues>

namespace smcd {

namespace {

constexpr double kRcondFloor = 1e-13;
constexpr double kRankTolerance = 1e-12;

void symmetrize(Matrix& m) { m = (0.5 * (m + m.transpose())).eval(); }

Index count_deficient(const Matrix& sigma) {
  if (sigma.size() == 0) return 0;
  Eigen::SelfAdjointEigenSolver<Matrix> eig(sigma, Eigen::EigenvaluesOnly);
  const Vector& ev = eig.eigenvalues();
  const double top = std::max(ev.cwiseAbs().maxCoeff(), 0.0);
  const double tol = top * kRankTolerance;
  Index deficient = 0;
  for (Index i = 0; i < ev.size(); ++i) {
    if (ev[i] <= tol) ++deficient;
  }
  return std::max<Index>(deficient, 1);
}

void check_dim(Index got, Index want, const char* what) {
  if (got != want) {
    throw ContractViolation(std::string(what) + ": dimension " + std::to_string(got) + " does not match " +
                            std::to_string(want));
  }
}

}  // namespace

LocationScatter subset_estimate(const Eigen::Ref<const Matrix>& x, const SubsetIndex& subset) {
  if (subset.empty()) throw ContractViolation("subset_estimate: empty subset");
  subset.check_bounds(x.rows());
  const Matrix rows = select_rows(x, subset);
  const double h = static_cast<double>(rows.rows());

  LocationScatter est;
  est.h = rows.rows();
  est.mu = rows.colwise().mean().transpose();
  const Matrix centered = rows.rowwise() - est.mu.transpose();
  est.sigma = (centered.transpose() * centered) / h;
  symmetrize(est.sigma);
  return est;
}

LocationScatter factorize(LocationScatter est) {
  const Index p = est.sigma.rows();
  Eigen::LLT<Matrix> llt(est.sigma);
  if (llt.info() != Eigen::Success || !(llt.rcond() > kRcondFloor)) {
    throw RankDeficientScatter(count_deficient(est.sigma), p);
  }
  est.log_det = 2.0 * llt.matrixLLT().diagonal().array().log().sum();
  Matrix inv = llt.solve(Matrix::Identity(p, p));
  symmetrize(inv);
  est.sigma_inv = std::move(inv);
  return est;
}

double mahalanobis_sq(const Eigen::Ref<const Vector>& x, const LocationScatter& est) {
  if (!est.sigma_inv) throw ContractViolation("mahalanobis_sq: estimate has no inverse; call factorize first");
  check_dim(x.size(), est.dim(), "mahalanobis_sq");
  const Vector d = x - est.mu;
  return std::max(0.0, d.dot(*est.sigma_inv * d));
}

Vector mahalanobis_sq_rows(const Eigen::Ref<const Matrix>& x, const LocationScatter& est) {
  if (!est.sigma_inv) throw ContractViolation("mahalanobis_sq_rows: estimate has no inverse; call factorize first");
  check_dim(x.cols(), est.dim(), "mahalanobis_sq_rows");
  const Matrix centered = x.rowwise() - est.mu.transpose();
  Vector d2 = (centered * *est.sigma_inv).cwiseProduct(centered).rowwise().sum();
  return d2.cwiseMax(0.0);
}

SubsetIndex c_step(const Eigen::Ref<const Matrix>& z, const LocationScatter& est, Index h) {
  if (h < 1 || h > z.rows()) throw ContractViolation("c_step: h must lie in [1, n]");
  if (h == z.rows()) return SubsetIndex::all(h);
  if (est.sigma_inv) return smallest_k(mahalanobis_sq_rows(z, est), h);
  try {
    return smallest_k(mahalanobis_sq_rows(z, factorize(est)), h);
  } catch (const RankDeficientScatter& e) {
    throw RankDeficientScatter(e.deficient_dims(), est.dim(), "reduce q or increase h");
  }
}

ConcentrationResult concentrate(const Eigen::Ref<const Matrix>& z, const SubsetIndex& initial, int max_iter) {
  if (initial.empty()) throw ContractViolation("concentrate: empty initial subset");
  if (max_iter < 1) throw ContractViolation("concentrate: max_iter must be positive");
  initial.check_bounds(z.rows());
  const Index h = initial.size();

  ConcentrationResult out;
  out.subset = initial;
  try {
    out.estimate = factorize(subset_estimate(z, initial));
  } catch (const RankDeficientScatter& e) {
    throw RankDeficientScatter(e.deficient_dims(), z.cols(), "reduce q or increase h");
  }
  out.log_det_path.push_back(*out.estimate.log_det);

  for (int it = 1; it <= max_iter; ++it) {
    SubsetIndex next = c_step(z, out.estimate, h);
    out.iterations = it;
    if (next == out.subset) {
      out.converged = true;
      return out;
    }

    std::vector<Index> added, removed;
    std::set_difference(next.begin(), next.end(), out.subset.begin(), out.subset.end(), std::back_inserter(added));
    std::set_difference(out.subset.begin(), out.subset.end(), next.begin(), next.end(), std::back_inserter(removed));

    const auto swaps = static_cast<Index>(added.size());
    try {
      if (h >= 3 && 2 * swaps < h) {
        for (Index i : added) {
          auto step = rank_one_update(out.estimate, z.row(i).transpose());
          out.dense_refreshes += step.dense_fallback;
          out.estimate = std::move(step.estimate);
        }
        for (Index i : removed) {
          auto step = rank_one_downdate(out.estimate, z.row(i).transpose());
          out.dense_refreshes += step.dense_fallback;
          out.estimate = std::move(step.estimate);
        }
      } else {
        out.estimate = factorize(subset_estimate(z, next));
      }
    } catch (const RankDeficientScatter& e) {
      throw RankDeficientScatter(e.deficient_dims(), z.cols(), "reduce q or increase h");
    }
    out.subset = std::move(next);
    out.log_det_path.push_back(*out.estimate.log_det);
  }
  return out;
}

namespace {

// Shared tail of update and downdate: the new scatter is
// alpha * sigma + beta * w w', so its inverse is
// (1/alpha) * (S - g S w w' S / (1 + g w' S w)) with g = beta / alpha, and
// log det grows by p log(alpha) + log(1 + g w' S w).
RankOneResult apply_rank_one(const LocationScatter& est, Vector mu_new, Index h_new, const Vector& w, double alpha,
                             double beta) {
  const double p = static_cast<double>(est.dim());
  const double g = beta / alpha;
  const Matrix& inv = *est.sigma_inv;

  RankOneResult out;
  out.estimate.mu = std::move(mu_new);
  out.estimate.h = h_new;
  out.estimate.sigma = alpha * est.sigma + beta * (w * w.transpose());
  symmetrize(out.estimate.sigma);

  const Vector u = inv * w;
  const double denom = 1.0 + g * w.dot(u);
  if (!(denom > kShermanMorrisonGuard)) {
    out.estimate = factorize(std::move(out.estimate));
    out.dense_fallback = true;
    return out;
  }
  Matrix inv_new = (inv - (g / denom) * (u * u.transpose())) / alpha;
  symmetrize(inv_new);
  out.estimate.sigma_inv = std::move(inv_new);
  out.estimate.log_det = *est.log_det + p * std::log(alpha) + std::log(denom);
  return out;
}

void check_incremental(const LocationScatter& est, Index y_size, const char* what) {
  if (!est.invertible()) throw ContractViolation(std::string(what) + ": estimate has no inverse; call factorize first");
  check_dim(y_size, est.dim(), what);
}

}  // namespace

RankOneResult rank_one_update(const LocationScatter& est, const Eigen::Ref<const Vector>& y) {
  check_incremental(est, y.size(), "rank_one_update");
  if (est.h < 1) throw ContractViolation("rank_one_update: empty subset");
  const double h = static_cast<double>(est.h);
  Vector mu_new = (h * est.mu + y) / (h + 1.0);
  const Vector w = y - mu_new;
  return apply_rank_one(est, std::move(mu_new), est.h + 1, w, h / (h + 1.0), 1.0 / h);
}

RankOneResult rank_one_downdate(const LocationScatter& est, const Eigen::Ref<const Vector>& y) {
  check_incremental(est, y.size(), "rank_one_downdate");
  if (est.h - 1 < 3) throw ContractViolation("rank_one_downdate: subset must keep at least 3 rows");
  const double m = static_cast<double>(est.h);
  const Vector w = y - est.mu;
  Vector mu_new = (m * est.mu - y) / (m - 1.0);
  return apply_rank_one(est, std::move(mu_new), est.h - 1, w, m / (m - 1.0), -m / ((m - 1.0) * (m - 1.0)));
}

SubsetIndex univariate_mcd_exact(const Eigen::Ref<const Vector>& x, Index h) {
  const Index n = x.size();
  if (h < 2 || h > n) throw ContractViolation("univariate_mcd_exact: need 2 <= h <= n");

  std::vector<Index> order(static_cast<std::size_t>(n));
  std::iota(order.begin(), order.end(), Index{0});
  std::stable_sort(order.begin(), order.end(), [&](Index a, Index b) { return x[a] < x[b]; });
  auto sorted = [&](Index i) { return x[order[static_cast<std::size_t>(i)]]; };

  const double hd = static_cast<double>(h);
  double mean = 0.0;
  for (Index i = 0; i < h; ++i) mean += sorted(i);
  mean /= hd;
  double ss = 0.0;
  for (Index i = 0; i < h; ++i) ss += (sorted(i) - mean) * (sorted(i) - mean);

  Index best_start = 0;
  double best_ss = ss;
  // Sliding window: drop sorted(j-1), add sorted(j+h-1).
  for (Index j = 1; j + h <= n; ++j) {
    const double out = sorted(j - 1);
    const double in = sorted(j + h - 1);
    const double mean_new = mean + (in - out) / hd;
    ss += (in - out) * (in - mean_new + out - mean);
    ss = std::max(ss, 0.0);
    mean = mean_new;
    if (ss < best_ss) {
      best_ss = ss;
      best_start = j;
    }
  }

  std::vector<Index> window(order.begin() + best_start, order.begin() + best_start + h);
  return SubsetIndex(std::move(window));
}

}  // namespace smcd
