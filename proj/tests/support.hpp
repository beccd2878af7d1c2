#pragma once

// Reference implementations used only by the tests. Each one takes the
// slow, obvious route so it can check the production code independently.

#include <algorithm>
#include <cmath>
#include <numeric>
#include <vector>

#include <Eigen/Eigenvalues>
#include <Eigen/LU>

#include "smcd/rng.hpp"
#include "smcd/types.hpp"

namespace oracle {

using smcd::Index;
using smcd::Matrix;
using smcd::Vector;

inline Vector mean(const Matrix& x, const std::vector<Index>& rows) {
  Vector m = Vector::Zero(x.cols());
  for (Index i : rows) m += x.row(i).transpose();
  return m / static_cast<double>(rows.size());
}

/// Two-pass covariance with divisor h.
inline Matrix covariance(const Matrix& x, const std::vector<Index>& rows) {
  const Vector m = mean(x, rows);
  Matrix s = Matrix::Zero(x.cols(), x.cols());
  for (Index i : rows) {
    const Vector d = x.row(i).transpose() - m;
    s += d * d.transpose();
  }
  return s / static_cast<double>(rows.size());
}

inline Matrix inverse(const Matrix& m) { return m.fullPivLu().inverse(); }

inline double log_det(const Matrix& m) {
  Eigen::SelfAdjointEigenSolver<Matrix> es(m);
  return es.eigenvalues().array().log().sum();
}

/// Clustering distance as the double sum over all ordered pairs, divided by n^2.
inline double clustering_distance_pairs(const std::vector<std::uint8_t>& a, const std::vector<std::uint8_t>& b) {
  const std::size_t n = a.size();
  double disagree = 0.0;
  for (std::size_t i = 0; i < n; ++i)
    for (std::size_t j = 0; j < n; ++j) {
      const bool same_a = a[i] == a[j];
      const bool same_b = b[i] == b[j];
      if (same_a != same_b) disagree += 1.0;
    }
  return disagree / (static_cast<double>(n) * static_cast<double>(n));
}

/// Variance-minimizing h-subset by enumerating every combination.
inline std::vector<Index> univariate_mcd_brute(const Vector& x, Index h) {
  const Index n = x.size();
  std::vector<bool> pick(static_cast<std::size_t>(n), false);
  std::fill(pick.begin(), pick.begin() + h, true);
  double best = INFINITY;
  std::vector<Index> best_rows;
  do {
    std::vector<Index> rows;
    for (Index i = 0; i < n; ++i)
      if (pick[static_cast<std::size_t>(i)]) rows.push_back(i);
    double m = 0.0;
    for (Index i : rows) m += x[i];
    m /= static_cast<double>(h);
    double v = 0.0;
    for (Index i : rows) v += (x[i] - m) * (x[i] - m);
    if (v < best) {
      best = v;
      best_rows = rows;
    }
  } while (std::prev_permutation(pick.begin(), pick.end()));
  return best_rows;
}

/// Unscaled median by full sort.
inline double median(std::vector<double> v) {
  std::sort(v.begin(), v.end());
  const std::size_t n = v.size();
  return n % 2 ? v[n / 2] : 0.5 * (v[n / 2 - 1] + v[n / 2]);
}

/// Projection depth of z against `ref` in two dimensions, scanning `steps`
/// equally spaced directions on the half circle.
inline double depth_2d_dense(const Vector& z, const Matrix& ref, int steps) {
  double worst = 0.0;
  for (int s = 0; s < steps; ++s) {
    const double t = M_PI * s / steps;
    const Vector u = (Vector(2) << std::cos(t), std::sin(t)).finished();
    std::vector<double> proj(static_cast<std::size_t>(ref.rows()));
    for (Index i = 0; i < ref.rows(); ++i) proj[static_cast<std::size_t>(i)] = ref.row(i).dot(u);
    const double med = median(proj);
    std::vector<double> dev;
    for (double p : proj) dev.push_back(std::abs(p - med));
    const double mad = median(dev);
    worst = std::max(worst, std::abs(z.dot(u) - med) / mad);
  }
  return 1.0 / (1.0 + worst);
}

/// KL-type discrepancy from the eigenvalues of Sigma^-1 Sigma_hat.
inline double kl_eigen(const Matrix& sigma_hat, const Matrix& sigma) {
  Eigen::GeneralizedSelfAdjointEigenSolver<Matrix> es(sigma_hat, sigma);
  double out = 0.0;
  for (Index i = 0; i < es.eigenvalues().size(); ++i) out += es.eigenvalues()[i] - std::log(es.eigenvalues()[i]) - 1.0;
  return out;
}

inline std::vector<std::uint8_t> random_map(smcd::Rng& rng, Index n) {
  std::vector<std::uint8_t> m(static_cast<std::size_t>(n));
  for (auto& v : m) v = static_cast<std::uint8_t>(rng.below(2));
  return m;
}

/// Random n x p matrix with a random full-rank mixing so columns are correlated.
inline Matrix correlated(smcd::Rng& rng, Index n, Index p) {
  Matrix mix = rng.normal_matrix(p, p);
  mix.diagonal().array() += 3.0;
  return rng.normal_matrix(n, p) * mix;
}

}  // namespace oracle
