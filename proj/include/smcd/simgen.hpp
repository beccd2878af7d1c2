#pragma once

#include <string>

#include "smcd/types.hpp"

namespace smcd {

/// Random SPD covariance with a prescribed condition number, together with
/// its eigen-decomposition.
struct CovarianceSpec {
  Matrix sigma;
  Vector eigenvalues;   ///< ascending
  Matrix eigenvectors;  ///< columns match `eigenvalues`
};

/// Eigenvalues: uniform draws mapped affinely onto [1, target_cn] and then
/// scaled to average 1 (trace p). Eigenbasis: Q from the QR factorization of
/// a Gaussian matrix with column signs fixed so that diag(R) > 0.
CovarianceSpec gen_covariance_cn(Index p, double target_cn, Seed seed);

enum class OutlierKind { Point, Cluster, Random, Radial };
OutlierKind parse_outlier_kind(const std::string& name);
std::string to_string(OutlierKind kind);

struct SimDataset {
  DataMatrix x;
  BinaryMap truth;
  Vector mu_true;
  Matrix sigma_true;
  std::string protocol;  ///< e.g. "highdim(n=300,p=500,eps=0.25,l=5)"
  Seed seed = 0;
};

/// floor(eps n) with the same representation guard as subset sizes.
Index planted_count(double eps, Index n);

/// High-dimensional protocol: inliers N(0, Sigma) with cond(Sigma) = 50;
/// each outlier draws N(50 a, Sigma) with a picked uniformly among the
/// eigenvectors of the l smallest eigenvalues. Outliers occupy the last rows.
SimDataset gen_highdim(Index n, Index p, double eps, Index l, Seed seed, double target_cn = 50.0);

/// Mixing matrix with unit diagonal and 0.75 off the diagonal.
Matrix overdetermined_mixing(Index p);

/// Low-dimensional protocol: y inliers N(0, I), outliers of the given kind,
/// reported as x = G y. mu_true and sigma_true are in x space (0 and G G').
SimDataset gen_overdetermined(Index n, Index p, double eps, OutlierKind kind, double r, Seed seed);

/// Map x-space estimates back to y space: G^-1 mu and G^-1 Sigma G^-1.
std::pair<Vector, Matrix> overdetermined_back_transform(const Vector& mu_x, const Matrix& sigma_x);

/// Unit vector with zero coordinate sum, used for point outliers.
Vector zero_sum_unit_vector(Index p, Seed seed);

/// Masking settings 1-4. Settings 1-3 use n = 1000 by default and are
/// rescaled proportionally (80% / 10% / 10% or 80% / 15% / 5%) for other n;
/// setting 4 uses the high-dimensional protocol with n = 300, p = 500 unless
/// overridden.
SimDataset gen_masking_setting(int id, Seed seed, Index n = 0, Index p = 0);

}  // namespace smcd
