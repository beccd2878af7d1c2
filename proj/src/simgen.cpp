#include "smcd/simgen.hpp"

#include <algorithm>
#include <cmath>
#include <sstream>

#include <Eigen/Cholesky>
#include <Eigen/QR>

#include "smcd/rng.hpp"

namespace smcd {

namespace {

constexpr std::uint64_t kCovarianceStream = 1;
constexpr std::uint64_t kDataStream = 2;
constexpr std::uint64_t kDirectionStream = 3;

Matrix symmetric(const Matrix& m) { return 0.5 * (m + m.transpose()); }

BinaryMap tail_labels(Index n, Index outliers) {
  std::vector<std::uint8_t> labels(static_cast<std::size_t>(n), 0);
  std::fill(labels.end() - outliers, labels.end(), std::uint8_t{1});
  return BinaryMap(std::move(labels));
}

}  // namespace

Index planted_count(double eps, Index n) {
  if (!(eps >= 0.0 && eps < 1.0)) throw ContractViolation("contamination fraction must lie in [0, 1)");
  return static_cast<Index>(std::floor(eps * static_cast<double>(n) + 1e-9));
}

CovarianceSpec gen_covariance_cn(Index p, double target_cn, Seed seed) {
  if (p < 2) throw ContractViolation("gen_covariance_cn: p must be at least 2");
  if (!(target_cn > 1.0)) throw ContractViolation("gen_covariance_cn: target condition number must exceed 1");
  Rng rng(seed);

  Vector u(p);
  for (Index i = 0; i < p; ++i) u[i] = rng.uniform();
  std::sort(u.data(), u.data() + p);
  Vector lambda(p);
  const double span = u[p - 1] - u[0];
  for (Index i = 0; i < p; ++i) {
    const double t = span > 0.0 ? (u[i] - u[0]) / span : static_cast<double>(i) / static_cast<double>(p - 1);
    lambda[i] = 1.0 + (target_cn - 1.0) * t;
  }
  lambda[0] = 1.0;
  lambda[p - 1] = target_cn;
  lambda *= static_cast<double>(p) / lambda.sum();

  const Matrix gauss = rng.normal_matrix(p, p);
  Eigen::HouseholderQR<Matrix> qr(gauss);
  Matrix q = qr.householderQ() * Matrix::Identity(p, p);
  const Matrix& r = qr.matrixQR();
  for (Index j = 0; j < p; ++j)
    if (r(j, j) < 0.0) q.col(j) *= -1.0;

  CovarianceSpec out;
  out.sigma = symmetric(q * lambda.asDiagonal() * q.transpose());
  out.eigenvalues = std::move(lambda);
  out.eigenvectors = std::move(q);
  return out;
}

OutlierKind parse_outlier_kind(const std::string& name) {
  if (name == "point") return OutlierKind::Point;
  if (name == "cluster") return OutlierKind::Cluster;
  if (name == "random") return OutlierKind::Random;
  if (name == "radial") return OutlierKind::Radial;
  throw ContractViolation("unknown outlier kind '" + name + "' (expected point, cluster, random or radial)");
}

std::string to_string(OutlierKind kind) {
  switch (kind) {
    case OutlierKind::Point: return "point";
    case OutlierKind::Cluster: return "cluster";
    case OutlierKind::Random: return "random";
    case OutlierKind::Radial: return "radial";
  }
  return "unknown";
}

SimDataset gen_highdim(Index n, Index p, double eps, Index l, Seed seed, double target_cn) {
  if (n < 2 || p < 2) throw ContractViolation("gen_highdim: need n >= 2 and p >= 2");
  if (l < 1 || l > p) throw ContractViolation("gen_highdim: need 1 <= l <= p");
  const Index outliers = planted_count(eps, n);
  const CovarianceSpec cov = gen_covariance_cn(p, target_cn, derive_seed(seed, {kCovarianceStream}));

  Rng rng(derive_seed(seed, {kDataStream}));
  const Matrix root = cov.eigenvectors * cov.eigenvalues.cwiseSqrt().asDiagonal();
  Matrix x = rng.normal_matrix(n, p) * root.transpose();
  for (Index i = n - outliers; i < n; ++i) {
    const auto j = static_cast<Index>(rng.below(static_cast<std::uint64_t>(l)));
    x.row(i) += 50.0 * cov.eigenvectors.col(j).transpose();
  }

  std::ostringstream tag;
  tag << "highdim(n=" << n << ",p=" << p << ",eps=" << eps << ",l=" << l << ")";
  return SimDataset{DataMatrix(std::move(x)), tail_labels(n, outliers), Vector::Zero(p), cov.sigma, tag.str(), seed};
}

Matrix overdetermined_mixing(Index p) {
  Matrix g = Matrix::Constant(p, p, 0.75);
  g.diagonal().setOnes();
  return g;
}

Vector zero_sum_unit_vector(Index p, Seed seed) {
  if (p < 2) throw ContractViolation("zero_sum_unit_vector: p must be at least 2");
  Rng rng(seed);
  for (;;) {
    Vector a = rng.normal_vector(p);
    a.array() -= a.mean();
    const double norm = a.norm();
    if (norm > 0.0) return a / norm;
  }
}

SimDataset gen_overdetermined(Index n, Index p, double eps, OutlierKind kind, double r, Seed seed) {
  if (n < 2 || p < 2) throw ContractViolation("gen_overdetermined: need n >= 2 and p >= 2");
  const Index outliers = planted_count(eps, n);
  const double pd = static_cast<double>(p);
  Rng rng(derive_seed(seed, {kDataStream}));

  Matrix y = rng.normal_matrix(n, p);
  const Index first = n - outliers;
  switch (kind) {
    case OutlierKind::Point: {
      const Vector a = zero_sum_unit_vector(p, derive_seed(seed, {kDirectionStream}));
      for (Index i = first; i < n; ++i) y.row(i) = (r * std::sqrt(pd) * a).transpose() + 0.01 * y.row(i);
      break;
    }
    case OutlierKind::Cluster:
      y.bottomRows(outliers).array() += r * std::pow(pd, -0.25);
      break;
    case OutlierKind::Random:
      for (Index i = first; i < n; ++i) {
        const Vector nu = rng.normal_vector(p);
        y.row(i) += (r * std::pow(pd, 0.25) / nu.norm() * nu).transpose();
      }
      break;
    case OutlierKind::Radial:
      y.bottomRows(outliers) *= std::sqrt(5.0);
      break;
  }

  const Matrix g = overdetermined_mixing(p);
  std::ostringstream tag;
  tag << "overdetermined(n=" << n << ",p=" << p << ",eps=" << eps << ",kind=" << to_string(kind) << ",r=" << r << ")";
  return SimDataset{DataMatrix(y * g.transpose()), tail_labels(n, outliers), Vector::Zero(p), g * g.transpose(),
                    tag.str(), seed};
}

std::pair<Vector, Matrix> overdetermined_back_transform(const Vector& mu_x, const Matrix& sigma_x) {
  const Index p = mu_x.size();
  if (sigma_x.rows() != p || sigma_x.cols() != p) throw ContractViolation("back transform: dimension mismatch");
  const Eigen::LDLT<Matrix> g(overdetermined_mixing(p));
  Vector mu_y = g.solve(mu_x);
  // G is symmetric, so G^-1 S G^-1 = G^-1 (G^-1 S')'.
  const Matrix left = g.solve(sigma_x);
  Matrix sigma_y = g.solve(left.transpose());
  return {std::move(mu_y), symmetric(sigma_y)};
}

SimDataset gen_masking_setting(int id, Seed seed, Index n, Index p) {
  if (id < 1 || id > 4) throw ContractViolation("masking setting id must be 1, 2, 3 or 4");

  if (id == 4) {
    n = n > 0 ? n : 300;
    p = p > 0 ? p : 500;
    const Index near = planted_count(0.15, n);
    const Index far = planted_count(0.05, n);
    const CovarianceSpec cov = gen_covariance_cn(p, 50.0, derive_seed(seed, {kCovarianceStream}));
    Rng rng(derive_seed(seed, {kDataStream}));
    const Matrix root = cov.eigenvectors * cov.eigenvalues.cwiseSqrt().asDiagonal();
    Matrix x = rng.normal_matrix(n, p) * root.transpose();
    const Index first = n - near - far;
    for (Index i = first; i < first + near; ++i) x.row(i) += 50.0 * cov.eigenvectors.col(0).transpose();
    for (Index i = first + near; i < n; ++i) x.row(i) += 5000.0 * cov.eigenvectors.col(1).transpose();
    std::ostringstream tag;
    tag << "masking(setting=4,n=" << n << ",p=" << p << ")";
    return SimDataset{DataMatrix(std::move(x)), tail_labels(n, near + far), Vector::Zero(p), cov.sigma, tag.str(),
                      seed};
  }

  n = n > 0 ? n : 1000;
  const Index dim = id == 3 ? 2 : 1;
  if (p > 0 && p != dim) throw ContractViolation("masking settings 1-3 have a fixed dimension");
  Index mid, far;
  double mid_mean, far_mean;
  if (id == 1) {
    mid = planted_count(0.10, n);
    far = planted_count(0.10, n);
    mid_mean = -10.0;
    far_mean = 10.0;
  } else {
    mid = planted_count(0.15, n);
    far = planted_count(0.05, n);
    mid_mean = 5.0;
    far_mean = 1000.0;
  }
  Rng rng(derive_seed(seed, {kDataStream}));
  Matrix x = rng.normal_matrix(n, dim);
  const Index first = n - mid - far;
  x.middleRows(first, mid).array() += mid_mean;
  x.bottomRows(far).array() += far_mean;

  std::ostringstream tag;
  tag << "masking(setting=" << id << ",n=" << n << ")";
  return SimDataset{DataMatrix(std::move(x)), tail_labels(n, mid + far), Vector::Zero(dim),
                    Matrix::Identity(dim, dim), tag.str(), seed};
}

}  // namespace smcd
