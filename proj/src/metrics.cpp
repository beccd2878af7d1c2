#include "smcd/metrics.hpp"

#include <algorithm>
#include <cmath>
#include <string>

#include <Eigen/Cholesky>
#include <Eigen/SVD>

namespace smcd {

DetectionReport detection_report(const BinaryMap& predicted, const BinaryMap& truth, double elapsed_seconds) {
  if (predicted.size() != truth.size()) throw ContractViolation("detection_report: maps have different lengths");
  DetectionReport r;
  r.elapsed_seconds = elapsed_seconds;
  for (Index i = 0; i < truth.size(); ++i) {
    const bool pred = predicted[i] == 1;
    const bool out = truth[i] == 1;
    if (pred && out) ++r.tp;
    else if (pred) ++r.fp;
    else if (out) ++r.fn;
    else ++r.tn;
  }
  const Index denom = 2 * r.tp + r.fp + r.fn;
  if (denom == 0) {
    r.no_positives = true;
    r.f1 = 1.0;
  } else {
    r.f1 = 2.0 * static_cast<double>(r.tp) / static_cast<double>(denom);
  }
  return r;
}

namespace {

Eigen::LLT<Matrix> spd_factor(const Matrix& m, const char* name, Index p) {
  if (m.rows() != p || m.cols() != p) throw ContractViolation(std::string(name) + " has the wrong dimensions");
  Eigen::LLT<Matrix> llt(m);
  if (llt.info() != Eigen::Success) throw NumericalError(std::string(name) + " is not symmetric positive definite");
  return llt;
}

}  // namespace

EstimationReport estimation_report(const Vector& mu_hat, const Matrix& sigma_hat, const Vector& mu_true,
                                   const Matrix& sigma_true) {
  const Index p = mu_true.size();
  if (mu_hat.size() != p) throw ContractViolation("estimation_report: location dimension mismatch");
  const auto hat = spd_factor(sigma_hat, "sigma_hat", p);
  const auto truth = spd_factor(sigma_true, "sigma_true", p);

  EstimationReport r;
  r.e_mu = (mu_hat - mu_true).norm();

  // Sigma_hat Sigma^-1 = (Sigma^-1 Sigma_hat)'.
  const Matrix ratio = truth.solve(sigma_hat).transpose();
  Eigen::JacobiSVD<Matrix> svd(ratio);
  const Vector& s = svd.singularValues();
  r.e_sigma = std::log10(s[0] / s[s.size() - 1]);

  const double log_det_hat = 2.0 * hat.matrixLLT().diagonal().array().log().sum();
  const double log_det_true = 2.0 * truth.matrixLLT().diagonal().array().log().sum();
  r.kl = std::max(0.0, ratio.trace() - (log_det_hat - log_det_true) - static_cast<double>(p));
  return r;
}

}  // namespace smcd
