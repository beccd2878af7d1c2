#pragma once

#include "smcd/types.hpp"

namespace smcd {

/// Outlier detection quality; outliers are the positive class.
struct DetectionReport {
  Index tp = 0, fp = 0, fn = 0, tn = 0;
  double f1 = 0.0;
  /// Neither map contains an outlier; f1 is reported as 1.
  bool no_positives = false;
  double elapsed_seconds = 0.0;
};

DetectionReport detection_report(const BinaryMap& predicted, const BinaryMap& truth, double elapsed_seconds = 0.0);

struct EstimationReport {
  double e_mu = 0.0;     ///< ||mu_hat - mu||_2
  double e_sigma = 0.0;  ///< log10 cond(Sigma_hat Sigma^-1)
  double kl = 0.0;       ///< tr(Sigma_hat Sigma^-1) - log det(Sigma_hat Sigma^-1) - p
};

/// Throws NumericalError naming the offending matrix when either scatter is not SPD.
EstimationReport estimation_report(const Vector& mu_hat, const Matrix& sigma_hat, const Vector& mu_true,
                                   const Matrix& sigma_true);

}  // namespace smcd
