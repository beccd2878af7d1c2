#include "smcd/spectral.hpp"

#include <cmath>
#include <limits>
#include <string>

#include <Eigen/SVD>

namespace smcd {

SpectralModel SpectralModel::truncated(Index q) const {
  if (q < 1 || q > this->q()) throw ContractViolation("SpectralModel::truncated: q out of range");
  SpectralModel out;
  out.center = center;
  out.basis = basis.leftCols(q);
  out.singular_values = singular_values.head(q);
  out.scores = scores.leftCols(q);
  const double tol = singular_values.size() ? singular_values[0] * 1e-10 : 0.0;
  out.rank_deficient = !(out.singular_values[q - 1] > tol);
  return out;
}

SpectralModel fit_embedding(const Eigen::Ref<const Matrix>& x, Index q) {
  const Index n = x.rows();
  const Index p = x.cols();
  if (q < 1 || q > std::min(n, p)) {
    throw ContractViolation("fit_embedding: q = " + std::to_string(q) + " must lie in [1, min(n, p)]");
  }
  SpectralModel model;
  model.center = x.colwise().mean().transpose();
  const Matrix centered = x.rowwise() - model.center.transpose();

  Eigen::BDCSVD<Matrix> svd(centered, Eigen::ComputeThinV);
  model.basis = svd.matrixV().leftCols(q);
  model.singular_values = svd.singularValues().head(q);
  if (!model.basis.allFinite() || !model.singular_values.allFinite()) {
    // BDCSVD occasionally returns NaN vectors on inputs with repeated rows.
    Eigen::JacobiSVD<Matrix> jacobi(centered, Eigen::ComputeThinV);
    model.basis = jacobi.matrixV().leftCols(q);
    model.singular_values = jacobi.singularValues().head(q);
    if (!model.basis.allFinite()) throw NumericalError("fit_embedding: singular value decomposition failed");
  }

  for (Index c = 0; c < q; ++c) {
    Index arg = 0;
    model.basis.col(c).cwiseAbs().maxCoeff(&arg);
    if (model.basis(arg, c) < 0.0) model.basis.col(c) *= -1.0;
  }
  model.scores = centered * model.basis;

  const double top = model.singular_values[0];
  const double tol = top * 1e-10;
  model.rank_deficient = !(model.singular_values[q - 1] > tol);
  return model;
}

Matrix project(const SpectralModel& model, const Eigen::Ref<const Matrix>& x) {
  if (x.cols() != model.center.size()) {
    throw ContractViolation("project: data has " + std::to_string(x.cols()) + " columns, model expects " +
                            std::to_string(model.center.size()));
  }
  return (x.rowwise() - model.center.transpose()) * model.basis;
}

BestSubsetResult best_subset_from_scores(const Eigen::Ref<const Matrix>& scores, Index h, const DirectionSet& dirs,
                                         int max_iter) {
  const Index n = scores.rows();
  if (h < 1 || h > n) throw ContractViolation("best subset: h must lie in [1, n]");
  BestSubsetResult out;
  out.initial_subset = depth_rank_subset(scores, h, dirs);
  ConcentrationResult conc = [&] {
    try {
      return concentrate(scores, out.initial_subset, max_iter);
    } catch (const RankDeficientScatter& e) {
      throw RankDeficientScatter(e.deficient_dims(), scores.cols(),
                                 "score-space scatter is singular; use fewer principal components");
    }
  }();
  out.subset = std::move(conc.subset);
  out.estimate = std::move(conc.estimate);
  out.converged = conc.converged;
  out.iterations = conc.iterations;
  out.log_det_path = std::move(conc.log_det_path);
  out.labels = BinaryMap::complement_of(out.subset, n);
  return out;
}

BestSubsetResult spectral_mcd(const DataMatrix& x, Index h, Index q, Index k, Seed seed, int max_iter) {
  const Index n = x.rows();
  if (!(q < h && h <= n)) {
    throw ContractViolation("spectral_mcd: need q < h <= n (q = " + std::to_string(q) + ", h = " + std::to_string(h) +
                            ", n = " + std::to_string(n) + ")");
  }
  if (k < 0) throw ContractViolation("spectral_mcd: k must be positive (0 = automatic)");
  SpectralModel model = fit_embedding(x.values(), q);
  const DirectionSet dirs = sample_directions(k == 0 ? default_direction_count(q) : k, q, seed);
  BestSubsetResult out = best_subset_from_scores(model.scores, h, dirs, max_iter);
  out.model = std::move(model);
  return out;
}

}  // namespace smcd
