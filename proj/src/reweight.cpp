#include "smcd/reweight.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <vector>

#include "smcd/depth.hpp"

namespace smcd {

namespace {

constexpr int kMaxSeriesTerms = 10000;
constexpr double kSeriesEps = 1e-16;

// Series expansion, converges quickly for x < a + 1.
double gamma_p_series(double a, double x) {
  double term = 1.0 / a;
  double sum = term;
  double ap = a;
  for (int n = 0; n < kMaxSeriesTerms; ++n) {
    ap += 1.0;
    term *= x / ap;
    sum += term;
    if (std::abs(term) < std::abs(sum) * kSeriesEps) break;
  }
  return sum * std::exp(-x + a * std::log(x) - std::lgamma(a));
}

// Modified Lentz continued fraction for Q, converges for x >= a + 1.
double gamma_q_fraction(double a, double x) {
  constexpr double tiny = 1e-300;
  double b = x + 1.0 - a;
  double c = 1.0 / tiny;
  double d = 1.0 / b;
  double h = d;
  for (int i = 1; i < kMaxSeriesTerms; ++i) {
    const double an = -i * (i - a);
    b += 2.0;
    d = an * d + b;
    if (std::abs(d) < tiny) d = tiny;
    c = b + an / c;
    if (std::abs(c) < tiny) c = tiny;
    d = 1.0 / d;
    const double delta = d * c;
    h *= delta;
    if (std::abs(delta - 1.0) < kSeriesEps) break;
  }
  return std::exp(-x + a * std::log(x) - std::lgamma(a)) * h;
}

void check_gamma_args(double a, double x) {
  if (!(a > 0.0)) throw ContractViolation("incomplete gamma needs a > 0");
  if (!(x >= 0.0)) throw ContractViolation("incomplete gamma needs x >= 0");
}

}  // namespace

double regularized_gamma_p(double a, double x) {
  check_gamma_args(a, x);
  if (x == 0.0) return 0.0;
  if (std::isinf(x)) return 1.0;
  return x < a + 1.0 ? gamma_p_series(a, x) : 1.0 - gamma_q_fraction(a, x);
}

double regularized_gamma_q(double a, double x) {
  check_gamma_args(a, x);
  if (x == 0.0) return 1.0;
  if (std::isinf(x)) return 0.0;
  return x < a + 1.0 ? 1.0 - gamma_p_series(a, x) : gamma_q_fraction(a, x);
}

double chi2_cdf(double x, double df) {
  if (!(df > 0.0)) throw ContractViolation("chi-square needs positive degrees of freedom");
  if (x <= 0.0) return 0.0;
  return regularized_gamma_p(0.5 * df, 0.5 * x);
}

double chi2_quantile(double prob, double df) {
  if (!(prob > 0.0 && prob < 1.0)) throw ContractViolation("chi2_quantile: prob must lie in (0, 1)");
  if (!(df > 0.0)) throw ContractViolation("chi2_quantile: df must be positive");
  const double a = 0.5 * df;
  // Work on whichever tail keeps the target away from 1, so quantiles near
  // prob = 1 keep their relative accuracy.
  const bool upper = prob > 0.5;
  const double target = upper ? 1.0 - prob : prob;
  // g is increasing in x: lower tail P - target, or target - Q in the upper tail.
  auto g = [&](double x) {
    return upper ? target - regularized_gamma_q(a, 0.5 * x) : regularized_gamma_p(a, 0.5 * x) - target;
  };

  double lo = 0.0;
  double hi = std::max(df, 1.0);
  while (g(hi) < 0.0) {
    lo = hi;
    hi *= 2.0;
    if (!std::isfinite(hi)) throw NumericalError("chi2_quantile: failed to bracket the root");
  }
  for (int it = 0; it < 2000 && hi - lo > 4.0 * std::numeric_limits<double>::epsilon() * hi; ++it) {
    const double mid = 0.5 * (lo + hi);
    if (g(mid) < 0.0) {
      lo = mid;
    } else {
      hi = mid;
    }
  }
  return 0.5 * (lo + hi);
}

Index ReweightResult::kept() const {
  return static_cast<Index>(std::count(weights.begin(), weights.end(), std::uint8_t{1}));
}

ReweightResult reweight(const Eigen::Ref<const Matrix>& x, const LocationScatter& est, double level) {
  if (!(level > 0.0 && level < 1.0)) throw ContractViolation("reweight: level must lie in (0, 1)");
  const Index n = x.rows();
  const Index p = x.cols();
  const Vector d2 = mahalanobis_sq_rows(x, est.invertible() ? est : factorize(est));

  std::vector<double> buf(d2.data(), d2.data() + n);
  const double pd = static_cast<double>(p);
  ReweightResult out;
  out.scale_c = median_inplace(buf) / chi2_quantile(0.5, pd);
  if (!(out.scale_c > 0.0)) throw NumericalError("reweight: median squared distance is zero");
  out.cutoff = chi2_quantile(level, pd);

  out.weights.resize(static_cast<std::size_t>(n));
  for (Index i = 0; i < n; ++i) out.weights[static_cast<std::size_t>(i)] = d2[i] / out.scale_c <= out.cutoff;

  const Index kept = out.kept();
  if (kept < 2) throw NumericalError("reweight: fewer than 2 observations kept; all rows rejected");

  out.mu_re = Vector::Zero(p);
  for (Index i = 0; i < n; ++i)
    if (out.weights[static_cast<std::size_t>(i)]) out.mu_re += x.row(i).transpose();
  out.mu_re /= static_cast<double>(kept);

  out.sigma_re = Matrix::Zero(p, p);
  for (Index i = 0; i < n; ++i) {
    if (!out.weights[static_cast<std::size_t>(i)]) continue;
    const Vector dev = x.row(i).transpose() - out.mu_re;
    out.sigma_re.selfadjointView<Eigen::Lower>().rankUpdate(dev);
  }
  out.sigma_re = out.sigma_re.selfadjointView<Eigen::Lower>();
  out.sigma_re /= static_cast<double>(kept - 1);
  return out;
}

FdbResult fdb(const DataMatrix& x, Index h, Index k, Seed seed, double level) {
  const Index n = x.rows();
  const Index p = x.cols();
  if (h < 2 || h > n) throw ContractViolation("fdb: need 2 <= h <= n");
  if (k < 0) throw ContractViolation("fdb: k must be positive (0 = automatic)");

  FdbResult out;
  const DirectionSet dirs = sample_directions(k == 0 ? default_direction_count(p) : k, p, seed);
  out.depth_subset = depth_rank_subset(x.values(), h, dirs);
  out.subset_estimate = subset_estimate(x.values(), out.depth_subset);

  if (p < n) {
    try {
      out.subset_estimate = factorize(out.subset_estimate);
    } catch (const RankDeficientScatter&) {
      out.labels = BinaryMap::complement_of(out.depth_subset, n);
      return out;
    }
    out.reweighted = reweight(x.values(), out.subset_estimate, level);
    std::vector<std::uint8_t> labels(out.reweighted->weights.size());
    std::transform(out.reweighted->weights.begin(), out.reweighted->weights.end(), labels.begin(),
                   [](std::uint8_t w) { return std::uint8_t(1 - w); });
    out.labels = BinaryMap(std::move(labels));
    return out;
  }
  out.labels = BinaryMap::complement_of(out.depth_subset, n);
  return out;
}

}  // namespace smcd
