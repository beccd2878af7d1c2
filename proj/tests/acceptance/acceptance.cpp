// Acceptance suite: one PASS/FAIL line per criterion. Pass criterion numbers
// as arguments to run a subset, e.g. `acceptance 1 2 9`.

#include <chrono>
#include <cmath>
#include <cstdio>
#include <filesystem>
#include <fstream>
#include <functional>
#include <set>
#include <sstream>
#include <string>
#include <vector>

#include "smcd/cli.hpp"
#include "smcd/mcd.hpp"
#include "smcd/metrics.hpp"
#include "smcd/reweight.hpp"
#include "smcd/rng.hpp"
#include "smcd/simgen.hpp"
#include "smcd/spectral.hpp"
#include "smcd/stability.hpp"
#include "support.hpp"

using namespace smcd;
namespace fs = std::filesystem;

namespace {

struct Outcome {
  bool pass = false;
  std::string detail;
};

std::string fmt(const char* f, double a, double b = 0.0, double c = 0.0, double d = 0.0) {
  char buf[256];
  std::snprintf(buf, sizeof buf, f, a, b, c, d);
  return buf;
}

double seconds_since(std::chrono::steady_clock::time_point t0) {
  return std::chrono::duration<double>(std::chrono::steady_clock::now() - t0).count();
}

Outcome theorem_identity() {
  const auto t0 = std::chrono::steady_clock::now();
  Rng rng(1001);
  double worst = 0.0;
  for (int trial = 0; trial < 2000; ++trial) {
    const Index n = 2 + static_cast<Index>(rng.below(59));
    const auto a = oracle::random_map(rng, n);
    const auto b = oracle::random_map(rng, n);
    worst = std::max(worst, std::abs(clustering_distance(BinaryMap(a), BinaryMap(b)) -
                                     oracle::clustering_distance_pairs(a, b)));
  }
  const double t = seconds_since(t0);
  return {worst <= 1e-12 && t < 5.0, fmt("2000 pairs, max |diff| = %.3g, %.2f s", worst, t)};
}

double subset_variance(const Vector& x, const std::vector<Index>& rows) {
  double m = 0.0;
  for (Index i : rows) m += x[i];
  m /= static_cast<double>(rows.size());
  double v = 0.0;
  for (Index i : rows) v += (x[i] - m) * (x[i] - m);
  return v / static_cast<double>(rows.size());
}

Outcome univariate_exact() {
  const auto t0 = std::chrono::steady_clock::now();
  Rng rng(1002);
  long checked = 0, subset_mismatch = 0, value_mismatch = 0;
  for (Index n = 2; n <= 12; ++n)
    for (int trial = 0; trial < 200; ++trial) {
      const Vector x = rng.normal_vector(n);
      for (Index h = 2; h <= n; ++h) {
        const auto fast = univariate_mcd_exact(x, h).indices();
        const auto brute = oracle::univariate_mcd_brute(x, h);
        const double vf = subset_variance(x, fast);
        const double vb = subset_variance(x, brute);
        if (std::abs(vf - vb) > 1e-12 * std::max(1.0, vb)) ++value_mismatch;
        if (fast != brute) ++subset_mismatch;
        ++checked;
      }
    }
  const double t = seconds_since(t0);
  return {value_mismatch == 0 && subset_mismatch == 0 && t < 30.0,
          fmt("%.0f (n, h, vector) cases, %.0f subset and %.0f value mismatches, %.2f s", static_cast<double>(checked),
              static_cast<double>(subset_mismatch), static_cast<double>(value_mismatch), t)};
}

Outcome incremental_algebra() {
  Rng rng(1003);
  double worst_inv = 0.0, worst_det = 0.0;
  int fallbacks = 0;
  for (Index p : {1, 3, 10}) {
    for (int seq = 0; seq < 100; ++seq) {
      const Index n = 4 * p + 30;
      const Matrix x = oracle::correlated(rng, n, p);
      std::vector<Index> in, out;
      // Subsets stay above 2p + 2 rows so the scatter is well enough conditioned
      // for a 1e-8 forward-error comparison to be meaningful.
      const Index start = 3 * p + 2;
      for (Index i = 0; i < n; ++i) (i < start ? in : out).push_back(i);
      LocationScatter est = factorize(subset_estimate(x, SubsetIndex(in)));
      for (int step = 0; step < 40; ++step) {
        const bool must_grow = in.size() <= static_cast<std::size_t>(2 * p + 2);
        const bool grow = !out.empty() && (must_grow || rng.below(2) == 0);
        RankOneResult r;
        if (grow) {
          const std::size_t k = rng.below(out.size());
          r = rank_one_update(est, x.row(out[k]).transpose());
          in.push_back(out[k]);
          out.erase(out.begin() + static_cast<long>(k));
        } else {
          const std::size_t k = rng.below(in.size());
          r = rank_one_downdate(est, x.row(in[k]).transpose());
          out.push_back(in[k]);
          in.erase(in.begin() + static_cast<long>(k));
        }
        fallbacks += r.dense_fallback;
        est = std::move(r.estimate);
        const Matrix cov = oracle::covariance(x, in);
        const Matrix inv = oracle::inverse(cov);
        const double ld = oracle::log_det(cov);
        worst_inv = std::max(worst_inv, (*est.sigma_inv - inv).norm() / inv.norm());
        worst_det = std::max(worst_det, std::abs(*est.log_det - ld) / std::max(1.0, std::abs(ld)));
      }
    }
  }
  return {worst_inv <= 1e-8 && worst_det <= 1e-8,
          fmt("300 sequences x 40 steps, max rel err inverse %.3g, log det %.3g, %.0f dense fallbacks", worst_inv,
              worst_det, fallbacks)};
}

Outcome cstep_monotone() {
  Rng rng(1004);
  long violations = 0, steps = 0;
  for (int trial = 0; trial < 100; ++trial) {
    const Index p = 1 + static_cast<Index>(rng.below(6));
    const Index n = 20 + static_cast<Index>(rng.below(100));
    Matrix z = oracle::correlated(rng, n, p);
    const Index bad = static_cast<Index>(rng.below(static_cast<std::uint64_t>(n / 3)));
    z.bottomRows(bad).array() += 5.0 + 10.0 * rng.uniform();
    const Index h = std::max(p + 2, static_cast<Index>((0.5 + 0.45 * rng.uniform()) * static_cast<double>(n)));
    Vector keys(n);
    for (Index i = 0; i < n; ++i) keys[i] = rng.uniform();
    const ConcentrationResult r = concentrate(z, smallest_k(keys, h));
    for (std::size_t i = 1; i < r.log_det_path.size(); ++i) {
      ++steps;
      if (r.log_det_path[i] > r.log_det_path[i - 1] + 1e-10) ++violations;
    }
  }
  return {violations == 0,
          fmt("100 trajectories, %.0f steps, %.0f increases", static_cast<double>(steps), static_cast<double>(violations))};
}

Outcome fdb_f1_arithmetic() {
  const Index n = 120, p = 200, h = 60;
  const int reps = 10;
  bool ok = true;
  std::ostringstream detail;
  for (double eps : {0.10, 0.25, 0.40}) {
    const double outliers = static_cast<double>(planted_count(eps, n));
    const double expect = 2.0 * outliers / (outliers + static_cast<double>(n - h));
    int zero_fn = 0;
    double f1_sum = 0.0;
    for (Index l : {1, 5})
      for (int r = 0; r < reps; ++r) {
        const Seed seed = derive_seed(1005, {static_cast<std::uint64_t>(eps * 100), static_cast<std::uint64_t>(l),
                                             static_cast<std::uint64_t>(r)});
        const SimDataset d = gen_highdim(n, p, eps, l, seed);
        const FdbResult res = fdb(d.x, h, 0, derive_seed(seed, {1}));
        const DetectionReport rep = detection_report(res.labels, d.truth);
        if (rep.fn != 0) continue;
        ++zero_fn;
        f1_sum += rep.f1;
        if (std::abs(rep.f1 - expect) > 0.005) ok = false;
      }
    if (zero_fn == 0) ok = false;
    detail << "eps " << eps << ": F1 " << (zero_fn ? f1_sum / zero_fn : NAN) << " (formula " << expect << ", "
           << zero_fn << "/" << 2 * reps << " with FN = 0); ";
  }
  return {ok, detail.str()};
}

Outcome spectral_perfect_detection() {
  const Index n = 120, p = 200;
  const int reps = 50;
  const std::vector<double> h_grid = default_h_grid();
  const std::vector<Index> q_grid{2, 10};
  int argmin_hits = 0, zero_fn = 0;
  double f1_sum = 0.0;
  const auto t0 = std::chrono::steady_clock::now();
  for (int r = 0; r < reps; ++r) {
    const Seed seed = derive_seed(1006, {static_cast<std::uint64_t>(r)});
    const SimDataset d = gen_highdim(n, p, 0.25, 5, seed);
    const InstabilityPath path = grid_search(d.x, h_grid, q_grid, 50, derive_seed(seed, {1}));
    const InstabilityCell& best = path.best();
    argmin_hits += best.h == 90;
    const BestSubsetResult fit = spectral_mcd(d.x, best.h, best.q, 0, derive_seed(seed, {2}));
    const DetectionReport rep = detection_report(fit.labels, d.truth);
    zero_fn += rep.fn == 0;
    f1_sum += rep.f1;
  }
  const double mean_f1 = f1_sum / reps;
  return {argmin_hits >= 45 && mean_f1 >= 0.99 && zero_fn >= 48,
          fmt("argmin at h = 0.75n in %.0f/50, mean F1 %.4f, FN = 0 in %.0f/50, %.0f s", argmin_hits, mean_f1, zero_fn,
              seconds_since(t0))};
}

Outcome masking_redescent() {
  const Index n = 500;
  const int runs = 50;
  const std::vector<double> h_grid = default_h_grid();
  const std::vector<Index> q_grid{2};
  int hits = 0;
  const auto t0 = std::chrono::steady_clock::now();
  for (int r = 0; r < runs; ++r) {
    const Seed seed = derive_seed(1007, {static_cast<std::uint64_t>(r)});
    const SimDataset d = gen_masking_setting(3, seed, n);
    const InstabilityPath path = grid_search(d.x, h_grid, q_grid, 50, derive_seed(seed, {1}));
    std::vector<double> s;
    for (const auto& c : path.cells) s.push_back(c.s_hat);
    // Grid index 6 is h = 0.80n, 9 is h = 0.95n.
    const bool local_min = s[6] < s[5] && s[6] <= s[7];
    const bool descent = s[9] < s[8];
    hits += local_min && descent;
  }
  return {hits >= 40, fmt("local minimum at 0.80n with a second descent at 0.95n in %.0f/50 runs, %.0f s", hits,
                          seconds_since(t0))};
}

Outcome correction_equivalence() {
  const std::vector<Index> ns{50, 100, 200, 500, 1000};
  bool decreasing = true, small = true;
  double worst_large = 0.0;
  for (double f : default_h_grid()) {
    double prev = INFINITY;
    for (Index n : ns) {
      const Index h = subset_size_from_fraction(f, n);
      const double gap = std::abs(correction_c(n, h) - (1.0 - correction_c_prime(n, h)));
      if (!(gap < prev)) decreasing = false;
      prev = gap;
      if (n >= 200) {
        worst_large = std::max(worst_large, gap);
        if (gap >= 0.01) small = false;
      }
    }
  }
  return {decreasing && small, std::string("gap decreasing in n: ") + (decreasing ? "yes" : "no") +
                                   fmt(", max gap at n >= 200: %.3g", worst_large)};
}

Outcome chi2_accuracy() {
  double worst_closed = 0.0, worst_trip = 0.0;
  for (double prob : {0.01, 0.1, 0.5, 0.9, 0.95, 0.975, 0.99, 0.999}) {
    worst_closed = std::max(worst_closed, std::abs(chi2_quantile(prob, 2.0) + 2.0 * std::log1p(-prob)));
    const double x = -2.0 * std::log1p(-prob);
    worst_closed = std::max(worst_closed, std::abs(chi2_cdf(x, 2.0) - prob));
  }
  for (int df = 1; df <= 50; ++df)
    for (double prob : {0.5, 0.95, 0.975, 0.99})
      worst_trip = std::max(worst_trip, std::abs(chi2_cdf(chi2_quantile(prob, df), df) - prob));
  return {worst_closed <= 1e-10 && worst_trip <= 1e-8,
          fmt("df = 2 closed-form max err %.3g, round-trip max err %.3g", worst_closed, worst_trip)};
}

std::string slurp(const fs::path& path) {
  std::ifstream in(path, std::ios::binary);
  std::ostringstream s;
  s << in.rdbuf();
  return s.str();
}

Outcome path_determinism() {
  const fs::path dir = fs::temp_directory_path() / "smcd_acceptance_determinism";
  fs::remove_all(dir);
  std::ostringstream out, err;
  auto run = [&](std::vector<std::string> args) { return cli::run(args, out, err); };
  bool ok = run({"simulate", "--protocol", "highdim", "--n", "80", "--p", "120", "--eps", "0.25", "--l", "5", "--seed",
                 "21", "--out", dir.string(), "--quiet"}) == 0;
  const std::vector<std::string> base{"path",    "--input", (dir / "X.csv").string(), "--q-grid", "2,10", "--pairs",
                                      "10",      "--seed",  "77",                     "--quiet"};
  auto path_run = [&](const std::string& threads, const std::string& sub) {
    std::vector<std::string> a = base;
    a.insert(a.end(), {"--threads", threads, "--out", (dir / sub).string()});
    return run(a) == 0;
  };
  ok = ok && path_run("1", "one") && path_run("4", "four") && path_run("1", "again");
  const std::string one = slurp(dir / "one/instability.csv");
  const bool same = !one.empty() && one == slurp(dir / "four/instability.csv") &&
                    one == slurp(dir / "again/instability.csv") &&
                    slurp(dir / "one/argmin.json") == slurp(dir / "four/argmin.json");
  fs::remove_all(dir);
  return {ok && same, ok ? (same ? "1 and 4 workers and a rerun give byte-identical instability.csv"
                                 : "outputs differ between runs")
                         : "command failed: " + err.str()};
}

}  // namespace

int main(int argc, char** argv) {
  const std::vector<std::pair<std::string, std::function<Outcome()>>> criteria{
      {"clustering distance identity vs pairwise oracle", theorem_identity},
      {"exact univariate MCD vs enumeration", univariate_exact},
      {"incremental update/downdate algebra", incremental_algebra},
      {"C-step log det monotonicity", cstep_monotone},
      {"FDB fixed-h F1 arithmetic at desk scale", fdb_f1_arithmetic},
      {"SpectralMCD perfect detection at desk scale", spectral_perfect_detection},
      {"redescending instability path under masking", masking_redescent},
      {"c versus 1 - c' equivalence", correction_equivalence},
      {"chi-square quantile accuracy", chi2_accuracy},
      {"path determinism across worker counts", path_determinism},
  };
  std::set<int> only;
  for (int i = 1; i < argc; ++i) only.insert(std::stoi(argv[i]));

  int failed = 0;
  for (std::size_t i = 0; i < criteria.size(); ++i) {
    const int id = static_cast<int>(i) + 1;
    if (!only.empty() && !only.count(id)) continue;
    Outcome o;
    try {
      o = criteria[i].second();
    } catch (const std::exception& e) {
      o = {false, std::string("exception: ") + e.what()};
    }
    failed += !o.pass;
    std::printf("criterion %2d %s: %s (%s)\n", id, o.pass ? "PASS" : "FAIL", criteria[i].first.c_str(),
                o.detail.c_str());
    std::fflush(stdout);
  }
  return failed == 0 ? 0 : 1;
}
