#include "smcd/cli.hpp"

#include <algorithm>
#include <charconv>
#include <chrono>
#include <cmath>
#include <filesystem>
#include <fstream>
#include <limits>
#include <mutex>
#include <optional>
#include <ostream>
#include <sstream>

#include <CLI11.hpp>
#include <json.hpp>

#include "smcd/csv.hpp"
#include "smcd/depth.hpp"
#include "smcd/metrics.hpp"
#include "smcd/reweight.hpp"
#include "smcd/rng.hpp"
#include "smcd/simgen.hpp"
#include "smcd/spectral.hpp"
#include "smcd/stability.hpp"

namespace smcd::cli {

namespace fs = std::filesystem;
using json = nlohmann::json;

namespace {

constexpr std::uint64_t kBenchDataTag = 11;
constexpr std::uint64_t kBenchFdbTag = 12;
constexpr std::uint64_t kBenchPathTag = 13;
constexpr std::uint64_t kBenchDetectTag = 14;

const double kNaN = std::numeric_limits<double>::quiet_NaN();

struct Common {
  std::uint64_t seed = 1;
  std::string out_dir = ".";
  std::string format = "csv";
  unsigned threads = 1;
  bool quiet = false;
};

struct InputOptions {
  std::string path;
  bool header = false;
  bool standardize = false;
};

struct DetectOptions {
  InputOptions input;
  std::string h;
  std::optional<Index> q;
  std::string from_argmin;
  std::string k = "auto";
  int max_iter = kDefaultMaxConcentrationSteps;
};

struct PathOptions {
  InputOptions input;
  std::string h_grid;
  std::string q_grid = "2";
  std::string k = "auto";
  Index pairs = 50;
  std::string on_failure = "abort";
  std::string method = "spectral";
};

struct SimOptions {
  std::string protocol = "highdim";
  Index n = 0;
  Index p = 0;
  double eps = 0.1;
  Index l = 1;
  std::string kind = "point";
  double r = 5.0;
  int setting = 1;
  bool header = false;
};

struct BenchOptions {
  SimOptions sim;
  Index replicates = 10;
  std::string h_grid;
  std::string q_grid;
  std::string k = "auto";
  Index pairs = 50;
  double fdb_h = 0.5;
};

std::vector<std::string> split_list(const std::string& text) {
  std::vector<std::string> out;
  std::stringstream ss(text);
  std::string item;
  while (std::getline(ss, item, ',')) {
    item.erase(0, item.find_first_not_of(" \t"));
    item.erase(item.find_last_not_of(" \t") + 1);
    if (item.empty()) throw ContractViolation("empty entry in list '" + text + "'");
    out.push_back(item);
  }
  if (out.empty()) throw ContractViolation("empty list");
  return out;
}

double parse_double(const std::string& s) {
  double v = 0.0;
  const auto [ptr, ec] = std::from_chars(s.data(), s.data() + s.size(), v);
  if (ec != std::errc() || ptr != s.data() + s.size()) throw ContractViolation("'" + s + "' is not a number");
  return v;
}

Index parse_index(const std::string& s) {
  long long v = 0;
  const auto [ptr, ec] = std::from_chars(s.data(), s.data() + s.size(), v);
  if (ec != std::errc() || ptr != s.data() + s.size()) throw ContractViolation("'" + s + "' is not an integer");
  return static_cast<Index>(v);
}

std::vector<double> parse_h_grid(const std::string& text) {
  if (text.empty()) return default_h_grid();
  std::vector<double> out;
  for (const auto& item : split_list(text)) {
    const double f = parse_double(item);
    if (!(f > 0.0 && f < 1.0)) throw ContractViolation("h fractions must lie in (0, 1), got " + item);
    out.push_back(f);
  }
  return out;
}

std::vector<Index> parse_q_grid(const std::string& text, Index p) {
  std::vector<Index> out;
  for (const auto& item : split_list(text)) {
    const Index q = item == "p" ? p : parse_index(item);
    if (q < 1) throw ContractViolation("q values must be at least 1");
    out.push_back(q);
  }
  std::sort(out.begin(), out.end());
  out.erase(std::unique(out.begin(), out.end()), out.end());
  return out;
}

Index parse_k(const std::string& text) {
  if (text == "auto") return 0;
  const Index k = parse_index(text);
  if (k < 1) throw ContractViolation("--k must be a positive count or 'auto'");
  return k;
}

/// An h given as a fraction in (0, 1] or as a count.
Index resolve_h(const std::string& text, Index n) {
  const double v = parse_double(text);
  if (v > 0.0 && v <= 1.0 && text.find_first_of(".eE") != std::string::npos) return subset_size_from_fraction(v, n);
  const Index h = parse_index(text);
  if (h < 1 || h > n) throw ContractViolation("--h must lie in [1, n]");
  return h;
}

DataMatrix load_input(const InputOptions& opt) {
  Matrix x = csv::read_matrix_file(opt.path, opt.header);
  if (opt.standardize) {
    const Index n = x.rows();
    for (Index j = 0; j < x.cols(); ++j) {
      const double mean = x.col(j).mean();
      x.col(j).array() -= mean;
      const double sd = n > 1 ? std::sqrt(x.col(j).squaredNorm() / static_cast<double>(n - 1)) : 0.0;
      if (sd > 0.0) x.col(j) /= sd;
    }
  }
  return DataMatrix(std::move(x));
}

json matrix_json(const Matrix& m) {
  json rows = json::array();
  for (Index i = 0; i < m.rows(); ++i) {
    json row = json::array();
    for (Index j = 0; j < m.cols(); ++j) row.push_back(m(i, j));
    rows.push_back(std::move(row));
  }
  return rows;
}

json vector_json(const Vector& v) {
  json out = json::array();
  for (Index i = 0; i < v.size(); ++i) out.push_back(v[i]);
  return out;
}

json number_json(double v) { return std::isfinite(v) ? json(v) : json(nullptr); }

class OutputDir {
 public:
  OutputDir(const std::string& dir, std::ostream& listing) : dir_(dir), listing_(listing) {
    std::error_code ec;
    fs::create_directories(dir_, ec);
    if (ec) throw DataError("cannot create output directory '" + dir + "': " + ec.message());
  }

  template <class Fn>
  void write(const std::string& name, Fn&& fn) {
    const fs::path path = dir_ / name;
    std::ofstream file(path, std::ios::binary);
    if (!file) throw DataError("cannot write '" + path.string() + "'");
    fn(file);
    file.flush();
    if (!file) throw DataError("failed writing '" + path.string() + "'");
    listing_ << path.string() << '\n';
  }

 private:
  fs::path dir_;
  std::ostream& listing_;
};

std::function<void(std::size_t, std::size_t)> progress_sink(std::ostream& err, bool quiet) {
  if (quiet) return {};
  return [&err](std::size_t done, std::size_t total) { err << "pair " << done << "/" << total << " done\n"; };
}

void read_argmin(const std::string& path, Index& h, Index& q) {
  std::ifstream in(path);
  if (!in) throw DataError("cannot open '" + path + "'");
  json j;
  try {
    in >> j;
    h = j.at("h").get<Index>();
    q = j.at("q").get<Index>();
  } catch (const json::exception& e) {
    throw DataError(path + ": " + e.what());
  }
}

int cmd_detect(const Common& common, const DetectOptions& opt, std::ostream& out, std::ostream& err) {
  const DataMatrix x = load_input(opt.input);
  const Index n = x.rows();
  Index h = 0;
  Index q = 0;
  if (!opt.from_argmin.empty()) read_argmin(opt.from_argmin, h, q);
  if (!opt.h.empty()) h = resolve_h(opt.h, n);
  if (opt.q) q = *opt.q;
  if (h == 0 || q == 0) throw ContractViolation("detect needs --h and --q (or --from-argmin)");
  const Index k = parse_k(opt.k);

  const BestSubsetResult fit = spectral_mcd(x, h, q, k, common.seed, opt.max_iter);
  const DirectionSet dirs = sample_directions(k == 0 ? default_direction_count(q) : k, q, common.seed);
  const DepthVector depth = projection_depths(fit.model.scores, select_rows(fit.model.scores, fit.subset), dirs);
  if (!common.quiet)
    err << "detect: h = " << h << ", q = " << q << ", " << fit.labels.outlier_count() << " outliers, "
        << fit.iterations << " concentration steps\n";

  OutputDir dir(common.out_dir, out);
  dir.write("labels.csv", [&](std::ostream& f) { csv::write_labels(f, fit.labels, depth.values); });
  json est = {{"h", h},
              {"q", q},
              {"iterations", fit.iterations},
              {"converged", fit.converged},
              {"mu", vector_json(fit.estimate.mu)},
              {"sigma", matrix_json(fit.estimate.sigma)},
              {"v_q", matrix_json(fit.model.basis)},
              {"center", vector_json(fit.model.center)}};
  dir.write("estimates.json", [&](std::ostream& f) { f << est.dump(2) << '\n'; });
  return kOk;
}

json argmin_json(const InstabilityCell& c, Index pairs, Seed seed) {
  return {{"h_frac", number_json(c.h_fraction)}, {"h", c.h}, {"q", c.q}, {"s_hat", number_json(c.s_hat)},
          {"std_err", number_json(c.std_err)}, {"B", pairs}, {"seed", seed}};
}

int cmd_path(const Common& common, const PathOptions& opt, std::ostream& out, std::ostream& err) {
  const DataMatrix x = load_input(opt.input);
  const std::vector<double> h_grid = parse_h_grid(opt.h_grid);
  const std::vector<Index> q_grid = parse_q_grid(opt.q_grid, x.cols());
  if (opt.pairs < 1) throw ContractViolation("--pairs must be at least 1");

  StabilityOptions so;
  so.k = parse_k(opt.k);
  so.workers = common.threads;
  so.progress = progress_sink(err, common.quiet);
  if (opt.on_failure == "skip") so.on_failure = FailurePolicy::Skip;
  else if (opt.on_failure != "abort") throw ContractViolation("--on-failure must be abort or skip");
  if (opt.method == "univariate") so.method = PairMethod::UnivariateExact;
  else if (opt.method != "spectral") throw ContractViolation("--method must be spectral or univariate");

  const InstabilityPath path = grid_search(x, h_grid, q_grid, opt.pairs, common.seed, so);

  OutputDir dir(common.out_dir, out);
  if (common.format == "json") {
    json rows = json::array();
    for (const auto& c : path.cells) rows.push_back(argmin_json(c, path.pairs, path.master_seed));
    for (auto& r : rows) r.erase("seed");
    dir.write("instability.json", [&](std::ostream& f) { f << rows.dump(2) << '\n'; });
  } else {
    dir.write("instability.csv", [&](std::ostream& f) {
      f << "h_frac,h,q,s_hat,std_err,B\n";
      for (const auto& c : path.cells)
        f << csv::format_double(c.h_fraction) << ',' << c.h << ',' << c.q << ',' << csv::format_double(c.s_hat) << ','
          << csv::format_double(c.std_err) << ',' << path.pairs << '\n';
    });
  }
  dir.write("argmin.json",
            [&](std::ostream& f) { f << argmin_json(path.best(), path.pairs, path.master_seed).dump(2) << '\n'; });
  Index failures = 0;
  for (const auto& c : path.cells) failures += static_cast<Index>(c.failures.size());
  if (failures > 0 && !common.quiet) err << "path: " << failures << " failed pair evaluations were skipped\n";
  return kOk;
}

SimDataset simulate(const SimOptions& opt, Seed seed) {
  if (opt.protocol == "highdim") {
    return gen_highdim(opt.n > 0 ? opt.n : 300, opt.p > 0 ? opt.p : 500, opt.eps, opt.l, seed);
  }
  if (opt.protocol == "overdetermined") {
    return gen_overdetermined(opt.n > 0 ? opt.n : 200, opt.p > 0 ? opt.p : 20, opt.eps, parse_outlier_kind(opt.kind),
                              opt.r, seed);
  }
  if (opt.protocol == "masking") return gen_masking_setting(opt.setting, seed, opt.n, opt.p);
  throw ContractViolation("--protocol must be highdim, overdetermined or masking");
}

int cmd_simulate(const Common& common, const SimOptions& opt, std::ostream& out, std::ostream& err) {
  const SimDataset data = simulate(opt, common.seed);
  std::vector<std::string> header;
  if (opt.header)
    for (Index j = 0; j < data.x.cols(); ++j) header.push_back("x" + std::to_string(j + 1));
  if (!common.quiet)
    err << "simulate: " << data.protocol << ", " << data.truth.outlier_count() << " planted outliers\n";
  OutputDir dir(common.out_dir, out);
  dir.write("X.csv", [&](std::ostream& f) { csv::write_matrix(f, data.x.values(), header); });
  dir.write("truth.csv", [&](std::ostream& f) { csv::write_truth(f, data.truth); });
  return kOk;
}

struct ReplicateRow {
  Index replicate = 0;
  std::string method;
  double fn = kNaN, f1 = kNaN, e_mu = kNaN, e_sigma = kNaN, kl = kNaN, time = kNaN;
  Index h = 0, q = 0;
  std::string error;
};

void fill_estimation(ReplicateRow& row, const SimDataset& data, bool overdetermined, const Vector& mu,
                     const Matrix& sigma) {
  Vector m = mu;
  Matrix s = sigma;
  Vector mu_true = data.mu_true;
  Matrix sigma_true = data.sigma_true;
  if (overdetermined) {
    std::tie(m, s) = overdetermined_back_transform(mu, sigma);
    mu_true = Vector::Zero(mu.size());
    sigma_true = Matrix::Identity(mu.size(), mu.size());
  }
  row.e_mu = (m - mu_true).norm();
  try {
    const EstimationReport r = estimation_report(m, s, mu_true, sigma_true);
    row.e_sigma = r.e_sigma;
    row.kl = r.kl;
  } catch (const NumericalError&) {
    // Singular scatter (p >= h): only the location error is defined.
  }
}

template <class Fn>
ReplicateRow timed_run(Index replicate, const std::string& method, Fn&& fn) {
  ReplicateRow row;
  row.replicate = replicate;
  row.method = method;
  const auto start = std::chrono::steady_clock::now();
  try {
    fn(row);
  } catch (const std::exception& e) {
    row.error = e.what();
  }
  row.time = std::chrono::duration<double>(std::chrono::steady_clock::now() - start).count();
  return row;
}

struct Summary {
  double mean = kNaN;
  double se = kNaN;
};

Summary summarize(const std::vector<double>& values) {
  std::vector<double> v;
  for (double x : values)
    if (std::isfinite(x)) v.push_back(x);
  Summary s;
  if (v.empty()) return s;
  const double m = static_cast<double>(v.size());
  double sum = 0.0;
  for (double x : v) sum += x;
  s.mean = sum / m;
  if (v.size() < 2) {
    s.se = 0.0;
    return s;
  }
  double ss = 0.0;
  for (double x : v) ss += (x - s.mean) * (x - s.mean);
  s.se = std::sqrt(ss / (m - 1.0)) / std::sqrt(m);
  return s;
}

int cmd_bench(const Common& common, const BenchOptions& opt, std::ostream& out, std::ostream& err) {
  if (opt.replicates < 1) throw ContractViolation("--replicates must be at least 1");
  if (opt.sim.protocol == "masking") throw ContractViolation("bench supports the highdim and overdetermined protocols");
  const bool overdetermined = opt.sim.protocol == "overdetermined";
  const std::vector<double> h_grid = parse_h_grid(opt.h_grid);
  const Index k = parse_k(opt.k);
  simulate(opt.sim, common.seed);  // validates protocol parameters up front

  const auto reps = static_cast<std::size_t>(opt.replicates);
  std::vector<ReplicateRow> rows(2 * reps);
  std::mutex log_mutex;
  std::size_t finished = 0;

  parallel_for(reps, common.threads, [&](std::size_t r) {
    const Seed rep_seed = derive_seed(common.seed, {kBenchDataTag, r});
    const SimDataset data = simulate(opt.sim, rep_seed);
    const Index n = data.x.rows();
    const Index p = data.x.cols();
    const auto ridx = static_cast<Index>(r);

    rows[2 * r] = timed_run(ridx, "FDB", [&](ReplicateRow& row) {
      const Index h = subset_size_from_fraction(opt.fdb_h, n);
      row.h = h;
      const FdbResult res = fdb(data.x, h, k, derive_seed(rep_seed, {kBenchFdbTag}));
      const DetectionReport d = detection_report(res.labels, data.truth);
      row.fn = static_cast<double>(d.fn);
      row.f1 = d.f1;
      if (res.reweighted) fill_estimation(row, data, overdetermined, res.reweighted->mu_re, res.reweighted->sigma_re);
      else fill_estimation(row, data, overdetermined, res.subset_estimate.mu, res.subset_estimate.sigma);
    });

    rows[2 * r + 1] = timed_run(ridx, "SpectralMCD", [&](ReplicateRow& row) {
      const std::string q_text = !opt.q_grid.empty() ? opt.q_grid : (overdetermined ? "2,p" : "2,10");
      const std::vector<Index> q_grid = parse_q_grid(q_text, p);
      StabilityOptions so;
      so.k = k;
      const InstabilityPath path =
          grid_search(data.x, h_grid, q_grid, opt.pairs, derive_seed(rep_seed, {kBenchPathTag}), so);
      row.h = path.best().h;
      row.q = path.best().q;
      const BestSubsetResult fit = spectral_mcd(data.x, row.h, row.q, k, derive_seed(rep_seed, {kBenchDetectTag}));
      const DetectionReport d = detection_report(fit.labels, data.truth);
      row.fn = static_cast<double>(d.fn);
      row.f1 = d.f1;
      const LocationScatter est = subset_estimate(data.x.values(), fit.subset);
      fill_estimation(row, data, overdetermined, est.mu, est.sigma);
    });

    if (!common.quiet) {
      std::lock_guard lock(log_mutex);
      err << "replicate " << ++finished << "/" << reps << " done\n";
    }
  });

  struct MethodSummary {
    std::string method;
    Index failures = 0;
    Summary fn, f1, e_mu, e_sigma, kl, time;
  };
  std::vector<MethodSummary> table;
  for (const std::string method : {"FDB", "SpectralMCD"}) {
    MethodSummary s;
    s.method = method;
    std::vector<double> fn, f1, e_mu, e_sigma, kl, time;
    for (const auto& row : rows) {
      if (row.method != method) continue;
      if (!row.error.empty()) {
        ++s.failures;
        continue;
      }
      fn.push_back(row.fn);
      f1.push_back(row.f1);
      e_mu.push_back(row.e_mu);
      e_sigma.push_back(row.e_sigma);
      kl.push_back(row.kl);
      time.push_back(row.time);
    }
    s.fn = summarize(fn);
    s.f1 = summarize(f1);
    s.e_mu = summarize(e_mu);
    s.e_sigma = summarize(e_sigma);
    s.kl = summarize(kl);
    s.time = summarize(time);
    if (s.failures > 0 && !common.quiet) err << "bench: " << method << " failed on " << s.failures << " replicates\n";
    table.push_back(std::move(s));
  }

  OutputDir dir(common.out_dir, out);
  if (common.format == "json") {
    json summary = json::array();
    for (const auto& s : table) {
      json j = {{"method", s.method}, {"replicates", opt.replicates}, {"failures", s.failures}};
      const std::pair<const char*, const Summary*> cols[] = {{"fn", &s.fn},           {"f1", &s.f1}, {"e_mu", &s.e_mu},
                                                             {"e_sigma", &s.e_sigma}, {"kl", &s.kl}, {"time", &s.time}};
      for (const auto& [name, v] : cols) {
        j[std::string(name) + "_mean"] = number_json(v->mean);
        j[std::string(name) + "_se"] = number_json(v->se);
      }
      summary.push_back(std::move(j));
    }
    json reps_json = json::array();
    for (const auto& r : rows)
      reps_json.push_back({{"replicate", r.replicate}, {"method", r.method},        {"fn", number_json(r.fn)},
                           {"f1", number_json(r.f1)},  {"e_mu", number_json(r.e_mu)}, {"e_sigma", number_json(r.e_sigma)},
                           {"kl", number_json(r.kl)},  {"time", number_json(r.time)}, {"h", r.h},
                           {"q", r.q},                 {"error", r.error}});
    dir.write("bench.json", [&](std::ostream& f) { f << summary.dump(2) << '\n'; });
    dir.write("replicates.json", [&](std::ostream& f) { f << reps_json.dump(2) << '\n'; });
  } else {
    const auto fmt = csv::format_double;
    dir.write("bench.csv", [&](std::ostream& f) {
      f << "method,replicates,failures,fn_mean,fn_se,f1_mean,f1_se,e_mu_mean,e_mu_se,e_sigma_mean,e_sigma_se,"
           "kl_mean,kl_se,time_mean,time_se\n";
      for (const auto& s : table) {
        f << s.method << ',' << opt.replicates << ',' << s.failures;
        for (const Summary* v : {&s.fn, &s.f1, &s.e_mu, &s.e_sigma, &s.kl, &s.time})
          f << ',' << fmt(v->mean) << ',' << fmt(v->se);
        f << '\n';
      }
    });
    dir.write("replicates.csv", [&](std::ostream& f) {
      f << "replicate,method,fn,f1,e_mu,e_sigma,kl,time,h,q,error\n";
      for (const auto& r : rows) {
        std::string msg = r.error;
        std::replace(msg.begin(), msg.end(), '"', '\'');
        f << r.replicate << ',' << r.method << ',' << fmt(r.fn) << ',' << fmt(r.f1) << ',' << fmt(r.e_mu) << ','
          << fmt(r.e_sigma) << ',' << fmt(r.kl) << ',' << fmt(r.time) << ',' << r.h << ',' << r.q << ",\"" << msg
          << "\"\n";
      }
    });
  }
  return kOk;
}

void add_common(CLI::App* app, Common& c) {
  app->add_option("--seed", c.seed, "master seed")->capture_default_str();
  app->add_option("--out", c.out_dir, "output directory")->capture_default_str();
  app->add_option("--format", c.format, "table format")->check(CLI::IsMember({"csv", "json"}))->capture_default_str();
  app->add_option("--threads", c.threads, "worker threads")->check(CLI::PositiveNumber)->capture_default_str();
  app->add_flag("--quiet", c.quiet, "suppress progress on stderr");
}

void add_input(CLI::App* app, InputOptions& in) {
  app->add_option("--input", in.path, "numeric CSV, one observation per row")->required();
  app->add_flag("--header", in.header, "first line is a header");
  app->add_flag("--standardize", in.standardize, "center and scale columns before fitting");
}

void add_sim(CLI::App* app, SimOptions& s) {
  app->add_option("--protocol", s.protocol, "highdim | overdetermined | masking")->capture_default_str();
  app->add_option("--n", s.n, "observations (0 = protocol default)");
  app->add_option("--p", s.p, "variables (0 = protocol default)");
  app->add_option("--eps", s.eps, "contamination fraction")->capture_default_str();
  app->add_option("--l", s.l, "number of low-variance outlier directions (highdim)")->capture_default_str();
  app->add_option("--kind", s.kind, "point | cluster | random | radial (overdetermined)")->capture_default_str();
  app->add_option("--r", s.r, "outlier separation (overdetermined)")->capture_default_str();
}

}  // namespace

int run(const std::vector<std::string>& args, std::ostream& out, std::ostream& err) {
  CLI::App app("SpectralMCD outlier detection and instability-based tuning", "smcd");
  app.require_subcommand(1);
  app.set_help_flag("--help", "print this help and exit");

  Common common;
  DetectOptions detect;
  PathOptions path;
  SimOptions sim;
  BenchOptions bench;

  auto* d = app.add_subcommand("detect", "fit SpectralMCD for one (h, q) and label outliers");
  d->set_help_flag("--help", "print this help and exit");
  add_common(d, common);
  add_input(d, detect.input);
  d->add_option("--h", detect.h, "subset size: a fraction in (0, 1] or a count");
  d->add_option("--q", detect.q, "number of principal components");
  d->add_option("--from-argmin", detect.from_argmin, "take h and q from a path run's argmin.json");
  d->add_option("--k", detect.k, "random directions or 'auto'")->capture_default_str();
  d->add_option("--max-iter", detect.max_iter, "concentration step limit")->capture_default_str();

  auto* p = app.add_subcommand("path", "bootstrap instability over an (h, q) grid");
  add_common(p, common);
  add_input(p, path.input);
  p->add_option("--h-grid", path.h_grid, "comma-separated h fractions (default 0.50,0.55,...,0.95)");
  p->add_option("--q-grid", path.q_grid, "comma-separated q values; 'p' means all columns")->capture_default_str();
  p->add_option("--k", path.k, "random directions or 'auto'")->capture_default_str();
  p->add_option("--pairs,--B", path.pairs, "bootstrap pairs")->capture_default_str();
  p->add_option("--on-failure", path.on_failure, "abort | skip")->capture_default_str();
  p->add_option("--method", path.method, "spectral | univariate")->capture_default_str();

  auto* s = app.add_subcommand("simulate", "write a simulated data set and its truth labels");
  add_common(s, common);
  add_sim(s, sim);
  s->add_option("--setting", sim.setting, "masking setting 1-4")->capture_default_str();
  s->add_flag("--header", sim.header, "write a header row to X.csv");

  auto* b = app.add_subcommand("bench", "compare FDB and SpectralMCD over seeded replicates");
  add_common(b, common);
  add_sim(b, bench.sim);
  b->add_option("--replicates", bench.replicates, "replicate count")->capture_default_str();
  b->add_option("--h-grid", bench.h_grid, "comma-separated h fractions (default 0.50,0.55,...,0.95)");
  b->add_option("--q-grid", bench.q_grid, "q values (default 2,10 for highdim, 2,p for overdetermined)");
  b->add_option("--k", bench.k, "random directions or 'auto'")->capture_default_str();
  b->add_option("--pairs,--B", bench.pairs, "bootstrap pairs")->capture_default_str();
  b->add_option("--fdb-h", bench.fdb_h, "FDB subset fraction")->capture_default_str();

  std::vector<std::string> reversed(args.rbegin(), args.rend());
  try {
    app.parse(reversed);
  } catch (const CLI::ParseError& e) {
    return app.exit(e, out, err) == 0 ? kOk : kUsage;
  }

  try {
    if (d->parsed()) return cmd_detect(common, detect, out, err);
    if (p->parsed()) return cmd_path(common, path, out, err);
    if (s->parsed()) return cmd_simulate(common, sim, out, err);
    bench.sim.setting = sim.setting;
    return cmd_bench(common, bench, out, err);
  } catch (const ContractViolation& e) {
    err << "error: " << e.what() << '\n';
    return kUsage;
  } catch (const DegenerateCorrection& e) {
    err << "error: " << e.what() << '\n';
    return kUsage;
  } catch (const DataError& e) {
    err << "error: " << e.what() << '\n';
    return kDataFailure;
  } catch (const NumericalError& e) {
    err << "numerical failure: " << e.what() << '\n';
    return kNumericalFailure;
  } catch (const std::exception& e) {
    err << "error: " << e.what() << '\n';
    return kNumericalFailure;
  }
}

}  // namespace smcd::cli
