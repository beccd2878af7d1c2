#include <doctest.h>

#include <cmath>

#include "smcd/rng.hpp"
#include "smcd/simgen.hpp"
#include "smcd/stability.hpp"
#include "support.hpp"

using namespace smcd;

TEST_CASE("clustering distance equals the pairwise definition") {
  Rng rng(41);
  for (int trial = 0; trial < 300; ++trial) {
    const Index n = 2 + static_cast<Index>(rng.below(30));
    const auto a = oracle::random_map(rng, n);
    const auto b = oracle::random_map(rng, n);
    CHECK(std::abs(clustering_distance(BinaryMap(a), BinaryMap(b)) - oracle::clustering_distance_pairs(a, b)) < 1e-12);
  }
}

TEST_CASE("probability distance and the correction factors") {
  const BinaryMap a({0, 0, 1, 1});
  const BinaryMap b({0, 1, 1, 0});
  CHECK(probability_distance(a, b) == 0.5);
  CHECK(clustering_distance(a, b) == 0.5);
  CHECK(correction_c(10, 5) == doctest::Approx(0.5));
  CHECK(correction_c_prime(10, 5) == doctest::Approx(4.0 / 9.0));
  CHECK(correction_c(10, 10) == 0.0);
  CHECK(correction_c_prime(10, 10) == 1.0);
  CHECK(corrected_probability_distance(a, b, 2) == doctest::Approx(1.0));
}

TEST_CASE("corrected clustering distance") {
  const BinaryMap a({0, 0, 0, 1, 1});
  CHECK(corrected_clustering_distance(a, a, 3) == doctest::Approx(-1.0));
  const BinaryMap b({1, 1, 0, 0, 0});
  const double cp = correction_c_prime(5, 3);
  CHECK(corrected_clustering_distance(a, b, 3) ==
        doctest::Approx(clustering_distance(a, b) / (2.0 * cp * (1.0 - cp)) - 1.0));
  CHECK_THROWS_AS(corrected_clustering_distance(a, a, 5), DegenerateCorrection);
  CHECK_THROWS_AS(corrected_clustering_distance(a, a, 0), DegenerateCorrection);
}

TEST_CASE("default h grid") {
  const auto g = default_h_grid();
  REQUIRE(g.size() == 10);
  CHECK(g.front() == doctest::Approx(0.5));
  CHECK(g.back() == doctest::Approx(0.95));
}

TEST_CASE("argmin prefers the smallest instability, then larger h, then smaller q") {
  auto cell = [](Index h, Index q, double s) {
    InstabilityCell c;
    c.h = h;
    c.q = q;
    c.s_hat = s;
    return c;
  };
  std::vector<InstabilityCell> cells{cell(50, 2, -0.5), cell(60, 2, -0.9), cell(70, 2, -0.9), cell(70, 10, -0.9),
                                     cell(80, 10, std::nan(""))};
  CHECK(argmin_cell(cells) == 2);
  cells[0].s_hat = -0.95;
  CHECK(argmin_cell(cells) == 0);
  std::vector<InstabilityCell> none{cell(50, 2, std::nan(""))};
  CHECK_THROWS(argmin_cell(none));
}

TEST_CASE("parallel_for visits every index once") {
  std::vector<int> hits(100, 0);
  parallel_for(100, 4, [&](std::size_t i) { ++hits[i]; });
  for (int h : hits) CHECK(h == 1);
}

namespace {

DataMatrix planted(Seed seed) {
  Rng rng(seed);
  Matrix x = rng.normal_matrix(80, 6);
  x.bottomRows(16).col(0).array() += 12.0;
  return DataMatrix(x);
}

}  // namespace

TEST_CASE("single-cell instability agrees with the pair distance and with the grid") {
  const DataMatrix x = planted(1);
  StabilityOptions opt;
  opt.k = 200;
  const InstabilityCell cell = instability(x, 64, 2, 3, 99, opt);
  REQUIRE(cell.distances.size() == 3);
  for (Index b = 0; b < 3; ++b)
    CHECK(cell.distances[static_cast<std::size_t>(b)] == bootstrap_pair_distance(x, 64, 2, pair_seed(99, b), opt));

  const std::vector<double> fracs{0.7, 0.8};
  const std::vector<Index> qs{2, 3};
  const InstabilityPath path = grid_search(x, fracs, qs, 3, 99, opt);
  REQUIRE(path.cells.size() == 4);
  CHECK(path.cells[1].h == 64);
  CHECK(path.cells[1].q == 2);
  CHECK(path.cells[1].distances == cell.distances);
  CHECK(path.cells[2].q == 3);
}

TEST_CASE("grid search finds the planted inlier count and ignores worker count") {
  const DataMatrix x = planted(2);
  StabilityOptions opt;
  opt.k = 300;
  const std::vector<double> fracs = default_h_grid();
  const std::vector<Index> qs{2};
  const InstabilityPath one = grid_search(x, fracs, qs, 8, 5, opt);
  opt.workers = 4;
  const InstabilityPath four = grid_search(x, fracs, qs, 8, 5, opt);
  CHECK(one.best().h == 64);
  REQUIRE(one.cells.size() == four.cells.size());
  for (std::size_t i = 0; i < one.cells.size(); ++i) {
    CHECK(one.cells[i].distances == four.cells[i].distances);
    CHECK(one.cells[i].s_hat == four.cells[i].s_hat);
  }
  CHECK(one.argmin == four.argmin);
  CHECK(one.pairs == 8);
  const InstabilityCell& best = one.best();
  CHECK(best.std_err >= 0.0);
  CHECK(best.h_fraction == doctest::Approx(0.8));
}

TEST_CASE("failing pairs abort or are skipped") {
  Rng rng(3);
  Matrix x = rng.normal_matrix(40, 3);
  x.col(2).setConstant(1.0);
  const std::vector<double> fracs{0.75};
  const std::vector<Index> qs{2, 3};
  StabilityOptions opt;
  opt.k = 100;
  CHECK_THROWS_AS(grid_search(DataMatrix(x), fracs, qs, 4, 1, opt), PairFailure);
  try {
    grid_search(DataMatrix(x), fracs, qs, 4, 1, opt);
  } catch (const PairFailure& e) {
    CHECK(e.pair() == 0);
    CHECK(e.q() == 3);
    CHECK(e.h() == 30);
  }
  opt.on_failure = FailurePolicy::Skip;
  const InstabilityPath path = grid_search(DataMatrix(x), fracs, qs, 4, 1, opt);
  CHECK(path.cells[0].failures.empty());
  CHECK(path.cells[1].failures.size() == 4);
  CHECK(std::isnan(path.cells[1].s_hat));
  CHECK(path.best().q == 2);
}

TEST_CASE("progress callback counts pairs") {
  const DataMatrix x = planted(4);
  StabilityOptions opt;
  opt.k = 100;
  std::size_t last = 0, total = 0;
  opt.progress = [&](std::size_t done, std::size_t all) {
    last = std::max(last, done);
    total = all;
  };
  instability(x, 60, 2, 5, 1, opt);
  CHECK(last == 5);
  CHECK(total == 5);
}

TEST_CASE("univariate pairs recover masking setting 1") {
  const SimDataset d = gen_masking_setting(1, 17, 400);
  StabilityOptions opt;
  opt.method = PairMethod::UnivariateExact;
  const std::vector<double> fracs = default_h_grid();
  const std::vector<Index> qs{1};
  const InstabilityPath path = grid_search(d.x, fracs, qs, 20, 3, opt);
  CHECK(path.best().h == 320);
}
