#include <doctest.h>

#include <cmath>

#include "smcd/metrics.hpp"
#include "smcd/rng.hpp"
#include "support.hpp"

using namespace smcd;

TEST_CASE("detection counts and F1") {
  const BinaryMap truth({0, 0, 1, 1, 1});
  const BinaryMap pred({0, 1, 1, 1, 0});
  const DetectionReport r = detection_report(pred, truth, 1.5);
  CHECK(r.tp == 2);
  CHECK(r.fp == 1);
  CHECK(r.fn == 1);
  CHECK(r.tn == 1);
  CHECK(r.f1 == doctest::Approx(4.0 / 6.0));
  CHECK(r.elapsed_seconds == 1.5);
  CHECK(detection_report(truth, truth).f1 == 1.0);
  const DetectionReport none = detection_report(BinaryMap({0, 0}), BinaryMap({0, 0}));
  CHECK(none.no_positives);
  CHECK(none.f1 == 1.0);
  CHECK_THROWS_AS(detection_report(truth, BinaryMap({0})), ContractViolation);
}

TEST_CASE("F1 when every inlier outside h is flagged") {
  const Index n = 120, outliers = 30, h = 60;
  std::vector<std::uint8_t> t(n, 0), p(n, 1);
  for (Index i = n - outliers; i < n; ++i) t[static_cast<std::size_t>(i)] = 1;
  for (Index i = 0; i < h; ++i) p[static_cast<std::size_t>(i)] = 0;
  const DetectionReport r = detection_report(BinaryMap(p), BinaryMap(t));
  CHECK(r.fn == 0);
  CHECK(r.f1 == doctest::Approx(2.0 * outliers / (outliers + n - h)));
}

TEST_CASE("estimation errors") {
  Rng rng(61);
  const Index p = 5;
  const Matrix a = oracle::correlated(rng, 50, p);
  const Matrix sigma = a.transpose() * a / 50.0;
  const Matrix b = oracle::correlated(rng, 50, p);
  const Matrix sigma_hat = b.transpose() * b / 50.0;
  const Vector mu = Vector::Zero(p);
  const Vector mu_hat = Vector::Constant(p, 0.1);

  const EstimationReport same = estimation_report(mu, sigma, mu, sigma);
  CHECK(same.e_mu == 0.0);
  CHECK(std::abs(same.e_sigma) < 1e-10);
  CHECK(std::abs(same.kl) < 1e-10);

  const EstimationReport r = estimation_report(mu_hat, sigma_hat, mu, sigma);
  CHECK(r.e_mu == doctest::Approx(0.1 * std::sqrt(5.0)));
  CHECK(r.kl == doctest::Approx(oracle::kl_eigen(sigma_hat, sigma)).epsilon(1e-9));
  CHECK(r.e_sigma > 0.0);

  const Matrix scaled = 4.0 * Matrix::Identity(p, p);
  const EstimationReport iso = estimation_report(mu, scaled, mu, Matrix::Identity(p, p));
  CHECK(std::abs(iso.e_sigma) < 1e-12);
  CHECK(iso.kl == doctest::Approx(p * (4.0 - std::log(4.0) - 1.0)));

  Matrix singular = Matrix::Identity(p, p);
  singular(0, 0) = 0.0;
  try {
    estimation_report(mu, singular, mu, sigma);
    FAIL("expected NumericalError");
  } catch (const NumericalError& e) {
    CHECK(std::string(e.what()).find("sigma_hat") != std::string::npos);
  }
}
