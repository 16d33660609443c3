#include <doctest.h>

#include <cmath>

#include "confspec/estimator.hpp"
#include "confspec/stats.hpp"
#include "test_support.hpp"

using namespace confspec;
using namespace confspec::estimator;
using confspec::testing::random_orthogonal;
using confspec::testing::random_spd;
using confspec::testing::random_vector;

namespace {

ErrorKind kind_of(auto&& fn) {
  try {
    fn();
  } catch (const Error& e) {
    return e.kind();
  }
  FAIL("expected an error");
  return ErrorKind::IoError;
}

// Hand oracle for eigenvalues [2, 1], beta = 1: T = diag(2,1) + eta g g^T,
// v = (1, 2) / sqrt(5). The eigenvector of [[p, q], [q, r]] for eigenvalue t
// is (q, t - p).
Eigen::Vector2d two_by_two_confounded(double eta) {
  const double p = 2.0 + eta / 2.0, q = eta / 2.0, r = 1.0 + eta / 2.0;
  const Eigen::Vector2d v = Eigen::Vector2d(1.0, 2.0) / std::sqrt(5.0);
  if (q == 0.0) return Eigen::Vector2d(v[0] * v[0], v[1] * v[1]);
  const double mid = 0.5 * (p + r), half = std::sqrt(0.25 * (p - r) * (p - r) + q * q);
  const Eigen::Vector2d top = Eigen::Vector2d(q, mid + half - p).normalized();
  const double w0 = std::pow(top.dot(v), 2);
  return Eigen::Vector2d(w0, 1.0 - w0);
}

scm::ModelParams rotated_model(Eigen::Index d, Engine& rng, double c) {
  std::uniform_real_distribution<double> unit(0.0, 1.0);
  Eigen::VectorXd spectrum(d);
  for (Eigen::Index i = 0; i < d; ++i) spectrum[i] = 0.5 + 1.5 * static_cast<double>(i % 7) / 6.0;
  const Eigen::MatrixXd q = random_orthogonal(d, rng);
  scm::ModelParams p;
  p.sigma_ee = spectral::SymMatrix(q * spectrum.asDiagonal() * q.transpose());
  p.a = unit(rng) * random_vector(d, rng).normalized();
  p.b = unit(rng) * random_vector(d, rng).normalized();
  p.c = c;
  return p;
}

}  // namespace

TEST_CASE("observed_weights examples") {
  const auto sxx = spectral::SymMatrix::diagonal(Eigen::Vector2d(3.0, 1.0));
  const auto w = observed_weights(sxx, Eigen::Vector2d(1.0, 0.0));
  CHECK(w.weights[0] == doctest::Approx(1.0));
  CHECK(w.weights[1] == doctest::Approx(0.0));

  Engine rng(3);
  const spectral::SymMatrix m(random_spd(6, rng));
  const auto e = spectral::eigendecompose(m);
  const auto tw = observed_weights(e, spectral::tracial_inducing_vector(e));
  for (Eigen::Index j = 0; j < 6; ++j) CHECK(tw.weights[j] == doctest::Approx(1.0 / 6.0));

  CHECK(kind_of([&] { observed_weights(sxx, Eigen::Vector2d(0.0, 0.0)); }) == ErrorKind::ZeroRegressionVector);
}

TEST_CASE("observed_weights agree with the induced spectral measure") {
  Engine rng(9);
  const spectral::SymMatrix m(random_spd(10, rng));
  const Eigen::VectorXd a_hat = random_vector(10, rng);
  const auto e = spectral::eigendecompose(m);
  const auto mu = spectral::induced_measure(e, a_hat);
  const auto w = observed_weights(m, a_hat);
  REQUIRE(mu.size() == 10);
  for (Eigen::Index j = 0; j < 10; ++j) {
    CHECK(std::fabs(w.weights[j] - mu.weights()[static_cast<std::size_t>(j)] / a_hat.squaredNorm()) <= 1e-12);
  }
  CHECK(w.weights.sum() == doctest::Approx(1.0).epsilon(1e-12));
}

TEST_CASE("family_weights examples") {
  const Eigen::Vector2d eig(2.0, 1.0);
  for (double eta : {0.0, 0.7, 2.0}) {
    const auto f = family_weights(eig, 0.0, eta);
    CHECK(f.weights[0] == doctest::Approx(0.5));
    CHECK(f.weights[1] == doctest::Approx(0.5));
  }

  auto f = family_weights(eig, 1.0, 0.0);
  const auto oracle0 = two_by_two_confounded(0.0);
  CHECK(oracle0[0] == doctest::Approx(0.2));
  CHECK(f.weights[0] == doctest::Approx(oracle0[0]).epsilon(1e-12));
  CHECK(f.weights[1] == doctest::Approx(oracle0[1]).epsilon(1e-12));

  f = family_weights(eig, 1.0, 2.0);
  const auto oracle2 = two_by_two_confounded(2.0);
  CHECK(oracle2[0] == doctest::Approx(0.7236).epsilon(1e-3));
  CHECK(f.weights[0] == doctest::Approx(oracle2[0]).epsilon(1e-12));
  CHECK(f.weights[1] == doctest::Approx(oracle2[1]).epsilon(1e-12));
}

TEST_CASE("family_weights rejects bad arguments") {
  const Eigen::Vector2d eig(2.0, 1.0);
  CHECK(kind_of([&] { family_weights(eig, 1.5, 0.0); }) == ErrorKind::InvalidInput);
  CHECK(kind_of([&] { family_weights(eig, 0.5, 2.5); }) == ErrorKind::InvalidInput);
  CHECK(kind_of([&] { family_weights(eig, 0.5, -0.1); }) == ErrorKind::InvalidInput);
  CHECK(kind_of([&] { family_weights(Eigen::Vector2d(2.0, 0.0), 0.5, 0.5); }) == ErrorKind::SingularCovariance);
}

TEST_CASE("property: family weights normalized with the causal floor") {
  Engine rng(13);
  for (int trial = 0; trial < 20; ++trial) {
    const auto eig = spectral::eigendecompose(spectral::SymMatrix(random_spd(8, rng))).eigenvalues;
    for (int bi = 0; bi < 11; ++bi) {
      for (int ei = 0; ei < 11; ++ei) {
        const double beta = grid_point(bi, 11, 1.0);
        const auto f = family_weights(eig, beta, grid_point(ei, 11, eig[0]));
        CHECK(std::fabs(f.weights.sum() - 1.0) <= 1e-10);
        CHECK(f.weights.minCoeff() >= (1.0 - beta) / 8.0 - 1e-12);
      }
    }
  }
}

TEST_CASE("property: confounded weights depend on eta") {
  Engine rng(14);
  for (int trial = 0; trial < 20; ++trial) {
    const auto eig = spectral::eigendecompose(spectral::SymMatrix(random_spd(6, rng))).eigenvalues;
    const auto low = family_weights(eig, 1.0, 0.0).weights;
    const auto high = family_weights(eig, 1.0, eig[0]).weights;
    CHECK((low - high).cwiseAbs().maxCoeff() > 0.0);
  }
}

TEST_CASE("smoothing_matrix") {
  const auto k = smoothing_matrix(Eigen::Vector2d(1.0, 0.0), 0.2);
  CHECK(k(0, 0) == 1.0);
  CHECK(k(1, 1) == 1.0);
  CHECK(k(0, 1) == doctest::Approx(std::exp(-1.0 / (2.0 * 0.04))).epsilon(1e-12));
  CHECK(k(0, 1) == doctest::Approx(std::exp(-12.5)).epsilon(1e-12));
  CHECK(k(1, 0) == k(0, 1));

  const auto wide = smoothing_matrix(Eigen::Vector3d(1000.0, 500.0, 0.0), 0.01);
  CHECK((wide - Eigen::Matrix3d::Identity()).cwiseAbs().maxCoeff() < 1e-12);

  const auto flat = smoothing_matrix(Eigen::Vector3d(2.0, 2.0, 2.0), 0.2);
  CHECK(flat.minCoeff() == 1.0);
  CHECK_THROWS_AS(smoothing_matrix(Eigen::Vector2d(1.0, 0.0), 0.0), Error);
}

TEST_CASE("distance examples") {
  const Eigen::Vector3d w(0.2, 0.3, 0.5);
  const auto k = smoothing_matrix(Eigen::Vector3d(3.0, 2.0, 1.0));
  CHECK(distance(w, w, k) == 0.0);

  const Eigen::Vector3d w2(0.5, 0.3, 0.2);
  CHECK(distance(w, w2, Eigen::Matrix3d::Identity()) == doctest::Approx(0.6));
  CHECK(distance(w, w2, k) == doctest::Approx(distance(w2, w, k)));

  const double q = 0.3;
  Eigen::Matrix2d kq;
  kq << 1, q, q, 1;
  CHECK(distance(Eigen::Vector2d(1, 0), Eigen::Vector2d(0, 1), kq) == doctest::Approx(2.0 * (1.0 - q)));
  CHECK_THROWS_AS(distance(Eigen::Vector2d(1, 0), w, kq), Error);
}

TEST_CASE("estimate: causal model with tracial-inducing a gives beta_hat = 0") {
  Engine rng(21);
  const spectral::SymMatrix sxx(random_spd(10, rng));
  const Eigen::VectorXd a = spectral::tracial_inducing_vector(spectral::eigendecompose(sxx));
  const auto est = estimate(sxx, sxx.matrix() * a);
  CHECK(est.beta_hat == 0.0);
  CHECK(est.eta_hat == 0.0);
  CHECK(est.distance < 1e-12);
}

TEST_CASE("estimate: purely confounded population model gives beta_hat near 1") {
  Engine rng(22);
  scm::ModelParams p;
  p.a = Eigen::VectorXd::Zero(10);
  p.b = random_vector(10, rng).normalized() * std::sqrt(10.0);
  p.c = 1.0;
  p.sigma_ee = spectral::SymMatrix::identity(10);
  const auto est = estimate(scm::true_sigma_xx(p), scm::true_sigma_xy(p));
  CHECK(est.beta_hat >= 0.9);
}

TEST_CASE("estimate: flat spectrum warns and returns beta_hat = 0") {
  const auto est = estimate(spectral::SymMatrix::identity(4), Eigen::Vector4d(1.0, 0.0, 0.0, 0.0));
  CHECK(est.beta_hat == 0.0);
  REQUIRE(!est.warnings.empty());
  CHECK(est.warnings.front().find("DegenerateSpectrum") != std::string::npos);
}

TEST_CASE("property: grid search is exhaustive with the documented tie-break") {
  Engine rng(31);
  for (int trial = 0; trial < 10; ++trial) {
    const spectral::SymMatrix sxx(random_spd(6, rng));
    const Eigen::VectorXd sxy = random_vector(6, rng);
    GridConfig cfg;
    cfg.beta_steps = 11;
    cfg.eta_steps = 9;
    const auto est = estimate(sxx, sxy, cfg);

    const auto obs = observed_weights(sxx, scm::regression_vector(sxx, sxy));
    const auto k = smoothing_matrix(obs.eigenvalues, cfg.sigma_factor);
    double best = INFINITY;
    for (int bi = 0; bi < cfg.beta_steps; ++bi) {
      for (int ei = 0; ei < cfg.eta_steps; ++ei) {
        const auto f = family_weights(obs.eigenvalues, grid_point(bi, 11, 1.0), grid_point(ei, 9, obs.eigenvalues[0]));
        const double dist = distance(obs.weights, f.weights, k);
        best = std::min(best, dist);
        CHECK(est.distance <= dist + 1e-12);
      }
    }
    CHECK(est.distance == doctest::Approx(best).epsilon(1e-10));
    if (est.beta_index == 0) CHECK(est.eta_index == 0);
  }
}

TEST_CASE("property: estimate is invariant to scaling y") {
  Engine rng(41);
  for (int trial = 0; trial < 10; ++trial) {
    auto p = rotated_model(8, rng, 0.7);
    const auto ds = scm::sample_dataset(p, 2000, rng);
    const auto base = estimate_from_data(ds);
    for (double s : {0.5, 4.0, 1024.0}) {
      scm::Dataset scaled = ds;
      scaled.y *= s;
      const auto est = estimate_from_data(scaled);
      CHECK(est.beta_index == base.beta_index);
      CHECK(est.eta_index == base.eta_index);
      CHECK((est.observed_weights - base.observed_weights).cwiseAbs().maxCoeff() <= 1e-12);
    }
  }
}

TEST_CASE("estimate_from_data: simulated unconfounded and strongly confounded data") {
  // Median over a seeded ensemble drawn from the simulation generator.
  GridConfig cfg;
  std::vector<double> unconfounded, confounded;
  for (std::uint64_t s = 0; s < 40; ++s) {
    auto rng = make_engine(500, s);
    auto p = scm::sample_params(10, rng);
    p.c = 0.0;
    unconfounded.push_back(estimate_from_data(scm::sample_dataset(p, 100000, rng), cfg).beta_hat);

    auto rng2 = make_engine(501, s);
    auto q = scm::sample_params(10, rng2);
    q.c = 3.0;
    q.a *= 0.05 / q.a.norm();
    q.b.normalize();
    REQUIRE(scm::ground_truth(q).gamma > 0.85);
    confounded.push_back(estimate_from_data(scm::sample_dataset(q, 100000, rng2), cfg).beta_hat);
  }
  CHECK(stats::median(unconfounded) <= 0.15);
  CHECK(stats::median(confounded) >= 0.5);

  scm::Dataset one;
  one.x = Eigen::MatrixXd::Ones(1, 3);
  one.y = Eigen::VectorXd::Ones(1);
  CHECK(kind_of([&] { estimate_from_data(one); }) == ErrorKind::InvalidInput);
}

TEST_CASE("normalize_dataset") {
  scm::Dataset ds;
  ds.x = Eigen::MatrixXd(2, 2);
  ds.x << 0.0, 1.0, 2.0, 5.0;
  ds.y = Eigen::Vector2d(3.0, 4.0);
  const auto nd = normalize_dataset(ds);
  const double h = 1.0 / std::sqrt(2.0);
  CHECK(nd.x(0, 0) == doctest::Approx(-h));
  CHECK(nd.x(1, 0) == doctest::Approx(h));
  CHECK(nd.y == ds.y);

  Engine rng(61);
  scm::Dataset big;
  big.x = Eigen::MatrixXd(50, 3);
  for (Eigen::Index i = 0; i < 50; ++i) big.x.row(i) = random_vector(3, rng).transpose() * 7.0;
  big.y = random_vector(50, rng);
  const auto once = normalize_dataset(big);
  const auto twice = normalize_dataset(once);
  CHECK((once.x - twice.x).cwiseAbs().maxCoeff() <= 1e-12);

  scm::Dataset flat = big;
  flat.x.col(1).setConstant(3.3);
  CHECK(kind_of([&] { normalize_dataset(flat); }) == ErrorKind::ConstantColumn);
}

TEST_CASE("estimate_from_data with normalization attaches the warning") {
  Engine rng(71);
  auto p = rotated_model(5, rng, 0.5);
  GridConfig cfg;
  cfg.normalize = true;
  const auto est = estimate_from_data(scm::sample_dataset(p, 500, rng), cfg);
  REQUIRE(!est.warnings.empty());
  CHECK(est.warnings.front() == std::string(kNormalizationWarning));
  CHECK_FALSE(est.eta_reliable);
}

TEST_CASE("property: family fit improves with dimension at population covariances") {
  // Median smoothed distance per eigenvalue, D / d, between the observed
  // weights and the family member at the true (beta, eta) shrinks as d grows.
  // D itself sums d smoothed residuals and grows like sqrt(d).
  std::vector<double> medians;
  for (Eigen::Index d : {20, 80, 320}) {
    std::vector<double> dists;
    for (std::uint64_t s = 0; s < 15; ++s) {
      auto rng = make_engine(1234, s * 1000 + static_cast<std::uint64_t>(d));
      const auto p = rotated_model(d, rng, 1.0);
      const auto t = scm::ground_truth(p);
      const auto sxx = scm::true_sigma_xx(p);
      const auto obs = observed_weights(sxx, t.a_hat_pop);
      const double beta = std::round(t.beta * 100.0) / 100.0;
      const auto f = family_weights(obs.eigenvalues, beta, std::min(t.eta, obs.eigenvalues[0]));
      dists.push_back(distance(obs.weights, f.weights, smoothing_matrix(obs.eigenvalues)) / static_cast<double>(d));
    }
    medians.push_back(stats::median(dists));
  }
  CAPTURE(medians[0]);
  CAPTURE(medians[1]);
  CAPTURE(medians[2]);
  CHECK(medians[1] < medians[0]);
  CHECK(medians[2] < medians[1]);
}
