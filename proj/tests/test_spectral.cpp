#include <doctest.h>

#include <cmath>

#include "confspec/spectral.hpp"
#include "test_support.hpp"

using namespace confspec;
using namespace confspec::spectral;
using confspec::testing::random_spd;
using confspec::testing::random_symmetric;
using confspec::testing::random_vector;

namespace {

double relative_frobenius(const Eigen::MatrixXd& a, const Eigen::MatrixXd& b) {
  return (a - b).norm() / std::max(1.0, b.norm());
}

double orthonormality_error(const Eigen::MatrixXd& v) {
  return (v.transpose() * v - Eigen::MatrixXd::Identity(v.cols(), v.cols())).cwiseAbs().maxCoeff();
}

// Direct matrix oracle: <psi, p(A) psi> by Horner's rule on matrices.
double quadratic_form_of_polynomial(const Eigen::MatrixXd& a, const Eigen::VectorXd& coef,
                                    const Eigen::VectorXd& psi) {
  Eigen::VectorXd acc = Eigen::VectorXd::Zero(psi.size());
  for (Eigen::Index k = coef.size() - 1; k >= 0; --k) acc = a * acc + coef[k] * psi;
  return psi.dot(acc);
}

std::size_t count_in(const Eigen::VectorXd& v, double lo, double hi) {
  std::size_t c = 0;
  for (Eigen::Index i = 0; i < v.size(); ++i) c += (v[i] >= lo && v[i] <= hi) ? 1 : 0;
  return c;
}

}  // namespace

TEST_CASE("SymMatrix symmetrizes and rejects bad shapes") {
  Eigen::MatrixXd m(2, 2);
  m << 1.0, 2.0, 4.0, 3.0;
  const SymMatrix s(m);
  CHECK(s(0, 1) == s(1, 0));
  CHECK(s(0, 1) == 3.0);
  CHECK_THROWS_AS(SymMatrix(Eigen::MatrixXd(2, 3)), Error);
  CHECK_THROWS_AS(SymMatrix(Eigen::MatrixXd(0, 0)), Error);
}

TEST_CASE("eigendecompose: diagonal input") {
  const auto e = eigendecompose(SymMatrix::diagonal(Eigen::Vector3d(1.0, 2.0, 3.0)));
  CHECK(e.eigenvalues[0] == doctest::Approx(3.0));
  CHECK(e.eigenvalues[1] == doctest::Approx(2.0));
  CHECK(e.eigenvalues[2] == doctest::Approx(1.0));
  Eigen::Matrix3d perm;
  perm << 0, 0, 1, 0, 1, 0, 1, 0, 0;
  CHECK((e.eigenvectors - perm).cwiseAbs().maxCoeff() < 1e-12);
}

TEST_CASE("eigendecompose: 2x2 textbook case") {
  Eigen::Matrix2d m;
  m << 2, 1, 1, 2;
  const auto e = eigendecompose(SymMatrix(m));
  CHECK(e.eigenvalues[0] == doctest::Approx(3.0));
  CHECK(e.eigenvalues[1] == doctest::Approx(1.0));
  const double h = 1.0 / std::sqrt(2.0);
  CHECK(std::fabs(std::fabs(e.eigenvectors.col(0).dot(Eigen::Vector2d(h, h))) - 1.0) < 1e-12);
  CHECK(std::fabs(std::fabs(e.eigenvectors.col(1).dot(Eigen::Vector2d(h, -h))) - 1.0) < 1e-12);
}

TEST_CASE("eigendecompose: reconstruction and orthonormality on random input") {
  Engine rng(42);
  for (int trial = 0; trial < 20; ++trial) {
    const Eigen::MatrixXd m = random_symmetric(8, rng);
    const auto e = eigendecompose(SymMatrix(m));
    CHECK(relative_frobenius(e.reconstruct(), m) <= 1e-8);
    CHECK(orthonormality_error(e.eigenvectors) <= 1e-10);
    for (Eigen::Index j = 1; j < 8; ++j) CHECK(e.eigenvalues[j] <= e.eigenvalues[j - 1]);
  }
}

TEST_CASE("eigendecompose: non-finite entries are rejected") {
  Eigen::Matrix2d m;
  m << 1, NAN, NAN, 1;
  try {
    eigendecompose(SymMatrix(m));
    FAIL("expected an error");
  } catch (const Error& e) {
    CHECK(e.kind() == ErrorKind::InvalidInput);
  }
}

TEST_CASE("tracial_measure") {
  const auto mu = tracial_measure(eigendecompose(SymMatrix::diagonal(Eigen::Vector3d(3, 2, 1))));
  REQUIRE(mu.size() == 3);
  CHECK(mu.support()[0] == doctest::Approx(3.0));
  CHECK(mu.support()[2] == doctest::Approx(1.0));
  for (double w : mu.weights()) CHECK(w == doctest::Approx(1.0 / 3.0));
  CHECK(mu.mass() == doctest::Approx(1.0));

  const auto one = tracial_measure(eigendecompose(SymMatrix::diagonal(Eigen::VectorXd::Constant(1, 5.0))));
  REQUIRE(one.size() == 1);
  CHECK(one.support()[0] == 5.0);
  CHECK(one.weights()[0] == 1.0);
}

TEST_CASE("tracial_measure merges numerical ties") {
  // Merge-rule oracle: tolerance 1e-9 * (4 - 1 + 1); the first two atoms are
  // 1e-14 apart, the third is 3 away.
  const double tol = kMergeRelTol * (4.0 - 1.0 + 1.0);
  REQUIRE(1e-14 < tol);
  REQUIRE(3.0 > tol);
  const auto mu = tracial_measure(eigendecompose(SymMatrix::diagonal(Eigen::Vector3d(4.0, 4.0 - 1e-14, 1.0))));
  REQUIRE(mu.size() == 2);
  CHECK(mu.support()[0] == doctest::Approx(4.0));
  CHECK(mu.weights()[0] == doctest::Approx(2.0 / 3.0));
  CHECK(mu.weights()[1] == doctest::Approx(1.0 / 3.0));
}

TEST_CASE("DiscreteMeasure::from_atoms validates and sorts") {
  const auto mu = DiscreteMeasure::from_atoms({1.0, 3.0, 2.0}, {0.1, 0.3, 0.2});
  CHECK(mu.support() == std::vector<double>{3.0, 2.0, 1.0});
  CHECK(mu.weights() == std::vector<double>{0.3, 0.2, 0.1});
  CHECK_THROWS_AS(DiscreteMeasure::from_atoms({1.0}, {-0.5}), Error);
  CHECK_THROWS_AS(DiscreteMeasure::from_atoms({1.0, 2.0}, {0.5}), Error);
}

TEST_CASE("induced_measure examples") {
  const auto e = eigendecompose(SymMatrix::diagonal(Eigen::Vector2d(3.0, 1.0)));
  auto mu = induced_measure(e, Eigen::Vector2d(1.0, 0.0));
  CHECK(mu.weights()[0] == doctest::Approx(1.0));
  CHECK(mu.weights()[1] == doctest::Approx(0.0));

  mu = induced_measure(e, Eigen::Vector2d(2.0, 0.0));
  CHECK(mu.weights()[0] == doctest::Approx(4.0));
  CHECK(mu.mass() == doctest::Approx(4.0));

  mu = induced_measure(e, Eigen::Vector2d(1.0, 1.0) / std::sqrt(2.0));
  CHECK(mu.weights()[0] == doctest::Approx(0.5));
  CHECK(mu.weights()[1] == doctest::Approx(0.5));

  CHECK_THROWS_AS(induced_measure(e, Eigen::Vector3d(1, 0, 0)), Error);
}

TEST_CASE("measure_expectation examples") {
  const auto mu = DiscreteMeasure::from_atoms({2.0, 1.0}, {0.5, 0.5});
  CHECK(measure_expectation(mu, [](double s) { return s; }) == doctest::Approx(1.5));

  const Eigen::Vector2d diag(3.0, 1.0);
  const auto e = eigendecompose(SymMatrix::diagonal(diag));
  CHECK(measure_expectation(tracial_measure(e), [](double s) { return s * s; }) == doctest::Approx(5.0));

  // Direct matrix oracle: <psi, A^{-1} psi> by a linear solve.
  const Eigen::Vector2d psi(1.0, 1.0);
  const double oracle = psi.dot(Eigen::Matrix2d(diag.asDiagonal()).ldlt().solve(psi));
  CHECK(oracle == doctest::Approx(4.0 / 3.0));
  CHECK(measure_expectation(induced_measure(e, psi), [](double s) { return 1.0 / s; }) ==
        doctest::Approx(oracle).epsilon(1e-12));
}

TEST_CASE("moment examples and singular support") {
  const auto mu = tracial_measure(eigendecompose(SymMatrix::diagonal(Eigen::Vector2d(2.0, 1.0))));
  CHECK(moment(mu, -1) == doctest::Approx(0.75));
  CHECK(moment(mu, -2) == doctest::Approx(0.625));
  CHECK(moment(mu, 0) == doctest::Approx(mu.mass()));

  const auto with_zero = DiscreteMeasure::from_atoms({1.0, 0.0}, {0.5, 0.5});
  CHECK(moment(with_zero, 2) == doctest::Approx(0.5));
  try {
    moment(with_zero, -1);
    FAIL("expected SingularSupport");
  } catch (const Error& e) {
    CHECK(e.kind() == ErrorKind::SingularSupport);
  }
}

TEST_CASE("property: induced mass equals squared norm") {
  Engine rng(3);
  for (int trial = 0; trial < 50; ++trial) {
    const Eigen::Index d = 2 + trial % 12;
    const auto e = eigendecompose(SymMatrix(random_symmetric(d, rng)));
    const Eigen::VectorXd psi = random_vector(d, rng);
    CHECK(std::fabs(induced_measure(e, psi).mass() - psi.squaredNorm()) <= 1e-10 * psi.squaredNorm());
  }
}

TEST_CASE("property: expectations under induced measure are quadratic forms") {
  Engine rng(11);
  std::uniform_int_distribution<int> degree(0, 6);
  for (int trial = 0; trial < 50; ++trial) {
    const Eigen::MatrixXd a = random_symmetric(10, rng);
    const Eigen::VectorXd psi = random_vector(10, rng);
    const Eigen::VectorXd coef = random_vector(degree(rng) + 1, rng);
    const auto mu = induced_measure(eigendecompose(SymMatrix(a)), psi);
    const double via_measure = measure_expectation(mu, [&](double s) {
      double acc = 0.0;
      for (Eigen::Index k = coef.size() - 1; k >= 0; --k) acc = acc * s + coef[k];
      return acc;
    });
    const double oracle = quadratic_form_of_polynomial(a, coef, psi);
    // Scale of the terms being summed bounds the achievable relative accuracy.
    double scale = 0.0;
    const double norm_a = a.operatorNorm();
    for (Eigen::Index k = 0; k < coef.size(); ++k) scale += std::fabs(coef[k]) * std::pow(norm_a, double(k));
    scale *= psi.squaredNorm();
    CHECK(std::fabs(via_measure - oracle) <= 1e-8 * scale);
  }
}

TEST_CASE("property: tracial-inducing vector reproduces the tracial measure") {
  Engine rng(5);
  for (int trial = 0; trial < 30; ++trial) {
    const auto e = eigendecompose(SymMatrix(random_symmetric(2 + trial % 9, rng)));
    const auto induced = induced_measure(e, tracial_inducing_vector(e));
    const auto tracial = tracial_measure(e);
    REQUIRE(induced.size() == tracial.size());
    for (std::size_t j = 0; j < tracial.size(); ++j) {
      CHECK(std::fabs(induced.support()[j] - tracial.support()[j]) <= 1e-10);
      CHECK(std::fabs(induced.weights()[j] - tracial.weights()[j]) <= 1e-10);
    }
  }
}

TEST_CASE("property: rank-one update interlaces") {
  Engine rng(17);
  std::uniform_real_distribution<double> unit(0.0, 1.0);
  for (int trial = 0; trial < 100; ++trial) {
    const Eigen::Index d = 10;
    const Eigen::MatrixXd see = random_spd(d, rng);
    const Eigen::VectorXd b = random_vector(d, rng);
    const auto ve = eigendecompose(SymMatrix(see)).eigenvalues;
    const auto vx = eigendecompose(SymMatrix(see + b * b.transpose())).eigenvalues;
    const double tol = 1e-10 * ve[0];
    CHECK(vx[0] >= ve[0] - tol);
    for (Eigen::Index j = 1; j < d; ++j) {
      CHECK(vx[j] >= ve[j] - tol);
      CHECK(vx[j] <= ve[j - 1] + tol);
    }
    for (int k = 0; k < 20; ++k) {
      double lo = unit(rng) * vx[0], hi = unit(rng) * vx[0];
      if (lo > hi) std::swap(lo, hi);
      const auto ce = static_cast<long>(count_in(ve, lo, hi));
      const auto cx = static_cast<long>(count_in(vx, lo, hi));
      CHECK(std::labs(ce - cx) <= 1);
    }
  }
}

TEST_CASE("property: random unit vectors are asymptotically orthogonal") {
  Engine rng(23);
  for (Eigen::Index d : {50, 200, 800}) {
    const Eigen::VectorXd v = random_vector(d, rng).normalized();
    double sum = 0.0;
    for (int k = 0; k < 200; ++k) {
      const double ip = v.dot(random_vector(d, rng).normalized());
      sum += ip * ip;
    }
    CHECK(sum / 200.0 <= 5.0 / static_cast<double>(d));
  }
}

TEST_CASE("approx_equal ignores negligible atoms and detects differences") {
  const auto a = DiscreteMeasure::from_atoms({2.0, 1.0, 0.5}, {0.5, 0.5, 0.0});
  const auto b = DiscreteMeasure::from_atoms({2.0, 1.0}, {0.5, 0.5 + 1e-12});
  CHECK(approx_equal(a, b, 1e-9));
  const auto c = DiscreteMeasure::from_atoms({2.0, 1.0}, {0.4, 0.6});
  CHECK_FALSE(approx_equal(a, c, 1e-9));
}
