#include "confspec/verify.hpp"

#include <algorithm>
#include <array>
#include <cmath>
#include <cstdio>
#include <limits>
#include <random>
#include <sstream>

#include "confspec/estimator.hpp"
#include "confspec/scm.hpp"
#include "confspec/simd.hpp"
#include "confspec/stats.hpp"
#include "confspec/transforms.hpp"

namespace confspec::verify {
namespace {

using spectral::DiscreteMeasure;
using spectral::SymMatrix;

class Suite {
 public:
  Suite(std::string name, std::vector<CheckResult>& out) : name_(std::move(name)), out_(out) {}

  void at_most(const std::string& check, double measured, double threshold) { add(check, measured, threshold, true); }
  void at_least(const std::string& check, double measured, double threshold) { add(check, measured, threshold, false); }

 private:
  void add(const std::string& check, double measured, double threshold, bool below) {
    const bool ok = std::isfinite(measured) && (below ? measured <= threshold : measured >= threshold);
    out_.push_back({name_, check, measured, threshold, below, ok});
  }

  std::string name_;
  std::vector<CheckResult>& out_;
};

Eigen::MatrixXd gaussian_matrix(Eigen::Index r, Eigen::Index c, Engine& rng) {
  std::normal_distribution<double> normal(0.0, 1.0);
  Eigen::MatrixXd m(r, c);
  for (Eigen::Index i = 0; i < r; ++i) {
    for (Eigen::Index j = 0; j < c; ++j) m(i, j) = normal(rng);
  }
  return m;
}

Eigen::MatrixXd spd(Eigen::Index d, Engine& rng) {
  const Eigen::MatrixXd g = gaussian_matrix(d, d, rng);
  return g * g.transpose() / static_cast<double>(d) + 0.5 * Eigen::MatrixXd::Identity(d, d);
}

Eigen::MatrixXd haar(Eigen::Index d, Engine& rng) {
  Eigen::HouseholderQR<Eigen::MatrixXd> qr(gaussian_matrix(d, d, rng));
  Eigen::MatrixXd q = qr.householderQ();
  for (Eigen::Index j = 0; j < d; ++j) {
    if (qr.matrixQR()(j, j) < 0) q.col(j) *= -1.0;
  }
  return q;
}

DiscreteMeasure induced(const Eigen::MatrixXd& a, const Eigen::VectorXd& psi) {
  return spectral::induced_measure(spectral::eigendecompose(SymMatrix(a)), psi);
}

// Largest ratio of consecutive medians; < 1 means strictly decreasing.
double worst_ratio(const std::vector<double>& medians) {
  double worst = 0.0;
  for (std::size_t i = 1; i < medians.size(); ++i) worst = std::max(worst, medians[i] / medians[i - 1]);
  return worst;
}

void spectral_suite(const VerifyOptions& o, int trials, std::vector<CheckResult>& out) {
  Suite s("spectral", out);
  Engine rng = make_engine(o.seed, 1);
  double recon = 0.0, ortho = 0.0, norm = 0.0, quad_form = 0.0, tracial = 0.0;
  for (int t = 0; t < trials; ++t) {
    const Eigen::MatrixXd g = gaussian_matrix(10, 10, rng);
    const Eigen::MatrixXd a = 0.5 * (g + g.transpose());
    const auto e = spectral::eigendecompose(SymMatrix(a));
    recon = std::max(recon, (e.reconstruct() - a).norm() / a.norm());
    ortho = std::max(ortho, (e.eigenvectors.transpose() * e.eigenvectors - Eigen::MatrixXd::Identity(10, 10))
                                .cwiseAbs()
                                .maxCoeff());
    const Eigen::VectorXd psi = gaussian_matrix(10, 1, rng);
    const auto mu = spectral::induced_measure(e, psi);
    norm = std::max(norm, std::fabs(mu.mass() - psi.squaredNorm()) / psi.squaredNorm());

    // Cubic polynomial expectation against direct matrix products.
    const Eigen::VectorXd coef = gaussian_matrix(4, 1, rng);
    const double via_measure = spectral::measure_expectation(
        mu, [&](double x) { return coef[0] + x * (coef[1] + x * (coef[2] + x * coef[3])); });
    Eigen::VectorXd acc = Eigen::VectorXd::Zero(10);
    for (int k = 3; k >= 0; --k) acc = a * acc + coef[k] * psi;
    const double scale = coef.cwiseAbs().sum() * std::pow(std::max(1.0, a.operatorNorm()), 3) * psi.squaredNorm();
    quad_form = std::max(quad_form, std::fabs(via_measure - psi.dot(acc)) / scale);

    const auto ti = spectral::induced_measure(e, spectral::tracial_inducing_vector(e));
    tracial = std::max(tracial, spectral::atomwise_discrepancy(ti, spectral::tracial_measure(e), 0.0));
  }
  s.at_most("eigen reconstruction residual (relative Frobenius)", recon, o.eigen_tolerance);
  s.at_most("eigenvector orthonormality error", ortho, 1e-10);
  s.at_most("induced mass equals squared norm (relative)", norm, 1e-10);
  s.at_most("expectation equals quadratic form of f(A) (relative)", quad_form, 1e-8);
  s.at_most("tracial-inducing vector reproduces tracial measure", tracial, 1e-10);

  double interlace = 0.0, count_gap = 0.0;
  std::uniform_real_distribution<double> unit(0.0, 1.0);
  for (int t = 0; t < trials; ++t) {
    const Eigen::MatrixXd see = spd(10, rng);
    const Eigen::VectorXd b = gaussian_matrix(10, 1, rng);
    const auto ve = spectral::eigendecompose(SymMatrix(see)).eigenvalues;
    const auto vx = spectral::eigendecompose(SymMatrix(see + b * b.transpose())).eigenvalues;
    interlace = std::max(interlace, (ve[0] - vx[0]) / ve[0]);
    for (Eigen::Index j = 1; j < 10; ++j) {
      interlace = std::max({interlace, (ve[j] - vx[j]) / ve[0], (vx[j] - ve[j - 1]) / ve[0]});
    }
    for (int k = 0; k < 10; ++k) {
      double lo = unit(rng) * vx[0], hi = unit(rng) * vx[0];
      if (lo > hi) std::swap(lo, hi);
      long ce = 0, cx = 0;
      for (Eigen::Index j = 0; j < 10; ++j) {
        ce += (ve[j] >= lo && ve[j] <= hi);
        cx += (vx[j] >= lo && vx[j] <= hi);
      }
      count_gap = std::max(count_gap, static_cast<double>(std::labs(ce - cx)));
    }
  }
  s.at_most("interlacing violation (relative)", interlace, 1e-10);
  s.at_most("interval eigenvalue count difference", count_gap, 1.0);

  double orth_ratio = 0.0;
  for (Eigen::Index d : {50, 200, 800}) {
    const Eigen::VectorXd v = scm::random_unit_vector(d, rng);
    double sum = 0.0;
    for (int k = 0; k < 200; ++k) sum += std::pow(v.dot(scm::random_unit_vector(d, rng)), 2);
    orth_ratio = std::max(orth_ratio, (sum / 200.0) / (5.0 / static_cast<double>(d)));
  }
  s.at_most("mean <v, c>^2 relative to 5/d", orth_ratio, 1.0);
}

void scm_suite(const VerifyOptions& o, int trials, int convergence_seeds, std::vector<CheckResult>& out) {
  Suite s("scm", out);
  double identity = 0.0, bounds = 0.0, rescale = 0.0;
  for (int t = 0; t < trials; ++t) {
    auto rng = make_engine(o.seed, 1000 + static_cast<std::uint64_t>(t));
    const auto p = scm::sample_params(2 + t % 10, rng);
    const auto sxx = scm::true_sigma_xx(p);
    const auto truth = scm::ground_truth(p);
    const Eigen::VectorXd got = scm::regression_vector(sxx, scm::true_sigma_xy(p));
    identity = std::max(identity, (got - truth.a_hat_pop).cwiseAbs().maxCoeff() /
                                      std::max(1.0, truth.a_hat_pop.cwiseAbs().maxCoeff()));
    const bool inside = truth.beta >= 0 && truth.beta <= 1 && truth.gamma >= 0 && truth.gamma <= 1;
    bounds += inside ? 0.0 : 1.0;

    scm::ModelParams q = p;
    q.b = 0.5 * p.b;
    q.c = 2.0 * p.c;
    q.sigma_ee = SymMatrix(sxx.matrix() - q.b * q.b.transpose());
    rescale = std::max(rescale, std::fabs(scm::ground_truth(q).gamma - truth.gamma));
  }
  s.at_most("regression vector equals a + c Sigma_XX^{-1} b (relative)", identity, 1e-10);
  s.at_most("strengths outside [0, 1]", bounds, 0.0);
  s.at_most("gamma change under (b, c) -> (b / 2, 2 c)", rescale, 1e-12);

  // Moments of mu_{Sigma_XX, a} / r_a^2 approach the tracial moments.
  const std::vector<double> pattern{0.5, 1.0, 1.5, 2.0, 2.5};
  std::array<std::vector<double>, 3> medians;
  for (Eigen::Index d : {25, 100, 400}) {
    std::array<std::vector<double>, 3> devs;
    for (int sd = 0; sd < convergence_seeds; ++sd) {
      auto rng = make_engine(o.seed, 50000 + static_cast<std::uint64_t>(d) * 1000 + static_cast<std::uint64_t>(sd));
      std::uniform_real_distribution<double> unit(0.0, 1.0);
      Eigen::VectorXd diag(d);
      for (Eigen::Index i = 0; i < d; ++i) diag[i] = pattern[static_cast<std::size_t>(i) % pattern.size()];
      const double ra = unit(rng), rb = unit(rng);
      const Eigen::VectorXd a = ra * scm::random_unit_vector(d, rng);
      const Eigen::VectorXd b = rb * scm::random_unit_vector(d, rng);
      const auto e = spectral::eigendecompose(SymMatrix(Eigen::MatrixXd(diag.asDiagonal()) + b * b.transpose()));
      const auto mu = spectral::induced_measure(e, a);
      const auto tr = spectral::tracial_measure(e);
      for (int k = 1; k <= 3; ++k) {
        devs[static_cast<std::size_t>(k - 1)].push_back(
            std::fabs(spectral::moment(mu, k) / (ra * ra) - spectral::moment(tr, k)));
      }
    }
    for (int k = 0; k < 3; ++k) medians[static_cast<std::size_t>(k)].push_back(stats::median(devs[static_cast<std::size_t>(k)]));
  }
  for (int k = 0; k < 3; ++k) {
    s.at_most("moment " + std::to_string(k + 1) + " deviation: worst median ratio over d = 25, 100, 400",
              worst_ratio(medians[static_cast<std::size_t>(k)]), 0.999999);
  }
}

void estimator_suite(const VerifyOptions& o, int trials, int consistency_seeds, std::vector<CheckResult>& out) {
  Suite s("estimator", out);
  Engine rng = make_engine(o.seed, 2);
  double norm = 0.0, floor_violation = 0.0, sensitivity = std::numeric_limits<double>::infinity();
  for (int t = 0; t < trials; ++t) {
    const auto eig = spectral::eigendecompose(SymMatrix(spd(8, rng))).eigenvalues;
    for (int bi = 0; bi < 6; ++bi) {
      for (int ei = 0; ei < 6; ++ei) {
        const double beta = estimator::grid_point(bi, 6, 1.0);
        const auto f = estimator::family_weights(eig, beta, estimator::grid_point(ei, 6, eig[0]));
        norm = std::max(norm, std::fabs(f.weights.sum() - 1.0));
        floor_violation = std::max(floor_violation, (1.0 - beta) / 8.0 - f.weights.minCoeff());
      }
    }
    const auto lo = estimator::family_weights(eig, 1.0, 0.0).weights;
    const auto hi = estimator::family_weights(eig, 1.0, eig[0]).weights;
    sensitivity = std::min(sensitivity, (lo - hi).cwiseAbs().maxCoeff());
  }
  s.at_most("family weights sum to 1", norm, 1e-10);
  s.at_most("causal floor violation", floor_violation, 1e-12);
  s.at_least("confounded weights change between eta = 0 and eta = v_1", sensitivity, 1e-12);

  double scale_mismatch = 0.0;
  estimator::GridConfig small_grid;
  small_grid.beta_steps = 21;
  small_grid.eta_steps = 21;
  for (int t = 0; t < std::max(2, trials / 5); ++t) {
    const SymMatrix sxx(spd(6, rng));
    const Eigen::VectorXd sxy = gaussian_matrix(6, 1, rng);
    const auto base = estimator::estimate(sxx, sxy, small_grid);
    const auto scaled = estimator::estimate(sxx, 37.0 * sxy, small_grid);
    scale_mismatch += (base.beta_index != scaled.beta_index || base.eta_index != scaled.eta_index) ? 1.0 : 0.0;
  }
  s.at_most("grid index changes when y is rescaled", scale_mismatch, 0.0);

  std::vector<double> medians;
  for (Eigen::Index d : {20, 80, 320}) {
    std::vector<double> dists;
    for (int sd = 0; sd < consistency_seeds; ++sd) {
      auto r = make_engine(o.seed, 90000 + static_cast<std::uint64_t>(d) * 1000 + static_cast<std::uint64_t>(sd));
      std::uniform_real_distribution<double> unit(0.0, 1.0);
      Eigen::VectorXd spectrum(d);
      for (Eigen::Index i = 0; i < d; ++i) spectrum[i] = 0.5 + 1.5 * static_cast<double>(i % 7) / 6.0;
      const Eigen::MatrixXd q = haar(d, r);
      scm::ModelParams p;
      p.sigma_ee = SymMatrix(q * spectrum.asDiagonal() * q.transpose());
      p.a = unit(r) * scm::random_unit_vector(d, r);
      p.b = unit(r) * scm::random_unit_vector(d, r);
      p.c = 1.0;
      const auto truth = scm::ground_truth(p);
      const auto obs = estimator::observed_weights(scm::true_sigma_xx(p), truth.a_hat_pop);
      const auto f = estimator::family_weights(obs.eigenvalues, std::round(truth.beta * 100.0) / 100.0,
                                               std::min(truth.eta, obs.eigenvalues[0]));
      dists.push_back(estimator::distance(obs.weights, f.weights, estimator::smoothing_matrix(obs.eigenvalues)) /
                      static_cast<double>(d));
    }
    medians.push_back(stats::median(dists));
  }
  s.at_most("family fit distance per eigenvalue: worst median ratio over d = 20, 80, 320", worst_ratio(medians), 0.999999);
}

void transforms_suite(const VerifyOptions& o, int trials, std::vector<CheckResult>& out) {
  Suite s("transforms", out);
  Engine rng = make_engine(o.seed, 3);
  std::uniform_real_distribution<double> unit(0.0, 1.0);
  double r_err = 0.0, m_err = 0.0, c_err = 0.0, ak = 0.0, mass = 0.0;
  for (int t = 0; t < trials; ++t) {
    const Eigen::MatrixXd a = spd(10, rng);
    const Eigen::VectorXd psi = gaussian_matrix(10, 1, rng);
    const double floor = o.identity_tolerance * std::max(1.0, psi.squaredNorm());
    const auto mu = induced(a, psi);
    const auto r = transforms::rank_one_perturb(mu);
    r_err = std::max(r_err, spectral::atomwise_discrepancy(r, induced(a + psi * psi.transpose(), psi), floor));
    mass = std::max(mass, std::fabs(r.mass() - mu.mass()) / mu.mass());
    m_err = std::max(m_err, spectral::atomwise_discrepancy(transforms::multiplication_map(mu),
                                                           induced(a, a.ldlt().solve(psi)), floor));
    const double c = 0.2 + unit(rng);
    const Eigen::MatrixXd sxx = a + psi * psi.transpose();
    c_err = std::max(c_err, spectral::atomwise_discrepancy(
                                transforms::confounding_measure_identity(SymMatrix(a), psi, c),
                                induced(sxx, c * sxx.ldlt().solve(psi)), floor));
    for (int k = 0; k < 20; ++k) {
      const transforms::ComplexPoint z(8.0 * unit(rng) - 2.0, 0.05 + 2.0 * unit(rng));
      const auto f = transforms::cauchy_transform(mu, z);
      ak = std::max(ak, std::abs(transforms::cauchy_transform(r, z) - f / (1.0 - f)));
    }
  }
  s.at_most("R(mu_{A,psi}) vs mu_{A + psi psi^T, psi}", r_err, o.identity_tolerance);
  s.at_most("M(mu_{A,psi}) vs mu_{A, A^{-1} psi}", m_err, o.identity_tolerance);
  s.at_most("c^2 M[R[mu_{E,b}]] vs mu_{X, c X^{-1} b}", c_err, o.identity_tolerance);
  s.at_most("Aronszajn-Krein |F_R - F / (1 - F)|", ak, o.identity_tolerance);
  s.at_most("R mass conservation (relative)", mass, 1e-10);

  const auto limit = DiscreteMeasure::from_atoms({3.0, 2.0, 1.0}, {1.0 / 3, 1.0 / 3, 1.0 / 3});
  const auto r_lim = transforms::rank_one_perturb(limit);
  const auto m_lim = transforms::multiplication_map(limit);
  std::vector<std::vector<double>> errs(6);
  for (int d : {10, 100, 1000}) {
    Eigen::VectorXd diag(d);
    for (int i = 0; i < d; ++i) diag[i] = 1.0 + (i % 3) + static_cast<double>(i) / (static_cast<double>(d) * d);
    const auto nu = spectral::tracial_measure(spectral::eigendecompose(SymMatrix::diagonal(diag)));
    const auto r = transforms::rank_one_perturb(nu);
    const auto m = transforms::multiplication_map(nu);
    for (int k = 1; k <= 3; ++k) {
      errs[static_cast<std::size_t>(k - 1)].push_back(std::fabs(spectral::moment(r, k) - spectral::moment(r_lim, k)));
      const int km = k == 1 ? 1 : k + 1;  // moment 2 of M(nu) is the mass of nu
      errs[static_cast<std::size_t>(k + 2)].push_back(std::fabs(spectral::moment(m, km) - spectral::moment(m_lim, km)));
    }
  }
  double weak = 0.0;
  for (const auto& e : errs) weak = std::max(weak, worst_ratio(e));
  s.at_most("weak continuity: worst moment-error ratio over d = 10, 100, 1000", weak, 0.999999);

  const auto delta1 = DiscreteMeasure::from_atoms({1.0}, {1.0});
  for (Eigen::Index d : {50, 200}) {
    std::vector<double> gaps;
    for (int sd = 0; sd < trials; ++sd) {
      auto r = make_engine(o.seed, 70000 + static_cast<std::uint64_t>(d) * 1000 + static_cast<std::uint64_t>(sd));
      scm::ModelParams p;
      p.sigma_ee = SymMatrix::identity(d);
      p.c = unit(r);
      const double ra = unit(r), rb = unit(r);
      p.a = ra * scm::random_unit_vector(d, r);
      p.b = rb * scm::random_unit_vector(d, r);
      gaps.push_back(std::fabs(transforms::asymptotic_beta(delta1, ra, rb, p.c) - scm::ground_truth(p).beta));
    }
    s.at_most("median |asymptotic beta - beta| at d = " + std::to_string(d), stats::median(gaps), 0.05);
  }

  double roundtrip = 0.0;
  int done = 0;
  while (done < 10 * trials) {
    const transforms::SpectralMoments m{0.2 + 2.0 * unit(rng), 0.1 + 3.0 * unit(rng), 0.1 + 5.0 * unit(rng),
                                        0.1 + 5.0 * unit(rng)};
    const double gamma = unit(rng);
    if (m.m_minus1 * gamma * m.norm_sxy_sq < 1.0) continue;
    const auto beta = transforms::gamma_to_beta(gamma, m);
    if (!beta.warning.empty()) continue;
    roundtrip = std::max(roundtrip, std::fabs(transforms::beta_to_gamma(beta.value, m).value - gamma));
    ++done;
  }
  s.at_most("beta_to_gamma(gamma_to_beta(gamma)) - gamma", roundtrip, 1e-8);
}

void simd_suite(const VerifyOptions& o, std::vector<CheckResult>& out) {
  Suite s("simd", out);
  Engine rng = make_engine(o.seed, 4);
  const auto& ref = simd::scalar_kernels();
  double worst = 0.0;
  for (const auto* k : simd::available_kernels()) {
    for (std::size_t n : {1u, 3u, 4u, 7u, 16u, 33u, 101u}) {
      const Eigen::VectorXd a = gaussian_matrix(static_cast<Eigen::Index>(n), 1, rng);
      const Eigen::VectorXd b = gaussian_matrix(static_cast<Eigen::Index>(n), 1, rng);
      worst = std::max(worst, std::fabs(k->dot(a.data(), b.data(), n) - ref.dot(a.data(), b.data(), n)));
      worst = std::max(worst, std::fabs(k->abs_sum_axpy(a.data(), 0.3, b.data(), n) -
                                        ref.abs_sum_axpy(a.data(), 0.3, b.data(), n)));
    }
  }
  s.at_most("max |variant - scalar| over kernels (" + std::string(simd::active_kernels().name) + " active)",
            worst, 1e-12);
}

}  // namespace

std::vector<CheckResult> run_verification(const VerifyOptions& opts) {
  const bool full = opts.size == Size::Full;
  const int trials = full ? 50 : 10;
  std::vector<CheckResult> out;
  spectral_suite(opts, trials, out);
  scm_suite(opts, trials, 100, out);
  estimator_suite(opts, trials, full ? 40 : 12, out);
  transforms_suite(opts, trials, out);
  simd_suite(opts, out);
  return out;
}

std::string format_report(const std::vector<CheckResult>& results) {
  std::ostringstream os;
  for (const auto& r : results) {
    char buf[64];
    std::snprintf(buf, sizeof buf, "%.3e %s %.3e", r.measured, r.below ? "<=" : ">=", r.threshold);
    os << (r.passed ? "PASS " : "FAIL ") << '[' << r.suite << "] " << r.name << ": " << buf << '\n';
  }
  const auto failed = std::count_if(results.begin(), results.end(), [](const CheckResult& r) { return !r.passed; });
  os << results.size() - static_cast<std::size_t>(failed) << '/' << results.size() << " checks passed\n";
  return os.str();
}

bool all_passed(const std::vector<CheckResult>& results) {
  return std::all_of(results.begin(), results.end(), [](const CheckResult& r) { return r.passed; });
}

}  // namespace confspec::verify
