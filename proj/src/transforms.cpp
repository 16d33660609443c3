#include "confspec/transforms.hpp"

#include <algorithm>
#include <cmath>

namespace confspec::transforms {
namespace {

Conversion clamped(double raw, const char* what) {
  Conversion out{raw, {}};
  if (raw < 0.0 || raw > 1.0) {
    out.value = std::clamp(raw, 0.0, 1.0);
    out.warning = std::string(what) + " evaluated to " + std::to_string(raw) + ", clamped to [0, 1]";
  }
  return out;
}

}  // namespace

ComplexPoint::ComplexPoint(double re, double im) : re_(re), im_(im) {
  if (!(im > 0.0) || !std::isfinite(re) || !std::isfinite(im)) {
    fail(ErrorKind::InvalidInput, "Cauchy transform needs a point with positive imaginary part");
  }
}

std::complex<double> cauchy_transform(const DiscreteMeasure& mu, const ComplexPoint& z) {
  std::complex<double> s{0.0, 0.0};
  for (std::size_t j = 0; j < mu.size(); ++j) s += mu.weights()[j] / (z.value() - mu.support()[j]);
  return s;
}

DiscreteMeasure rank_one_perturb(const DiscreteMeasure& mu) {
  const auto m = static_cast<Eigen::Index>(mu.size());
  if (m == 0) return mu;
  Eigen::VectorXd x(m);
  Eigen::VectorXd u(m);
  for (Eigen::Index j = 0; j < m; ++j) {
    x[j] = mu.support()[static_cast<std::size_t>(j)];
    u[j] = std::sqrt(mu.weights()[static_cast<std::size_t>(j)]);
  }
  const SymMatrix b(Eigen::MatrixXd(x.asDiagonal()) + u * u.transpose());
  return spectral::induced_measure(spectral::eigendecompose(b), u);
}

DiscreteMeasure multiplication_map(const DiscreteMeasure& mu) {
  std::vector<double> weights(mu.size());
  for (std::size_t j = 0; j < mu.size(); ++j) {
    const double x = mu.support()[j];
    if (x == 0.0) fail(ErrorKind::SingularSupport, "multiplication map undefined at an atom at 0");
    weights[j] = mu.weights()[j] / (x * x);
  }
  return DiscreteMeasure::from_atoms(mu.support(), std::move(weights));
}

DiscreteMeasure confounding_measure_identity(const SymMatrix& sigma_ee, const Eigen::VectorXd& b,
                                             double c) {
  if (b.size() != sigma_ee.dim()) fail(ErrorKind::InvalidInput, "b has wrong length");
  const Eigen::MatrixXd sxx = sigma_ee.matrix() + b * b.transpose();
  Eigen::SelfAdjointEigenSolver<Eigen::MatrixXd> check(sxx, Eigen::EigenvaluesOnly);
  const double lo = check.eigenvalues().minCoeff();
  const double hi = check.eigenvalues().maxCoeff();
  if (!(lo > 1e-12 * std::max(hi, 0.0))) {
    fail(ErrorKind::SingularCovariance, "Sigma_EE + b b^T is singular");
  }
  const auto mu_eb = spectral::induced_measure(spectral::eigendecompose(sigma_ee), b);
  return multiplication_map(rank_one_perturb(mu_eb)).scaled(c * c);
}

double asymptotic_beta(const DiscreteMeasure& mu_inf, double r_a, double r_b, double c) {
  if (!(r_a >= 0.0)) fail(ErrorKind::InvalidInput, "r_a must be nonnegative");
  for (double x : mu_inf.support()) {
    if (!(x > 0.0)) fail(ErrorKind::InvalidInput, "limit measure needs positive support");
  }
  const double m = multiplication_map(rank_one_perturb(mu_inf.scaled(r_b * r_b))).mass();
  const double num = c * c * m;
  const double den = num + r_a * r_a;
  return den == 0.0 ? 0.0 : num / den;
}

void SpectralMoments::validate() const {
  if (!(m_minus1 > 0.0) || !(m_minus2 > 0.0)) {
    fail(ErrorKind::InvalidInput, "negative moments must be positive");
  }
  if (!(norm_sxy_sq > 0.0) || !(norm_ahat_sq > 0.0)) {
    fail(ErrorKind::InvalidInput, "norms must be positive");
  }
}

Conversion gamma_to_beta(double gamma, const SpectralMoments& m) {
  m.validate();
  if (!(gamma >= 0.0 && gamma <= 1.0)) fail(ErrorKind::InvalidInput, "gamma must lie in [0, 1]");
  const double x = gamma * m.norm_sxy_sq;
  const double denom = 1.0 + m.m_minus1 * x;
  return clamped(m.m_minus2 * x / (m.norm_ahat_sq * denom * denom), "beta");
}

Conversion beta_to_gamma(double beta, const SpectralMoments& m) {
  m.validate();
  if (!(beta >= 0.0 && beta <= 1.0)) fail(ErrorKind::InvalidInput, "beta must lie in [0, 1]");
  if (beta == 0.0) return {0.0, {}};
  const double theta_sq = beta * m.norm_ahat_sq;
  const double disc = m.m_minus2 - 4.0 * m.m_minus1 * theta_sq;
  if (disc < 0.0) {
    fail(ErrorKind::OutOfDomain, "m_-2 < 4 m_-1 beta ||a_hat||^2: beta is inconsistent with the spectrum");
  }
  const double root = std::sqrt(m.m_minus2) + std::sqrt(disc);
  return clamped(root * root / (4.0 * m.m_minus1 * m.m_minus1 * theta_sq * m.norm_sxy_sq), "gamma");
}

}  // namespace confspec::transforms
