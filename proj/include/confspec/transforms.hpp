#pragma once

// Finite-dimensional measure transforms: Cauchy transform, rank-one
// perturbation map R, multiplication map M, and the approximate conversions
// between correlative (gamma) and structural (beta) confounding strength.

#include <Eigen/Dense>
#include <complex>
#include <string>

#include "confspec/spectral.hpp"

namespace confspec::transforms {

using spectral::DiscreteMeasure;
using spectral::SymMatrix;

// Point of the open upper half plane.
class ComplexPoint {
 public:
  ComplexPoint(double re, double im);
  double re() const noexcept { return re_; }
  double im() const noexcept { return im_; }
  std::complex<double> value() const noexcept { return {re_, im_}; }

 private:
  double re_;
  double im_;
};

// F(z) = sum_j w_j / (z - x_j)
std::complex<double> cauchy_transform(const DiscreteMeasure& mu, const ComplexPoint& z);

// R(nu) = mu_{B, u} with B = diag(x) + u u^T, u_j = sqrt(w_j): the spectral
// measure of the rank-one perturbed multiplication operator, induced by the
// constant function 1.
DiscreteMeasure rank_one_perturb(const DiscreteMeasure& mu);

// Same support, weights w_j / x_j^2. SingularSupport on an atom at zero.
DiscreteMeasure multiplication_map(const DiscreteMeasure& mu);

// c^2 M[R[mu_{Sigma_EE, b}]], which equals mu_{Sigma_XX, c Sigma_XX^{-1} b}.
DiscreteMeasure confounding_measure_identity(const SymMatrix& sigma_ee, const Eigen::VectorXd& b,
                                             double c);

// beta = c^2 m / (c^2 m + r_a^2) with m the mass of M[R[r_b^2 mu_inf]].
double asymptotic_beta(const DiscreteMeasure& mu_inf, double r_a, double r_b, double c);

struct SpectralMoments {
  double m_minus1 = 0.0;     // tau(Sigma_XX^{-1})
  double m_minus2 = 0.0;     // tau(Sigma_XX^{-2})
  double norm_sxy_sq = 0.0;  // ||Sigma_XY||^2
  double norm_ahat_sq = 0.0; // ||a_hat||^2

  void validate() const;
};

struct Conversion {
  double value = 0.0;
  std::string warning;  // non-empty when the raw value was clamped
};

Conversion gamma_to_beta(double gamma, const SpectralMoments& m);

// Inverse of gamma_to_beta on its principal branch. Throws OutOfDomain when
// m_{-2} < 4 m_{-1} beta ||a_hat||^2.
Conversion beta_to_gamma(double beta, const SpectralMoments& m);

}  // namespace confspec::transforms
