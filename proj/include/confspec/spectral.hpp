#pragma once

// Symmetric eigendecomposition and the two spectral measures built on it:
// the tracial measure (uniform over eigenvalues) and the measure induced by a
// vector psi (weight <psi, phi_j>^2 at eigenvalue lambda_j).

#include <Eigen/Dense>
#include <cmath>
#include <cstddef>
#include <span>
#include <vector>

#include "confspec/error.hpp"

namespace confspec::spectral {

// Atoms closer than kMergeRelTol * (max - min + 1) are merged.
inline constexpr double kMergeRelTol = 1e-9;

class SymMatrix {
 public:
  // Stores (m + m^T) / 2. Throws InvalidInput for an empty or non-square input.
  explicit SymMatrix(const Eigen::MatrixXd& m);

  static SymMatrix identity(Eigen::Index d);
  static SymMatrix diagonal(const Eigen::VectorXd& diag);

  Eigen::Index dim() const noexcept { return m_.rows(); }
  const Eigen::MatrixXd& matrix() const noexcept { return m_; }
  double operator()(Eigen::Index i, Eigen::Index j) const { return m_(i, j); }

 private:
  Eigen::MatrixXd m_;
};

struct EigenDecomposition {
  Eigen::VectorXd eigenvalues;   // descending
  Eigen::MatrixXd eigenvectors;  // column j pairs with eigenvalues[j]

  Eigen::Index dim() const noexcept { return eigenvalues.size(); }
  Eigen::MatrixXd reconstruct() const;
};

// Finite atomic measure on the real line. Support is kept strictly descending;
// the total mass need not be one.
class DiscreteMeasure {
 public:
  DiscreteMeasure() = default;

  // Sorts atoms descending and merges neighbours closer than merge_tol
  // (weights summed, location averaged). Negative or non-finite weights are
  // rejected.
  static DiscreteMeasure from_atoms(std::vector<double> support, std::vector<double> weights,
                                    double merge_tol = 0.0);

  const std::vector<double>& support() const noexcept { return support_; }
  const std::vector<double>& weights() const noexcept { return weights_; }
  std::size_t size() const noexcept { return support_.size(); }
  double mass() const noexcept;

  DiscreteMeasure scaled(double factor) const;

 private:
  std::vector<double> support_;
  std::vector<double> weights_;
};

// Merge tolerance for a set of support points under the default rule.
double merge_tolerance(std::span<const double> support, double rel = kMergeRelTol);

EigenDecomposition eigendecompose(const SymMatrix& m);

DiscreteMeasure tracial_measure(const EigenDecomposition& e, double merge_rel = kMergeRelTol);

DiscreteMeasure induced_measure(const EigenDecomposition& e, const Eigen::VectorXd& psi,
                                double merge_rel = kMergeRelTol);

// (1/sqrt(d)) sum_j phi_j; induces the tracial measure.
Eigen::VectorXd tracial_inducing_vector(const EigenDecomposition& e);

template <class F>
double measure_expectation(const DiscreteMeasure& mu, F&& f) {
  double s = 0.0;
  const auto& x = mu.support();
  const auto& w = mu.weights();
  for (std::size_t j = 0; j < x.size(); ++j) s += w[j] * f(x[j]);
  return s;
}

// sum_j w_j x_j^k. Negative k with an atom at zero throws SingularSupport.
double moment(const DiscreteMeasure& mu, int k);

// f(A) = Phi diag(f(lambda)) Phi^T.
template <class F>
Eigen::MatrixXd apply_function(const EigenDecomposition& e, F&& f) {
  Eigen::VectorXd fl(e.dim());
  for (Eigen::Index j = 0; j < e.dim(); ++j) fl[j] = f(e.eigenvalues[j]);
  return e.eigenvectors * fl.asDiagonal() * e.eigenvectors.transpose();
}

// Atomwise comparison: atoms with weight <= tol * max(1, mass) are ignored,
// remaining atoms must pair up with support and weight within tol (relative
// to the support scale and the mass respectively).
bool approx_equal(const DiscreteMeasure& a, const DiscreteMeasure& b, double tol);

// Largest atomwise discrepancy under the same pairing; +inf if atom counts differ.
double atomwise_discrepancy(const DiscreteMeasure& a, const DiscreteMeasure& b, double weight_floor);

}  // namespace confspec::spectral
