#include "confspec/spectral.hpp"

#include <algorithm>
#include <limits>
#include <numeric>

namespace confspec::spectral {

SymMatrix::SymMatrix(const Eigen::MatrixXd& m) {
  if (m.rows() == 0 || m.rows() != m.cols()) {
    fail(ErrorKind::InvalidInput, "SymMatrix needs a non-empty square matrix, got " +
                                      std::to_string(m.rows()) + "x" + std::to_string(m.cols()));
  }
  m_ = 0.5 * (m + m.transpose());
}

SymMatrix SymMatrix::identity(Eigen::Index d) {
  return SymMatrix(Eigen::MatrixXd::Identity(d, d));
}

SymMatrix SymMatrix::diagonal(const Eigen::VectorXd& diag) {
  return SymMatrix(Eigen::MatrixXd(diag.asDiagonal()));
}

Eigen::MatrixXd EigenDecomposition::reconstruct() const {
  return eigenvectors * eigenvalues.asDiagonal() * eigenvectors.transpose();
}

DiscreteMeasure DiscreteMeasure::from_atoms(std::vector<double> support, std::vector<double> weights,
                                            double merge_tol) {
  if (support.size() != weights.size()) {
    fail(ErrorKind::InvalidInput, "support and weights differ in length");
  }
  for (std::size_t j = 0; j < support.size(); ++j) {
    if (!std::isfinite(support[j]) || !std::isfinite(weights[j])) {
      fail(ErrorKind::InvalidInput, "non-finite atom");
    }
    if (weights[j] < 0.0) fail(ErrorKind::InvalidInput, "negative atom weight");
  }

  std::vector<std::size_t> order(support.size());
  std::iota(order.begin(), order.end(), std::size_t{0});
  std::stable_sort(order.begin(), order.end(),
                   [&](std::size_t i, std::size_t j) { return support[i] > support[j]; });

  DiscreteMeasure out;
  std::size_t cluster_size = 0;
  double cluster_sum = 0.0;
  for (std::size_t k = 0; k < order.size(); ++k) {
    const double x = support[order[k]];
    const double w = weights[order[k]];
    const bool joins = cluster_size > 0 && (out.support_.back() - x) <= merge_tol &&
                       (support[order[k - 1]] - x) <= merge_tol;
    if (joins) {
      cluster_sum += x;
      ++cluster_size;
      out.support_.back() = cluster_sum / static_cast<double>(cluster_size);
      out.weights_.back() += w;
    } else {
      out.support_.push_back(x);
      out.weights_.push_back(w);
      cluster_sum = x;
      cluster_size = 1;
    }
  }
  return out;
}

double DiscreteMeasure::mass() const noexcept {
  return std::accumulate(weights_.begin(), weights_.end(), 0.0);
}

DiscreteMeasure DiscreteMeasure::scaled(double factor) const {
  if (!(factor >= 0.0)) fail(ErrorKind::InvalidInput, "measure scale factor must be nonnegative");
  DiscreteMeasure out = *this;
  for (double& w : out.weights_) w *= factor;
  return out;
}

double merge_tolerance(std::span<const double> support, double rel) {
  if (support.empty()) return 0.0;
  const auto [lo, hi] = std::minmax_element(support.begin(), support.end());
  return rel * (*hi - *lo + 1.0);
}

EigenDecomposition eigendecompose(const SymMatrix& m) {
  if (!m.matrix().allFinite()) fail(ErrorKind::InvalidInput, "matrix has non-finite entries");

  Eigen::SelfAdjointEigenSolver<Eigen::MatrixXd> solver(m.matrix(), Eigen::ComputeEigenvectors);
  if (solver.info() != Eigen::Success) {
    fail(ErrorKind::InvalidInput, "eigendecomposition did not converge");
  }
  const Eigen::Index d = m.dim();
  EigenDecomposition e;
  e.eigenvalues = solver.eigenvalues().reverse();
  e.eigenvectors = solver.eigenvectors().rowwise().reverse();

  // Sign convention: the largest-magnitude component of each eigenvector is positive.
  for (Eigen::Index j = 0; j < d; ++j) {
    Eigen::Index arg = 0;
    e.eigenvectors.col(j).cwiseAbs().maxCoeff(&arg);
    if (e.eigenvectors(arg, j) < 0.0) e.eigenvectors.col(j) *= -1.0;
  }
  return e;
}

DiscreteMeasure tracial_measure(const EigenDecomposition& e, double merge_rel) {
  const auto d = static_cast<std::size_t>(e.dim());
  std::vector<double> support(e.eigenvalues.data(), e.eigenvalues.data() + d);
  std::vector<double> weights(d, 1.0 / static_cast<double>(d));
  const double tol = merge_tolerance(support, merge_rel);
  return DiscreteMeasure::from_atoms(std::move(support), std::move(weights), tol);
}

DiscreteMeasure induced_measure(const EigenDecomposition& e, const Eigen::VectorXd& psi,
                                double merge_rel) {
  if (psi.size() != e.dim()) {
    fail(ErrorKind::InvalidInput, "vector length " + std::to_string(psi.size()) +
                                      " does not match dimension " + std::to_string(e.dim()));
  }
  const auto d = static_cast<std::size_t>(e.dim());
  const Eigen::VectorXd proj = e.eigenvectors.transpose() * psi;
  std::vector<double> support(e.eigenvalues.data(), e.eigenvalues.data() + d);
  std::vector<double> weights(d);
  for (std::size_t j = 0; j < d; ++j) weights[j] = proj[static_cast<Eigen::Index>(j)] * proj[static_cast<Eigen::Index>(j)];
  const double tol = merge_tolerance(support, merge_rel);
  return DiscreteMeasure::from_atoms(std::move(support), std::move(weights), tol);
}

Eigen::VectorXd tracial_inducing_vector(const EigenDecomposition& e) {
  return e.eigenvectors.rowwise().sum() / std::sqrt(static_cast<double>(e.dim()));
}

double moment(const DiscreteMeasure& mu, int k) {
  if (k < 0) {
    for (double x : mu.support()) {
      if (x == 0.0) fail(ErrorKind::SingularSupport, "negative moment of a measure with an atom at 0");
    }
  }
  return measure_expectation(mu, [k](double x) { return std::pow(x, k); });
}

namespace {

std::vector<std::size_t> significant_atoms(const DiscreteMeasure& mu, double floor) {
  std::vector<std::size_t> idx;
  for (std::size_t j = 0; j < mu.size(); ++j) {
    if (mu.weights()[j] > floor) idx.push_back(j);
  }
  return idx;
}

}  // namespace

double atomwise_discrepancy(const DiscreteMeasure& a, const DiscreteMeasure& b, double weight_floor) {
  const auto ia = significant_atoms(a, weight_floor);
  const auto ib = significant_atoms(b, weight_floor);
  if (ia.size() != ib.size()) return std::numeric_limits<double>::infinity();

  double support_scale = 1.0;
  for (double x : a.support()) support_scale = std::max(support_scale, std::fabs(x));
  const double mass_scale = std::max({1.0, a.mass(), b.mass()});

  double worst = 0.0;
  for (std::size_t k = 0; k < ia.size(); ++k) {
    const double dx = std::fabs(a.support()[ia[k]] - b.support()[ib[k]]) / support_scale;
    const double dw = std::fabs(a.weights()[ia[k]] - b.weights()[ib[k]]) / mass_scale;
    worst = std::max({worst, dx, dw});
  }
  return worst;
}

bool approx_equal(const DiscreteMeasure& a, const DiscreteMeasure& b, double tol) {
  const double floor = tol * std::max({1.0, a.mass(), b.mass()});
  return atomwise_discrepancy(a, b, floor) <= tol;
}

}  // namespace confspec::spectral
