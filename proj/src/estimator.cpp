#include "confspec/estimator.hpp"

#include <cmath>
#include <limits>

#include "confspec/simd.hpp"

namespace confspec::estimator {
namespace {

bool is_flat(const Eigen::VectorXd& eigenvalues) {
  const double spread = eigenvalues[0] - eigenvalues[eigenvalues.size() - 1];
  return spread <= 1e-12 * std::fabs(eigenvalues[0]);
}

void check_spectrum(const Eigen::VectorXd& eigenvalues) {
  if (eigenvalues.size() == 0) fail(ErrorKind::InvalidInput, "empty spectrum");
  for (Eigen::Index j = 1; j < eigenvalues.size(); ++j) {
    if (eigenvalues[j] > eigenvalues[j - 1]) {
      fail(ErrorKind::InvalidInput, "eigenvalues must be sorted descending");
    }
  }
  if (!(eigenvalues[eigenvalues.size() - 1] > 0.0)) {
    fail(ErrorKind::SingularCovariance, "smallest eigenvalue is not positive");
  }
}

Eigen::VectorXd smoothed(const Eigen::MatrixXd& k, const Eigen::VectorXd& v) {
  Eigen::VectorXd out(v.size());
  simd::active_kernels().matvec(k.data(), v.data(), out.data(), static_cast<std::size_t>(v.size()));
  return out;
}

}  // namespace

void GridConfig::validate() const {
  if (beta_steps < 2 || eta_steps < 2) {
    fail(ErrorKind::InvalidInput, "grid needs at least 2 points per axis");
  }
  if (!(sigma_factor > 0.0)) fail(ErrorKind::InvalidInput, "sigma_factor must be positive");
}

ObservedWeights observed_weights(const spectral::EigenDecomposition& e, const Eigen::VectorXd& a_hat) {
  if (a_hat.size() != e.dim()) fail(ErrorKind::InvalidInput, "regression vector has wrong length");
  const double norm_sq = a_hat.squaredNorm();
  if (norm_sq == 0.0) {
    fail(ErrorKind::ZeroRegressionVector, "regression vector is zero, no dependence to analyze");
  }
  ObservedWeights out;
  out.eigenvalues = e.eigenvalues;
  out.weights = (e.eigenvectors.transpose() * a_hat).array().square();
  out.weights /= out.weights.sum();
  out.a_hat_norm_sq = norm_sq;
  return out;
}

ObservedWeights observed_weights(const SymMatrix& sigma_xx, const Eigen::VectorXd& a_hat) {
  return observed_weights(spectral::eigendecompose(sigma_xx), a_hat);
}

Eigen::VectorXd confounded_weights(const Eigen::VectorXd& eigenvalues, double eta) {
  check_spectrum(eigenvalues);
  const double top = eigenvalues[0];
  if (!(eta >= 0.0) || eta > top * (1.0 + 1e-12)) {
    fail(ErrorKind::InvalidInput, "eta must lie in [0, largest eigenvalue]");
  }
  const Eigen::Index d = eigenvalues.size();
  const Eigen::VectorXd g = Eigen::VectorXd::Constant(d, 1.0 / std::sqrt(static_cast<double>(d)));

  const SymMatrix t(Eigen::MatrixXd(eigenvalues.asDiagonal()) + eta * g * g.transpose());
  const auto te = spectral::eigendecompose(t);

  // T^{-1} g is parallel to diag(v)^{-1} g by Sherman-Morrison.
  Eigen::VectorXd v = g.cwiseQuotient(eigenvalues);
  v.normalize();
  return (te.eigenvectors.transpose() * v).array().square();
}

FamilyWeights family_weights(const Eigen::VectorXd& eigenvalues, double beta, double eta) {
  if (!(beta >= 0.0 && beta <= 1.0)) fail(ErrorKind::InvalidInput, "beta must lie in [0, 1]");
  const Eigen::Index d = eigenvalues.size();
  FamilyWeights out;
  out.beta = beta;
  out.eta = eta;
  out.weights = beta * confounded_weights(eigenvalues, eta);
  out.weights.array() += (1.0 - beta) / static_cast<double>(d);
  return out;
}

Eigen::MatrixXd smoothing_matrix(const Eigen::VectorXd& eigenvalues, double sigma_factor) {
  if (!(sigma_factor > 0.0)) fail(ErrorKind::InvalidInput, "sigma_factor must be positive");
  if (eigenvalues.size() == 0) fail(ErrorKind::InvalidInput, "empty spectrum");
  const Eigen::Index d = eigenvalues.size();
  const double spread = eigenvalues.maxCoeff() - eigenvalues.minCoeff();
  const double sigma = is_flat(eigenvalues) ? 1.0 : sigma_factor * spread;
  const double scale = 1.0 / (2.0 * sigma * sigma);

  Eigen::MatrixXd k(d, d);
  for (Eigen::Index i = 0; i < d; ++i) {
    k(i, i) = 1.0;
    for (Eigen::Index j = 0; j < i; ++j) {
      const double diff = eigenvalues[i] - eigenvalues[j];
      k(i, j) = k(j, i) = std::exp(-diff * diff * scale);
    }
  }
  return k;
}

double distance(const Eigen::VectorXd& w, const Eigen::VectorXd& w_prime, const Eigen::MatrixXd& k) {
  if (w.size() != w_prime.size() || k.rows() != w.size() || k.cols() != w.size()) {
    fail(ErrorKind::InvalidInput, "weight vectors and smoothing matrix disagree in size");
  }
  const Eigen::VectorXd kd = smoothed(k, w - w_prime);
  return simd::abs_sum_axpy({kd.data(), static_cast<std::size_t>(kd.size())}, 0.0,
                            {kd.data(), static_cast<std::size_t>(kd.size())});
}

double grid_point(int i, int steps, double hi) {
  if (i == steps - 1) return hi;
  return hi * static_cast<double>(i) / static_cast<double>(steps - 1);
}

ConfoundingEstimate estimate(const SymMatrix& sigma_xx, const Eigen::VectorXd& sigma_xy,
                             const GridConfig& cfg) {
  cfg.validate();
  const Eigen::VectorXd a_hat = scm::regression_vector(sigma_xx, sigma_xy);
  const auto e = spectral::eigendecompose(sigma_xx);
  const ObservedWeights obs = observed_weights(e, a_hat);
  check_spectrum(obs.eigenvalues);

  const Eigen::Index d = e.dim();
  const auto n = static_cast<std::size_t>(d);
  const Eigen::MatrixXd k = smoothing_matrix(obs.eigenvalues, cfg.sigma_factor);
  const Eigen::VectorXd uniform = Eigen::VectorXd::Constant(d, 1.0 / static_cast<double>(d));

  // D(beta, eta) = || r - beta * s_eta ||_1 with r = K (w - u), s_eta = K (conf_eta - u).
  const Eigen::VectorXd r = smoothed(k, obs.weights - uniform);
  const double top = obs.eigenvalues[0];

  double best = std::numeric_limits<double>::infinity();
  int best_beta = 0;
  int best_eta = 0;
  for (int ei = 0; ei < cfg.eta_steps; ++ei) {
    const double eta = grid_point(ei, cfg.eta_steps, top);
    const Eigen::VectorXd s = smoothed(k, confounded_weights(obs.eigenvalues, eta) - uniform);
    for (int bi = 0; bi < cfg.beta_steps; ++bi) {
      const double beta = grid_point(bi, cfg.beta_steps, 1.0);
      const double dist = simd::abs_sum_axpy({r.data(), n}, beta, {s.data(), n});
      const bool better = dist < best || (dist == best && (bi < best_beta || (bi == best_beta && ei < best_eta)));
      if (better) {
        best = dist;
        best_beta = bi;
        best_eta = ei;
      }
    }
  }

  ConfoundingEstimate out;
  out.beta_index = static_cast<std::size_t>(best_beta);
  out.eta_index = static_cast<std::size_t>(best_eta);
  out.beta_hat = grid_point(best_beta, cfg.beta_steps, 1.0);
  out.eta_hat = grid_point(best_eta, cfg.eta_steps, top);
  out.eigenvalues = obs.eigenvalues;
  out.observed_weights = obs.weights;
  out.fitted_weights = family_weights(obs.eigenvalues, out.beta_hat, out.eta_hat).weights;
  out.distance = distance(obs.weights, out.fitted_weights, k);
  out.a_hat_norm_sq = obs.a_hat_norm_sq;
  if (is_flat(obs.eigenvalues)) out.warnings.emplace_back(kDegenerateSpectrumWarning);
  return out;
}

ConfoundingEstimate estimate_from_data(const scm::Dataset& ds, const GridConfig& cfg) {
  ds.validate();
  if (cfg.normalize) {
    const auto cov = scm::empirical_covariances(normalize_dataset(ds));
    auto est = estimate(cov.sxx, cov.sxy, cfg);
    est.warnings.insert(est.warnings.begin(), kNormalizationWarning);
    return est;
  }
  const auto cov = scm::empirical_covariances(ds);
  return estimate(cov.sxx, cov.sxy, cfg);
}

scm::Dataset normalize_dataset(const scm::Dataset& ds) {
  ds.validate();
  scm::Dataset out = ds;
  const double denom = static_cast<double>(ds.n() - 1);
  for (Eigen::Index j = 0; j < ds.d(); ++j) {
    auto col = out.x.col(j);
    const double mean = col.mean();
    col.array() -= mean;
    const double sd = std::sqrt(col.squaredNorm() / denom);
    const double scale = ds.x.col(j).cwiseAbs().maxCoeff();
    if (!(sd > 1e-12 * scale) || sd == 0.0) {
      fail(ErrorKind::ConstantColumn, "predictor column " + std::to_string(j) + " is constant");
    }
    col /= sd;
  }
  return out;
}

}  // namespace confspec::estimator
