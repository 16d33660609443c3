#pragma once

// Fits the spectral weights of the regression vector on the eigenbasis of
// Sigma_XX to the two-parameter family nu_{beta, eta}: a convex mix of the
// uniform (causal) weights and the weights a rank-one perturbed spectrum
// induces on T^{-1} g (confounded part).

#include <Eigen/Dense>
#include <string>
#include <vector>

#include "confspec/scm.hpp"
#include "confspec/spectral.hpp"

namespace confspec::estimator {

using spectral::SymMatrix;

struct GridConfig {
  int beta_steps = 101;
  int eta_steps = 101;
  double sigma_factor = 0.2;
  bool normalize = false;

  void validate() const;
};

struct ObservedWeights {
  Eigen::VectorXd eigenvalues;  // descending
  Eigen::VectorXd weights;      // sums to 1
  double a_hat_norm_sq = 0.0;
};

struct FamilyWeights {
  double beta = 0.0;
  double eta = 0.0;
  Eigen::VectorXd weights;
};

struct ConfoundingEstimate {
  double beta_hat = 0.0;
  double eta_hat = 0.0;
  double distance = 0.0;
  Eigen::VectorXd observed_weights;
  Eigen::VectorXd fitted_weights;
  Eigen::VectorXd eigenvalues;
  double a_hat_norm_sq = 0.0;
  // eta_hat is reported but does not track the true eta in simulations.
  bool eta_reliable = false;
  std::size_t beta_index = 0;
  std::size_t eta_index = 0;
  std::vector<std::string> warnings;
};

inline constexpr const char* kNormalizationWarning =
    "predictors were normalized to unit variance; normalization changes Sigma_XX and the "
    "regression vector jointly, treat beta_hat with caution";
inline constexpr const char* kDegenerateSpectrumWarning =
    "DegenerateSpectrum: all eigenvalues of Sigma_XX coincide, the spectral weights carry no "
    "information and beta_hat defaults to 0";

ObservedWeights observed_weights(const SymMatrix& sigma_xx, const Eigen::VectorXd& a_hat);
ObservedWeights observed_weights(const spectral::EigenDecomposition& e, const Eigen::VectorXd& a_hat);

// Confounded component alone (beta = 1).
Eigen::VectorXd confounded_weights(const Eigen::VectorXd& eigenvalues, double eta);

FamilyWeights family_weights(const Eigen::VectorXd& eigenvalues, double beta, double eta);

// K(i, j) = exp(-(v_i - v_j)^2 / (2 sigma^2)), sigma = sigma_factor * (v_1 - v_d),
// or sigma = 1 when the spectrum is flat.
Eigen::MatrixXd smoothing_matrix(const Eigen::VectorXd& eigenvalues, double sigma_factor = 0.2);

// || K (w - w') ||_1
double distance(const Eigen::VectorXd& w, const Eigen::VectorXd& w_prime, const Eigen::MatrixXd& k);

// Grid value i of `steps` inclusive points on [0, hi].
double grid_point(int i, int steps, double hi);

ConfoundingEstimate estimate(const SymMatrix& sigma_xx, const Eigen::VectorXd& sigma_xy,
                             const GridConfig& cfg = {});

ConfoundingEstimate estimate_from_data(const scm::Dataset& ds, const GridConfig& cfg = {});

// Centres each predictor and scales it to unit sample variance (n - 1).
scm::Dataset normalize_dataset(const scm::Dataset& ds);

}  // namespace confspec::estimator
