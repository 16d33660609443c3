#pragma once

// Confounded linear structural causal model
//
//   X = b Z + E,          Z ~ N(0, 1), E ~ N(0, Sigma_EE)
//   Y = <a, X> + c Z + F, F ~ N(0, sigma_f^2)
//
// with its exact confounding strengths and the regression machinery shared
// with the estimator.

#include <Eigen/Dense>
#include <optional>

#include "confspec/rng.hpp"
#include "confspec/spectral.hpp"

namespace confspec::scm {

using spectral::SymMatrix;

// Condition-number ceiling for covariance solves.
inline constexpr double kMaxCondition = 1e12;

struct ModelParams {
  Eigen::VectorXd a;
  Eigen::VectorXd b;
  double c = 0.0;
  SymMatrix sigma_ee = SymMatrix::identity(1);
  double sigma_f = 1.0;

  Eigen::Index dim() const noexcept { return a.size(); }
  // Throws InvalidInput on shape mismatch, negative sigma_f or indefinite sigma_ee.
  void validate() const;
};

struct Dataset {
  Eigen::MatrixXd x;  // n x d, rows are samples
  Eigen::VectorXd y;
  std::optional<Eigen::VectorXd> z;

  Eigen::Index n() const noexcept { return x.rows(); }
  Eigen::Index d() const noexcept { return x.cols(); }
  void validate() const;
};

struct GroundTruth {
  double beta = 0.0;
  double gamma = 0.0;
  double eta = 0.0;
  Eigen::VectorXd a_hat_pop;
};

struct Covariances {
  SymMatrix sxx;
  Eigen::VectorXd sxy;
};

Eigen::VectorXd random_unit_vector(Eigen::Index d, Engine& rng);

// Sigma_EE = G G^T with G standard normal; c, r_a, r_b ~ U(0,1); a and b
// uniform on spheres of radius r_a and r_b; sigma_f = 1.
ModelParams sample_params(Eigen::Index d, Engine& rng);

Dataset sample_dataset(const ModelParams& p, Eigen::Index n, Engine& rng);

SymMatrix true_sigma_xx(const ModelParams& p);

// Sigma_XX a + c b.
Eigen::VectorXd true_sigma_xy(const ModelParams& p);

GroundTruth ground_truth(const ModelParams& p);

// Sigma_XX^{-1} Sigma_XY by factorization; SingularCovariance when the
// condition number exceeds kMaxCondition.
Eigen::VectorXd regression_vector(const SymMatrix& sigma_xx, const Eigen::VectorXd& sigma_xy);

// Mean-centred, denominator n - 1.
Covariances empirical_covariances(const Dataset& ds);

// Structural strength computed from the observed confounder: the joint
// regression of Y on (X, Z) gives the causal part, and the omitted-variable
// term c_hat * Sigma_XX^{-1} Sigma_XZ the confounding part.
double beta_prime(const Dataset& ds);

}  // namespace confspec::scm
