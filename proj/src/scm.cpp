#include "confspec/scm.hpp"

#include <cmath>
#include <random>

namespace confspec::scm {
namespace {

double ratio_or_zero(double num, double den) { return den == 0.0 ? 0.0 : num / den; }

void check_condition(const Eigen::MatrixXd& m, double max_condition) {
  if (!m.allFinite()) fail(ErrorKind::SingularCovariance, "covariance has non-finite entries");
  Eigen::SelfAdjointEigenSolver<Eigen::MatrixXd> solver(m, Eigen::EigenvaluesOnly);
  const double lo = solver.eigenvalues().minCoeff();
  const double hi = solver.eigenvalues().maxCoeff();
  if (!(lo > 0.0) || hi / lo > max_condition) {
    fail(ErrorKind::SingularCovariance,
         "covariance is singular or ill-conditioned (eigenvalues in [" + std::to_string(lo) + ", " +
             std::to_string(hi) + "])");
  }
}

}  // namespace

void ModelParams::validate() const {
  const Eigen::Index d = a.size();
  if (d < 1 || b.size() != d || sigma_ee.dim() != d) {
    fail(ErrorKind::InvalidInput, "model parameter dimensions disagree");
  }
  if (!(sigma_f >= 0.0)) fail(ErrorKind::InvalidInput, "sigma_f must be nonnegative");
  Eigen::SelfAdjointEigenSolver<Eigen::MatrixXd> solver(sigma_ee.matrix(), Eigen::EigenvaluesOnly);
  if (solver.eigenvalues().minCoeff() < -1e-10) {
    fail(ErrorKind::InvalidInput, "sigma_ee is not positive semi-definite");
  }
}

void Dataset::validate() const {
  if (y.size() != x.rows()) fail(ErrorKind::InvalidInput, "x and y row counts differ");
  if (z && z->size() != x.rows()) fail(ErrorKind::InvalidInput, "x and z row counts differ");
  if (x.rows() < 2) fail(ErrorKind::InvalidInput, "need at least 2 samples");
  if (x.cols() < 1) fail(ErrorKind::InvalidInput, "need at least 1 predictor");
}

Eigen::VectorXd random_unit_vector(Eigen::Index d, Engine& rng) {
  std::normal_distribution<double> normal(0.0, 1.0);
  Eigen::VectorXd v(d);
  double norm = 0.0;
  do {
    for (Eigen::Index i = 0; i < d; ++i) v[i] = normal(rng);
    norm = v.norm();
  } while (norm == 0.0);
  return v / norm;
}

ModelParams sample_params(Eigen::Index d, Engine& rng) {
  if (d < 1) fail(ErrorKind::InvalidInput, "dimension must be positive");
  std::normal_distribution<double> normal(0.0, 1.0);
  std::uniform_real_distribution<double> unit(0.0, 1.0);

  Eigen::MatrixXd g(d, d);
  for (Eigen::Index i = 0; i < d; ++i) {
    for (Eigen::Index j = 0; j < d; ++j) g(i, j) = normal(rng);
  }

  ModelParams p;
  p.sigma_ee = SymMatrix(g * g.transpose());
  p.c = unit(rng);
  const double r_a = unit(rng);
  const double r_b = unit(rng);
  p.a = r_a * random_unit_vector(d, rng);
  p.b = r_b * random_unit_vector(d, rng);
  p.sigma_f = 1.0;
  return p;
}

Dataset sample_dataset(const ModelParams& p, Eigen::Index n, Engine& rng) {
  p.validate();
  if (n < 1) fail(ErrorKind::InvalidInput, "sample size must be positive");
  const Eigen::Index d = p.dim();

  // E = e_tilde * L^T with L L^T = Sigma_EE; the eigen square root tolerates
  // semi-definite Sigma_EE.
  Eigen::SelfAdjointEigenSolver<Eigen::MatrixXd> solver(p.sigma_ee.matrix());
  const Eigen::VectorXd root = solver.eigenvalues().cwiseMax(0.0).cwiseSqrt();
  const Eigen::MatrixXd lt = (solver.eigenvectors() * root.asDiagonal()).transpose();

  std::normal_distribution<double> normal(0.0, 1.0);
  Eigen::MatrixXd e_tilde(n, d);
  Eigen::VectorXd z(n);
  Eigen::VectorXd f(n);
  for (Eigen::Index i = 0; i < n; ++i) {
    z[i] = normal(rng);
    f[i] = p.sigma_f * normal(rng);
    for (Eigen::Index j = 0; j < d; ++j) e_tilde(i, j) = normal(rng);
  }

  Dataset ds;
  ds.x = e_tilde * lt + z * p.b.transpose();
  ds.y = ds.x * p.a + p.c * z + f;
  ds.z = std::move(z);
  return ds;
}

SymMatrix true_sigma_xx(const ModelParams& p) {
  p.validate();
  return SymMatrix(p.sigma_ee.matrix() + p.b * p.b.transpose());
}

Eigen::VectorXd true_sigma_xy(const ModelParams& p) {
  return true_sigma_xx(p).matrix() * p.a + p.c * p.b;
}

GroundTruth ground_truth(const ModelParams& p) {
  const SymMatrix sxx = true_sigma_xx(p);
  Eigen::SelfAdjointEigenSolver<Eigen::MatrixXd> solver(sxx.matrix(), Eigen::EigenvaluesOnly);
  const double lo = solver.eigenvalues().minCoeff();
  const double hi = solver.eigenvalues().maxCoeff();
  if (!(lo > 1e-12 * hi)) fail(ErrorKind::SingularCovariance, "Sigma_XX is singular");

  const Eigen::VectorXd confounding = p.c * sxx.matrix().ldlt().solve(p.b);
  const double cb2 = (p.c * p.b).squaredNorm();
  const double conf2 = confounding.squaredNorm();

  GroundTruth t;
  t.gamma = ratio_or_zero(cb2, (sxx.matrix() * p.a).squaredNorm() + cb2);
  t.beta = ratio_or_zero(conf2, p.a.squaredNorm() + conf2);
  t.eta = p.b.squaredNorm();
  t.a_hat_pop = p.a + confounding;
  return t;
}

Eigen::VectorXd regression_vector(const SymMatrix& sigma_xx, const Eigen::VectorXd& sigma_xy) {
  if (sigma_xy.size() != sigma_xx.dim()) {
    fail(ErrorKind::InvalidInput, "Sigma_XY length does not match Sigma_XX");
  }
  check_condition(sigma_xx.matrix(), kMaxCondition);
  return sigma_xx.matrix().ldlt().solve(sigma_xy);
}

Covariances empirical_covariances(const Dataset& ds) {
  ds.validate();
  const double denom = static_cast<double>(ds.n() - 1);
  const Eigen::RowVectorXd mean_x = ds.x.colwise().mean();
  const Eigen::MatrixXd xc = ds.x.rowwise() - mean_x;
  const Eigen::VectorXd yc = ds.y.array() - ds.y.mean();
  return Covariances{SymMatrix((xc.transpose() * xc) / denom), (xc.transpose() * yc) / denom};
}

double beta_prime(const Dataset& ds) {
  ds.validate();
  if (!ds.z) fail(ErrorKind::InvalidInput, "dataset carries no confounder column");
  const Eigen::Index d = ds.d();

  Dataset joint;
  joint.x.resize(ds.n(), d + 1);
  joint.x << ds.x, *ds.z;
  joint.y = ds.y;
  const Covariances jc = empirical_covariances(joint);
  const Eigen::VectorXd coef = regression_vector(jc.sxx, jc.sxy);

  const Eigen::MatrixXd sxx = jc.sxx.matrix().topLeftCorner(d, d);
  const Eigen::VectorXd sxz = jc.sxx.matrix().col(d).head(d);
  check_condition(sxx, kMaxCondition);
  const Eigen::VectorXd confounding = coef[d] * sxx.ldlt().solve(sxz);
  const double conf2 = confounding.squaredNorm();
  return ratio_or_zero(conf2, coef.head(d).squaredNorm() + conf2);
}

}  // namespace confspec::scm
