#include "alr/linalg.hpp"

#include <Eigen/Dense>
#include <cmath>

#include "alr/errors.hpp"

namespace alr {

namespace {

Eigen::SelfAdjointEigenSolver<Eigen::MatrixXd> eig_sym(const Eigen::MatrixXd& a) {
  Eigen::SelfAdjointEigenSolver<Eigen::MatrixXd> es(symmetrize(a));
  if (es.info() != Eigen::Success) throw RankError("symmetric eigendecomposition failed");
  return es;
}

}  // namespace

double operator_norm_sym(const Eigen::MatrixXd& a) {
  const auto es = eig_sym(a);
  return es.eigenvalues().cwiseAbs().maxCoeff();
}

Eigen::MatrixXd inv_sqrt_pd(const Eigen::MatrixXd& s) {
  const auto es = eig_sym(s);
  const Eigen::VectorXd& ev = es.eigenvalues();
  const double tr = s.trace();
  if (ev.minCoeff() <= 1e-12 * std::abs(tr))
    throw NotPositiveDefiniteError("matrix is not positive definite (min eigenvalue " +
                                   std::to_string(ev.minCoeff()) + ")");
  Eigen::VectorXd inv_sqrt = ev.cwiseSqrt().cwiseInverse();
  return es.eigenvectors() * inv_sqrt.asDiagonal() * es.eigenvectors().transpose();
}

Eigen::MatrixXd sqrt_psd(const Eigen::MatrixXd& s) {
  const auto es = eig_sym(s);
  Eigen::VectorXd ev = es.eigenvalues().cwiseMax(0.0);
  return es.eigenvectors() * ev.cwiseSqrt().asDiagonal() * es.eigenvectors().transpose();
}

double sigma_norm(const Eigen::VectorXd& x, const Eigen::MatrixXd& s) {
  const double q = x.dot(s * x);
  return std::sqrt(std::max(q, 0.0));
}

SpdSolve solve_spd_minnorm(const Eigen::MatrixXd& s, const Eigen::VectorXd& b) {
  const auto es = eig_sym(s);
  const Eigen::VectorXd& ev = es.eigenvalues();
  const double lmax = ev.maxCoeff();
  const double lmin = ev.minCoeff();
  const bool rank_ok = lmin > 0.0 && lmax <= kCondLimit * lmin;
  const double cut = lmax > 0.0 ? lmax * 1e-12 : 0.0;
  Eigen::VectorXd c = es.eigenvectors().transpose() * b;
  for (int i = 0; i < ev.size(); ++i) c(i) = ev(i) > cut ? c(i) / ev(i) : 0.0;
  return {es.eigenvectors() * c, rank_ok};
}

Eigen::MatrixXd inverse_spd(const Eigen::MatrixXd& s) {
  const auto es = eig_sym(s);
  const Eigen::VectorXd& ev = es.eigenvalues();
  if (ev.minCoeff() <= 0.0 || ev.maxCoeff() > kCondLimit * ev.minCoeff())
    throw RankError("matrix numerically singular (condition number above limit)");
  return es.eigenvectors() * ev.cwiseInverse().asDiagonal() * es.eigenvectors().transpose();
}

}  // namespace alr
