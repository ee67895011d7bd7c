#pragma once

#include <Eigen/Core>

namespace alr {

// condition-number threshold shared by every solve in the library
inline constexpr double kCondLimit = 1e10;

inline Eigen::MatrixXd symmetrize(const Eigen::MatrixXd& a) { return 0.5 * (a + a.transpose()); }

// largest |eigenvalue| of a symmetric matrix
double operator_norm_sym(const Eigen::MatrixXd& a);

// S^{-1/2} of a symmetric positive definite matrix; throws
// NotPositiveDefiniteError when min eigenvalue <= 1e-12 * trace.
Eigen::MatrixXd inv_sqrt_pd(const Eigen::MatrixXd& s);

// S^{1/2} for symmetric positive semi-definite S (negative rounding noise clipped)
Eigen::MatrixXd sqrt_psd(const Eigen::MatrixXd& s);

// sqrt(x' S x)
double sigma_norm(const Eigen::VectorXd& x, const Eigen::MatrixXd& s);

struct SpdSolve {
  Eigen::VectorXd x;
  bool rank_ok;  // condition number within kCondLimit
};

// Solves S x = b for symmetric PSD S.  Well-conditioned systems use the
// eigendecomposition directly; otherwise the minimum-norm solution is
// returned with rank_ok = false.
SpdSolve solve_spd_minnorm(const Eigen::MatrixXd& s, const Eigen::VectorXd& b);

// Inverse of a symmetric matrix; throws RankError when the condition number
// exceeds kCondLimit.
Eigen::MatrixXd inverse_spd(const Eigen::MatrixXd& s);

}  // namespace alr
