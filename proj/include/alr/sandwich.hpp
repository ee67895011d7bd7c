#pragma once

#include <Eigen/Core>

#include "alr/dataset.hpp"
#include "alr/regress.hpp"

namespace alr {

// Model-robust variance pieces for one fitted model.
struct SandwichVariance {
  Eigen::MatrixXd meat;  // V_hat = n^-2 sum x_i x_i' r_i^2
  Eigen::MatrixXd avar;  // sigma_hat^-1 V_hat sigma_hat^-1
  Eigen::VectorXd se;    // sqrt of avar diagonal
};

enum class RegionKind { chi_square, max_t };

struct FullModelRegion {
  RegionKind kind;
  Eigen::VectorXd center;
  double threshold;  // chi-square quantile, or the max-|t| quantile
  double alpha;
};

// V_hat = n^-2 sum_i x_{i,M} x_{i,M}' r_i^2 using the fit's residuals.
Eigen::MatrixXd meat_estimate(const Dataset& data, const OlsFit& fit);

SandwichVariance sandwich_variance(const Eigen::MatrixXd& g_m, const Eigen::MatrixXd& meat);

// Elliptical region {theta : (beta_hat - theta)' avar^-1 (beta_hat - theta) <= chi2_{d,alpha}}.
FullModelRegion chi_square_region(const OlsFit& fit, const SandwichVariance& sv, double alpha);
bool region_contains_chi(const FullModelRegion& region, const SandwichVariance& sv, const Eigen::VectorXd& theta);

// Rectangular region {theta : max_j |beta_hat_j - theta_j| / se_j <= z}.
FullModelRegion max_t_region(const OlsFit& fit, const SandwichVariance& sv, double z_quantile, double alpha);
bool region_contains_max_t(const FullModelRegion& region, const SandwichVariance& sv, const Eigen::VectorXd& theta);

}  // namespace alr
