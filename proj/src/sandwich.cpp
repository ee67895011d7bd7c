#include "alr/sandwich.hpp"

#include <cmath>

#include "alr/chisq.hpp"
#include "alr/errors.hpp"
#include "alr/kernels.hpp"
#include "alr/linalg.hpp"

namespace alr {

Eigen::MatrixXd meat_estimate(const Dataset& data, const OlsFit& fit) {
  if (fit.residuals.size() != data.n()) throw DomainError("fit does not match dataset");
  const Eigen::MatrixXd xm = subcolumns(data.x, fit.model);
  const double n = static_cast<double>(data.n());
  return symmetrize(kernels::weighted_gram(xm, fit.residuals)) / (n * n);
}

SandwichVariance sandwich_variance(const Eigen::MatrixXd& g_m, const Eigen::MatrixXd& meat) {
  const Eigen::MatrixXd bread = inverse_spd(g_m);
  SandwichVariance sv;
  sv.meat = symmetrize(meat);
  sv.avar = symmetrize(bread * sv.meat * bread);
  sv.se = sv.avar.diagonal().cwiseMax(0.0).cwiseSqrt();
  return sv;
}

FullModelRegion chi_square_region(const OlsFit& fit, const SandwichVariance&, double alpha) {
  if (!(alpha > 0.0 && alpha < 1.0)) throw DomainError("alpha must be in (0,1)");
  const int d = static_cast<int>(fit.beta_hat.size());
  return FullModelRegion{RegionKind::chi_square, fit.beta_hat, chisq_quantile(d, alpha), alpha};
}

bool region_contains_chi(const FullModelRegion& region, const SandwichVariance& sv,
                         const Eigen::VectorXd& theta) {
  if (region.kind != RegionKind::chi_square) throw DomainError("not a chi-square region");
  if (theta.size() != region.center.size()) throw DomainError("theta length mismatch");
  // (c - theta)' avar^-1 (c - theta) equals the quadratic form in the
  // sandwich pieces since avar^-1 = sigma_hat V_hat^-1 sigma_hat.
  const Eigen::VectorXd diff = region.center - theta;
  const Eigen::MatrixXd avar_inv = inverse_spd(sv.avar);
  return diff.dot(avar_inv * diff) <= region.threshold;
}

FullModelRegion max_t_region(const OlsFit& fit, const SandwichVariance& sv, double z_quantile, double alpha) {
  if (!(alpha > 0.0 && alpha < 1.0)) throw DomainError("alpha must be in (0,1)");
  if (z_quantile < 0.0) throw DomainError("max-|t| quantile must be >= 0");
  if ((sv.se.array() <= 0.0).any())
    throw DegenerateVarianceError("zero standard error in max-|t| region");
  return FullModelRegion{RegionKind::max_t, fit.beta_hat, z_quantile, alpha};
}

bool region_contains_max_t(const FullModelRegion& region, const SandwichVariance& sv,
                           const Eigen::VectorXd& theta) {
  if (region.kind != RegionKind::max_t) throw DomainError("not a max-|t| region");
  if (theta.size() != region.center.size()) throw DomainError("theta length mismatch");
  double worst = 0.0;
  for (int j = 0; j < theta.size(); ++j) {
    const double t = std::abs(region.center(j) - theta(j)) / sv.se(j);
    if (t > worst) worst = t;
  }
  return worst <= region.threshold;
}

}  // namespace alr
