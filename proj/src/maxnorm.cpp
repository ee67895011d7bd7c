#include "alr/maxnorm.hpp"

#include <algorithm>
#include <cmath>

#include "alr/errors.hpp"
#include "alr/rng.hpp"

namespace alr {

std::pair<double, double> qnorm_bounds(const Eigen::VectorXd& w, double q) {
  if (w.size() == 0) throw DomainError("qnorm_bounds: empty vector");
  if (q < 1.0) throw DomainError("qnorm_bounds: q must be >= 1");
  const double wmax = w.maxCoeff();
  if (w.minCoeff() < 0.0) throw DomainError("qnorm_bounds: negative entry");
  if (wmax == 0.0) return {0.0, 0.0};
  const double m = static_cast<double>(w.size());
  // Normalizing by the max keeps every power in [0,1]: the running sum then
  // cannot exceed the term count and cannot fall below its largest term, so
  // lower <= max <= upper holds in floating point, not just in exact
  // arithmetic.
  double sum = 0.0;
  for (int i = 0; i < w.size(); ++i) sum += std::pow(w(i) / wmax, q);
  const double lower = wmax * std::pow(std::min(1.0, sum / m), 1.0 / q);
  const double upper = wmax * std::pow(std::max(1.0, sum), 1.0 / q);
  return {lower, upper};
}

MaxEstimate sampled_max_upper(const std::function<double(std::uint64_t)>& w_access, std::uint64_t m,
                              double eps, double delta, double bound_b, std::uint64_t seed,
                              std::uint64_t k_max) {
  if (m == 0) throw DomainError("sampled_max_upper: empty index set");
  if (!(eps > 0.0 && eps < 1.0) || !(delta > 0.0 && delta < 1.0))
    throw DomainError("sampled_max_upper: eps and delta must be in (0,1)");
  if (bound_b <= 0.0) throw DomainError("sampled_max_upper: bound must be positive");

  const double q = std::max(1.0, std::log(static_cast<double>(m)) / eps);
  const double log2d = std::log(2.0 / delta);

  // Uniform index sampler; each sample has its own substream so results do
  // not depend on evaluation order.
  auto sample_at = [&](std::uint64_t idx) {
    Rng rng = Rng::substream(seed, idx);
    // rejection-free 64-bit modulo is fine here; m is far below 2^64
    const std::uint64_t j = rng.next() % m;
    const double v = w_access(j);
    if (v < 0.0) throw DomainError("sampled_max_upper: negative value");
    if (v > bound_b) throw BoundViolationError("sampled value exceeds the stated a-priori bound");
    return v / bound_b;  // in [0,1]
  };

  // Pilot pass fixes the additive accuracy target t = (pilot mean)/2 on the
  // normalized q-th moment, then k is solved from the Hoeffding bound.
  const std::uint64_t k_pilot = 50;
  double pilot_sum = 0.0;
  for (std::uint64_t i = 0; i < k_pilot; ++i) pilot_sum += std::pow(sample_at(i), q);
  const double pilot_mean = pilot_sum / static_cast<double>(k_pilot);

  std::uint64_t k = k_max;
  if (pilot_mean > 0.0) {
    const double t = 0.5 * pilot_mean;
    const double k_real = std::ceil(log2d / (2.0 * t * t));
    if (k_real < static_cast<double>(k_max)) k = std::max<std::uint64_t>(k_pilot, static_cast<std::uint64_t>(k_real));
  }

  double sum = 0.0;
  double seen_max = 0.0;
  for (std::uint64_t i = 0; i < k; ++i) {
    const double u = sample_at(k_pilot + i);
    sum += std::pow(u, q);
    seen_max = std::max(seen_max, u);
  }
  const double mean = sum / static_cast<double>(k);
  const double margin = std::sqrt(log2d / (2.0 * static_cast<double>(k)));

  MaxEstimate est;
  est.q = q;
  est.k = k;
  est.eps = eps;
  est.delta = delta;
  est.point = bound_b * std::pow(mean, 1.0 / q);
  const double inflate = std::pow(static_cast<double>(m), 1.0 / q);
  est.upper = bound_b * inflate * std::pow(std::min(1.0, mean + margin), 1.0 / q);
  est.upper = std::max(est.upper, est.point);
  return est;
}

}  // namespace alr
