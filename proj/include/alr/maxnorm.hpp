#pragma once

#include <cstdint>
#include <functional>

#include <Eigen/Core>

namespace alr {

// Upper estimate of a maximum over a large index set.
struct MaxEstimate {
  double point;   // plug-in estimate of the max
  double upper;   // one-sided high-confidence upper bound
  double q;       // moment exponent used
  std::uint64_t k;  // number of sampled indices
  double eps;     // multiplicative slack; m^(1/q) = e^eps when q = log(m)/eps
  double delta;   // failure probability of the upper bound
};

// Deterministic q-norm bracket for a non-negative vector:
//   (m^-1 sum w_i^q)^(1/q) <= max w <= m^(1/q) (m^-1 sum w_i^q)^(1/q).
// The returned pair (lower, upper) satisfies the bracket exactly in
// floating point.
std::pair<double, double> qnorm_bounds(const Eigen::VectorXd& w, double q);

// Samples k indices uniformly, estimates the q-th moment with q =
// max(1, log(m)/eps), and returns a Hoeffding-backed upper bound that
// covers max_j w(j) with probability >= 1 - delta.  Requires
// 0 <= w(j) <= bound_b for all j.  k is solved from the target additive
// accuracy (half the pilot moment estimate) and clamped to
// [50, k_max].
MaxEstimate sampled_max_upper(const std::function<double(std::uint64_t)>& w_access, std::uint64_t m,
                              double eps, double delta, double bound_b, std::uint64_t seed,
                              std::uint64_t k_max = 200'000);

}  // namespace alr
