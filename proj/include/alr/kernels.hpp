#pragma once

#include <Eigen/Core>
#include <cstdint>
#include <vector>

namespace alr::kernels {

// Accumulations are split into fixed 512-row blocks; block partials are
// computed in parallel and summed in block order, so results are identical
// for every thread count.
inline constexpr int kBlockRows = 512;

struct GramSums {
  Eigen::MatrixXd xtx;  // sum_i x_i x_i'
  Eigen::VectorXd xty;  // sum_i x_i y_i
};

GramSums gram_sums(const Eigen::MatrixXd& x, const Eigen::VectorXd& y);
GramSums gram_sums_serial(const Eigen::MatrixXd& x, const Eigen::VectorXd& y);

// sum_i x_i x_i' r_i^2 (meat accumulation before the n^-2 scaling)
Eigen::MatrixXd weighted_gram(const Eigen::MatrixXd& x, const Eigen::VectorXd& r);
Eigen::MatrixXd weighted_gram_serial(const Eigen::MatrixXd& x, const Eigen::VectorXd& r);

// Multiplier statistics.  psi is an n x C matrix of influence scores laid
// out as contiguous per-model column blocks described by `offsets` (size
// nmodels + 1).  For each replicate a fresh N(0,1) multiplier vector g is
// drawn from substream (seed, replicate), and
//   T[replicate][model] = max over the model's columns j of
//                         |g . psi_j| / ||psi_j||,
// i.e. |n^-1 sum_i g_i psi_ij| divided by the empirical score scale
// n^-1 ||psi_j||.  Columns with zero norm contribute zero.  Replicates are
// independent and write disjoint rows, so the parallel and serial versions
// produce bit-identical output.
Eigen::MatrixXd multiplier_stats(const Eigen::MatrixXd& psi, const std::vector<std::ptrdiff_t>& offsets,
                                 int b, std::uint64_t seed);
Eigen::MatrixXd multiplier_stats_serial(const Eigen::MatrixXd& psi, const std::vector<std::ptrdiff_t>& offsets,
                                        int b, std::uint64_t seed);

}  // namespace alr::kernels
