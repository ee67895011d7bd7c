#include "alr/kernels.hpp"

#include <algorithm>
#include <cmath>

#include "alr/rng.hpp"

namespace alr::kernels {

namespace {

inline int block_count(int n) { return (n + kBlockRows - 1) / kBlockRows; }

}  // namespace

GramSums gram_sums(const Eigen::MatrixXd& x, const Eigen::VectorXd& y) {
  const int n = static_cast<int>(x.rows());
  const int d = static_cast<int>(x.cols());
  const int nb = block_count(n);
  std::vector<Eigen::MatrixXd> pm(nb);
  std::vector<Eigen::VectorXd> pv(nb);
#pragma omp parallel for schedule(static)
  for (int b = 0; b < nb; ++b) {
    const int lo = b * kBlockRows;
    const int len = std::min(kBlockRows, n - lo);
    const auto xb = x.middleRows(lo, len);
    pm[b].noalias() = xb.transpose() * xb;
    pv[b].noalias() = xb.transpose() * y.segment(lo, len);
  }
  GramSums out{Eigen::MatrixXd::Zero(d, d), Eigen::VectorXd::Zero(d)};
  for (int b = 0; b < nb; ++b) {
    out.xtx += pm[b];
    out.xty += pv[b];
  }
  return out;
}

GramSums gram_sums_serial(const Eigen::MatrixXd& x, const Eigen::VectorXd& y) {
  const int n = static_cast<int>(x.rows());
  const int d = static_cast<int>(x.cols());
  GramSums out{Eigen::MatrixXd::Zero(d, d), Eigen::VectorXd::Zero(d)};
  for (int i = 0; i < n; ++i) {
    out.xtx.noalias() += x.row(i).transpose() * x.row(i);
    out.xty.noalias() += x.row(i).transpose() * y(i);
  }
  return out;
}

Eigen::MatrixXd weighted_gram(const Eigen::MatrixXd& x, const Eigen::VectorXd& r) {
  const int n = static_cast<int>(x.rows());
  const int d = static_cast<int>(x.cols());
  const int nb = block_count(n);
  std::vector<Eigen::MatrixXd> pm(nb);
#pragma omp parallel for schedule(static)
  for (int b = 0; b < nb; ++b) {
    const int lo = b * kBlockRows;
    const int len = std::min(kBlockRows, n - lo);
    const auto xb = x.middleRows(lo, len);
    pm[b].noalias() = xb.transpose() * r.segment(lo, len).cwiseAbs2().asDiagonal() * xb;
  }
  Eigen::MatrixXd out = Eigen::MatrixXd::Zero(d, d);
  for (int b = 0; b < nb; ++b) out += pm[b];
  return out;
}

Eigen::MatrixXd weighted_gram_serial(const Eigen::MatrixXd& x, const Eigen::VectorXd& r) {
  const int d = static_cast<int>(x.cols());
  Eigen::MatrixXd out = Eigen::MatrixXd::Zero(d, d);
  for (int i = 0; i < x.rows(); ++i) out.noalias() += x.row(i).transpose() * x.row(i) * (r(i) * r(i));
  return out;
}

namespace {

// One replicate row: draws g from its substream, fills stats for all models.
template <typename Row>
void replicate_stats(const Eigen::MatrixXd& psi, const std::vector<std::ptrdiff_t>& offsets,
                     const Eigen::VectorXd& col_norm, std::uint64_t seed, int replicate, Eigen::VectorXd& g,
                     Row&& row) {
  const int n = static_cast<int>(psi.rows());
  Rng rng = Rng::substream(seed, static_cast<std::uint64_t>(replicate));
  for (int i = 0; i < n; ++i) g(i) = rng.normal();
  const int nmodels = static_cast<int>(offsets.size()) - 1;
  for (int m = 0; m < nmodels; ++m) {
    double best = 0.0;
    for (std::ptrdiff_t j = offsets[m]; j < offsets[m + 1]; ++j) {
      if (col_norm(j) == 0.0) continue;
      const double t = std::abs(psi.col(j).dot(g)) / col_norm(j);
      if (t > best) best = t;
    }
    row(m) = best;
  }
}

Eigen::VectorXd column_norms(const Eigen::MatrixXd& psi) {
  Eigen::VectorXd out(psi.cols());
  for (int j = 0; j < psi.cols(); ++j) out(j) = psi.col(j).norm();
  return out;
}

}  // namespace

Eigen::MatrixXd multiplier_stats(const Eigen::MatrixXd& psi, const std::vector<std::ptrdiff_t>& offsets,
                                 int b, std::uint64_t seed) {
  const int nmodels = static_cast<int>(offsets.size()) - 1;
  const Eigen::VectorXd norms = column_norms(psi);
  Eigen::MatrixXd t(b, nmodels);
#pragma omp parallel
  {
    Eigen::VectorXd g(psi.rows());
#pragma omp for schedule(static)
    for (int r = 0; r < b; ++r) {
      auto row = t.row(r);
      replicate_stats(psi, offsets, norms, seed, r, g, [&](int m) -> double& { return row(m); });
    }
  }
  return t;
}

Eigen::MatrixXd multiplier_stats_serial(const Eigen::MatrixXd& psi, const std::vector<std::ptrdiff_t>& offsets,
                                        int b, std::uint64_t seed) {
  const int nmodels = static_cast<int>(offsets.size()) - 1;
  const Eigen::VectorXd norms = column_norms(psi);
  Eigen::MatrixXd t(b, nmodels);
  Eigen::VectorXd g(psi.rows());
  for (int r = 0; r < b; ++r) {
    auto row = t.row(r);
    replicate_stats(psi, offsets, norms, seed, r, g, [&](int m) -> double& { return row(m); });
  }
  return t;
}

}  // namespace alr::kernels
