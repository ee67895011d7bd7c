// Compares the OpenMP kernels against their serial references.
#include <chrono>
#include <cstdio>
#include <omp.h>

#include "alr/kernels.hpp"
#include "alr/rng.hpp"

namespace {

using Clock = std::chrono::steady_clock;

double seconds_since(Clock::time_point t0) {
  return std::chrono::duration<double>(Clock::now() - t0).count();
}

Eigen::MatrixXd random_matrix(int n, int d, std::uint64_t seed) {
  alr::Rng rng(seed);
  Eigen::MatrixXd x(n, d);
  for (int i = 0; i < n; ++i)
    for (int j = 0; j < d; ++j) x(i, j) = rng.normal();
  return x;
}

template <typename F>
double time_best_of(int repeats, F&& f) {
  double best = 1e30;
  for (int i = 0; i < repeats; ++i) {
    const auto t0 = Clock::now();
    f();
    best = std::min(best, seconds_since(t0));
  }
  return best;
}

}  // namespace

int main() {
  std::printf("threads: %d\n", omp_get_max_threads());

  {
    const int n = 200000, d = 40;
    const Eigen::MatrixXd x = random_matrix(n, d, 1);
    const Eigen::VectorXd y = random_matrix(n, 1, 2);
    const double ts = time_best_of(3, [&] { alr::kernels::gram_sums_serial(x, y); });
    const double tp = time_best_of(3, [&] { alr::kernels::gram_sums(x, y); });
    std::printf("gram       n=%d d=%d   serial %.4fs   parallel %.4fs   speedup %.2fx\n", n, d, ts, tp,
                ts / tp);
  }

  {
    const int n = 200000, d = 40;
    const Eigen::MatrixXd x = random_matrix(n, d, 3);
    const Eigen::VectorXd r = random_matrix(n, 1, 4);
    const double ts = time_best_of(3, [&] { alr::kernels::weighted_gram_serial(x, r); });
    const double tp = time_best_of(3, [&] { alr::kernels::weighted_gram(x, r); });
    std::printf("meat       n=%d d=%d   serial %.4fs   parallel %.4fs   speedup %.2fx\n", n, d, ts, tp,
                ts / tp);
  }

  {
    const int n = 400, c = 2000, b = 500;
    const Eigen::MatrixXd psi = random_matrix(n, c, 5);
    std::vector<std::ptrdiff_t> offsets;
    for (std::ptrdiff_t j = 0; j <= c; j += 4) offsets.push_back(j);
    const double ts =
        time_best_of(3, [&] { alr::kernels::multiplier_stats_serial(psi, offsets, b, 7); });
    const double tp = time_best_of(3, [&] { alr::kernels::multiplier_stats(psi, offsets, b, 7); });
    const auto a = alr::kernels::multiplier_stats_serial(psi, offsets, b, 7);
    const auto p = alr::kernels::multiplier_stats(psi, offsets, b, 7);
    const bool same = (a.array() == p.array()).all();
    std::printf("bootstrap  n=%d C=%d b=%d   serial %.4fs   parallel %.4fs   speedup %.2fx   bitwise %s\n",
                n, c, b, ts, tp, ts / tp, same ? "equal" : "DIFFERENT");
  }
  return 0;
}
