#include <doctest.h>

#include <Eigen/Dense>
#include <algorithm>
#include <cmath>
#include <vector>

#include "alr/chisq.hpp"
#include "alr/errors.hpp"
#include "alr/linalg.hpp"
#include "alr/sandwich.hpp"
#include "alr/simlab.hpp"
#include "test_helpers.hpp"

using namespace alr;
using namespace test_helpers;

namespace {

OlsFit full_fit(const Dataset& data) {
  std::vector<int> all(static_cast<std::size_t>(data.d()));
  for (int j = 0; j < data.d(); ++j) all[static_cast<std::size_t>(j)] = j + 1;
  return fit_model(data, compute_gram(data), ModelId(all));
}

Eigen::MatrixXd meat_naive(const Dataset& data, const OlsFit& fit) {
  const Eigen::MatrixXd xm = subcolumns(data.x, fit.model);
  const int n = data.n(), w = static_cast<int>(xm.cols());
  Eigen::MatrixXd v = Eigen::MatrixXd::Zero(w, w);
  for (int i = 0; i < n; ++i)
    for (int r = 0; r < w; ++r)
      for (int c = 0; c < w; ++c) v(r, c) += xm(i, r) * xm(i, c) * fit.residuals(i) * fit.residuals(i);
  return v / (static_cast<double>(n) * n);
}

}  // namespace

TEST_CASE("meat is zero under a perfect fit") {
  Eigen::MatrixXd x = random_matrix(10, 2, 1);
  const Eigen::VectorXd beta = random_vector(2, 2);
  const Dataset data(x, x * beta);
  const OlsFit fit = full_fit(data);
  CHECK(meat_estimate(data, fit).cwiseAbs().maxCoeff() < 1e-24);
}

TEST_CASE("meat single observation") {
  Eigen::MatrixXd x(1, 2);
  x << 2.0, -1.0;
  Eigen::VectorXd y(1);
  y << 3.0;
  const Dataset data(x, y);
  // residual forced by an arbitrary coefficient vector
  OlsFit fit{ModelId{1, 2}, Eigen::Vector2d(0.0, 0.0), y, Eigen::MatrixXd::Identity(2, 2), true};
  const Eigen::MatrixXd v = meat_estimate(data, fit);
  const Eigen::MatrixXd expected = x.transpose() * x * 9.0;  // n = 1
  CHECK(v.isApprox(expected, 1e-14));
}

TEST_CASE("meat matches the double-loop oracle") {
  const Dataset data = random_dataset(30, 3, 5);
  const OlsFit fit = full_fit(data);
  const Eigen::MatrixXd v = meat_estimate(data, fit);
  CHECK((v - meat_naive(data, fit)).cwiseAbs().maxCoeff() < 1e-12);
}

TEST_CASE("sandwich with identity bread returns the meat") {
  const Eigen::MatrixXd meat = random_spd(3, 7, 0.1, 1.0);
  const auto sv = sandwich_variance(Eigen::MatrixXd::Identity(3, 3), meat);
  CHECK(sv.avar.isApprox(meat, 1e-12));
  for (int j = 0; j < 3; ++j) CHECK(sv.se(j) == doctest::Approx(std::sqrt(meat(j, j))).epsilon(1e-12));
}

TEST_CASE("homoscedastic meat shape cancels one bread factor") {
  const Eigen::MatrixXd s = random_spd(3, 9, 0.5, 2.0);
  const double sigma2 = 1.7;
  const int n = 50;
  const auto sv = sandwich_variance(s, sigma2 * s / n);
  CHECK(sv.avar.isApprox(sigma2 * s.inverse() / n, 1e-10));
}

TEST_CASE("sandwich avar is symmetric positive semi-definite") {
  const Dataset data = random_dataset(25, 4, 13);
  const OlsFit fit = full_fit(data);
  const auto sv = sandwich_variance(fit.sigma_hat_m, meat_estimate(data, fit));
  CHECK(sv.avar.isApprox(sv.avar.transpose(), 1e-12));
  Eigen::SelfAdjointEigenSolver<Eigen::MatrixXd> es(sv.avar);
  CHECK(es.eigenvalues().minCoeff() >= -1e-12 * sv.avar.trace());
}

TEST_CASE("sandwich rejects a singular bread") {
  Eigen::MatrixXd s(2, 2);
  s << 1, 1, 1, 1;
  CHECK_THROWS_AS(sandwich_variance(s, Eigen::MatrixXd::Identity(2, 2)), RankError);
}

TEST_CASE("chi-square quantile reference values") {
  CHECK(std::abs(chisq_quantile(1, 0.05) - 3.8415) < 1e-3);
  CHECK(std::abs(chisq_quantile(2, 0.05) - (-2.0 * std::log(0.05))) < 1e-6);
  CHECK_THROWS_AS(chisq_quantile(2, 0.0), DomainError);
  CHECK_THROWS_AS(chisq_quantile(0, 0.5), DomainError);
}

TEST_CASE("chi-square quantile df=20 against a Monte-Carlo oracle") {
  const int draws = 10'000'000;
  std::vector<double> sums(static_cast<std::size_t>(draws));
  alr::Rng rng(20250424);
  for (auto& s : sums) {
    double acc = 0.0;
    for (int j = 0; j < 20; ++j) {
      const double z = rng.normal();
      acc += z * z;
    }
    s = acc;
  }
  const auto rank = static_cast<std::ptrdiff_t>(0.95 * draws);
  std::nth_element(sums.begin(), sums.begin() + rank, sums.end());
  CHECK(std::abs(chisq_quantile(20, 0.05) - sums[static_cast<std::size_t>(rank)]) < 0.02);
}

TEST_CASE("chi-square region membership") {
  const Dataset data = random_dataset(60, 3, 17);
  const OlsFit fit = full_fit(data);
  const auto sv = sandwich_variance(fit.sigma_hat_m, meat_estimate(data, fit));
  const auto region = chi_square_region(fit, sv, 0.05);

  CHECK(region_contains_chi(region, sv, fit.beta_hat));

  // oracle: quadratic form written with the bread and meat directly
  const Eigen::MatrixXd form = fit.sigma_hat_m * sv.meat.inverse() * fit.sigma_hat_m;
  for (std::uint64_t s = 0; s < 40; ++s) {
    const Eigen::VectorXd theta = fit.beta_hat + 0.3 * random_vector(3, 100 + s);
    const bool oracle = (fit.beta_hat - theta).dot(form * (fit.beta_hat - theta)) <= region.threshold;
    CHECK(region_contains_chi(region, sv, theta) == oracle);
  }
}

TEST_CASE("chi-square region in one dimension is the usual interval") {
  const Dataset data = random_dataset(50, 1, 19);
  const OlsFit fit = full_fit(data);
  const auto sv = sandwich_variance(fit.sigma_hat_m, meat_estimate(data, fit));
  const auto region = chi_square_region(fit, sv, 0.05);
  const double half = std::sqrt(region.threshold) * sv.se(0);
  Eigen::VectorXd inside(1), outside(1);
  inside << fit.beta_hat(0) + 0.999 * half;
  outside << fit.beta_hat(0) + 1.001 * half;
  CHECK(region_contains_chi(region, sv, inside));
  CHECK_FALSE(region_contains_chi(region, sv, outside));
}

TEST_CASE("max-t region membership") {
  const Dataset data = random_dataset(40, 2, 23);
  const OlsFit fit = full_fit(data);
  const auto sv = sandwich_variance(fit.sigma_hat_m, meat_estimate(data, fit));
  const auto region = max_t_region(fit, sv, 1.96, 0.05);

  CHECK(region_contains_max_t(region, sv, fit.beta_hat));

  for (std::uint64_t s = 0; s < 40; ++s) {
    const Eigen::VectorXd theta = fit.beta_hat + 0.5 * random_vector(2, 300 + s);
    bool oracle = true;
    for (int j = 0; j < 2; ++j)
      oracle = oracle && std::abs(fit.beta_hat(j) - theta(j)) <= 1.96 * sv.se(j);
    CHECK(region_contains_max_t(region, sv, theta) == oracle);
  }
}

TEST_CASE("max-t region in one dimension") {
  const Dataset data = random_dataset(50, 1, 29);
  const OlsFit fit = full_fit(data);
  const auto sv = sandwich_variance(fit.sigma_hat_m, meat_estimate(data, fit));
  const auto region = max_t_region(fit, sv, 1.96, 0.05);
  Eigen::VectorXd inside(1), outside(1);
  inside << fit.beta_hat(0) - 1.95 * sv.se(0);
  outside << fit.beta_hat(0) - 1.97 * sv.se(0);
  CHECK(region_contains_max_t(region, sv, inside));
  CHECK_FALSE(region_contains_max_t(region, sv, outside));
}

TEST_CASE("max-t region rejects zero standard errors") {
  OlsFit fit{ModelId{1, 2}, Eigen::Vector2d(1.0, 2.0), Eigen::VectorXd::Zero(4),
             Eigen::MatrixXd::Identity(2, 2), true};
  const auto sv = sandwich_variance(fit.sigma_hat_m, Eigen::MatrixXd::Zero(2, 2));
  CHECK(sv.se.cwiseAbs().maxCoeff() == 0.0);
  CHECK_THROWS_AS(max_t_region(fit, sv, 1.96, 0.05), DegenerateVarianceError);
}

TEST_CASE("sandwich converges to the homoscedastic variance on a fixed design") {
  const int n = 2000, d = 3;
  const Eigen::MatrixXd x = make_design({DesignKind::orthogonal, d, n}, 404);
  const Eigen::VectorXd beta = random_vector(d, 41);
  const Eigen::VectorXd y = draw_response(x, beta, 1.0, 42);
  const Dataset data(x, y);
  const OlsFit fit = full_fit(data);
  const auto sv = sandwich_variance(fit.sigma_hat_m, meat_estimate(data, fit));
  const Eigen::MatrixXd target = fit.sigma_hat_m.inverse() / n;  // sigma^2 = 1
  CHECK((sv.avar - target).norm() <= 0.1 * target.norm());
}

TEST_CASE("chi-square region is affine equivariant") {
  const Dataset data = random_dataset(80, 3, 47);
  const OlsFit fit = full_fit(data);
  const auto sv = sandwich_variance(fit.sigma_hat_m, meat_estimate(data, fit));
  const auto region = chi_square_region(fit, sv, 0.1);

  const Eigen::MatrixXd a = random_spd(3, 48, 0.4, 2.2);
  const Dataset mapped(data.x * a, data.y);
  const OlsFit fit_m = full_fit(mapped);
  const auto sv_m = sandwich_variance(fit_m.sigma_hat_m, meat_estimate(mapped, fit_m));
  const auto region_m = chi_square_region(fit_m, sv_m, 0.1);

  const Eigen::MatrixXd a_inv = a.inverse();
  for (std::uint64_t s = 0; s < 30; ++s) {
    const Eigen::VectorXd theta = fit.beta_hat + 0.4 * random_vector(3, 500 + s);
    CHECK(region_contains_chi(region, sv, theta) ==
          region_contains_chi(region_m, sv_m, a_inv * theta));
  }
}

TEST_CASE("max-t region is invariant under positive covariate rescaling") {
  const Dataset data = random_dataset(60, 3, 53);
  const OlsFit fit = full_fit(data);
  const auto sv = sandwich_variance(fit.sigma_hat_m, meat_estimate(data, fit));
  const auto region = max_t_region(fit, sv, 2.1, 0.05);

  const double c = 3.5;  // rescale the second covariate
  Eigen::MatrixXd xs = data.x;
  xs.col(1) *= c;
  const Dataset scaled(xs, data.y);
  const OlsFit fit_s = full_fit(scaled);
  const auto sv_s = sandwich_variance(fit_s.sigma_hat_m, meat_estimate(scaled, fit_s));
  const auto region_s = max_t_region(fit_s, sv_s, 2.1, 0.05);

  CHECK(fit_s.beta_hat(1) == doctest::Approx(fit.beta_hat(1) / c).epsilon(1e-10));
  CHECK(sv_s.se(1) == doctest::Approx(sv.se(1) / c).epsilon(1e-10));
  for (std::uint64_t s = 0; s < 30; ++s) {
    Eigen::VectorXd theta = fit.beta_hat + 0.4 * random_vector(3, 700 + s);
    Eigen::VectorXd theta_s = theta;
    theta_s(1) /= c;
    CHECK(region_contains_max_t(region, sv, theta) == region_contains_max_t(region_s, sv_s, theta_s));
  }
}

TEST_CASE("chi-square membership rejects a singular meat") {
  const Dataset data = random_dataset(30, 2, 59);
  const OlsFit fit = full_fit(data);
  const auto good = sandwich_variance(fit.sigma_hat_m, meat_estimate(data, fit));
  const auto region = chi_square_region(fit, good, 0.05);
  SandwichVariance degenerate = good;
  degenerate.avar.setZero();
  CHECK_THROWS_AS(region_contains_chi(region, degenerate, fit.beta_hat), RankError);
}
