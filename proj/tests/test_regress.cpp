#include <doctest.h>

#include <Eigen/Dense>
#include <cmath>
#include <cstdio>
#include <fstream>

#include "alr/errors.hpp"
#include "alr/linalg.hpp"
#include "alr/regress.hpp"
#include "test_helpers.hpp"

using namespace alr;
using namespace test_helpers;

namespace {

// independent oracle: entry-wise double-loop accumulation
GramPair gram_naive(const Dataset& data) {
  const int n = data.n(), d = data.d();
  GramPair g{Eigen::MatrixXd::Zero(d, d), Eigen::VectorXd::Zero(d)};
  for (int i = 0; i < n; ++i) {
    for (int r = 0; r < d; ++r) {
      g.gamma_hat(r) += data.x(i, r) * data.y(i);
      for (int c = 0; c < d; ++c) g.sigma_hat(r, c) += data.x(i, r) * data.x(i, c);
    }
  }
  g.sigma_hat /= n;
  g.gamma_hat /= n;
  return g;
}

// independent oracle: cyclic coordinate descent on -2 t'g + t'S t
Eigen::VectorXd coordinate_descent(const Eigen::MatrixXd& s, const Eigen::VectorXd& g, int sweeps) {
  Eigen::VectorXd t = Eigen::VectorXd::Zero(g.size());
  for (int sweep = 0; sweep < sweeps; ++sweep)
    for (int j = 0; j < g.size(); ++j) {
      double off = 0.0;
      for (int l = 0; l < g.size(); ++l)
        if (l != j) off += s(j, l) * t(l);
      t(j) = (g(j) - off) / s(j, j);
    }
  return t;
}

// independent oracle: power iteration for the largest |eigenvalue|
double power_iteration_abs_max(const Eigen::MatrixXd& a, std::uint64_t seed) {
  Eigen::VectorXd v = random_vector(static_cast<int>(a.rows()), seed).normalized();
  double lambda = 0.0;
  for (int it = 0; it < 5000; ++it) {
    Eigen::VectorXd w = a * v;
    const double norm = w.norm();
    if (norm == 0.0) return 0.0;
    v = w / norm;
    lambda = norm;
  }
  return lambda;
}

}  // namespace

TEST_CASE("compute_gram identity scaling") {
  Eigen::MatrixXd x(2, 2);
  x << std::sqrt(2.0), 0.0, 0.0, std::sqrt(2.0);
  const Dataset data(x, Eigen::VectorXd::Zero(2));
  const GramPair g = compute_gram(data);
  CHECK(g.sigma_hat.isApprox(Eigen::MatrixXd::Identity(2, 2), 1e-14));
  CHECK(g.gamma_hat.norm() == 0.0);
}

TEST_CASE("compute_gram two-point hand case") {
  Eigen::MatrixXd x(2, 2);
  x << 1, 0, 0, 1;
  Eigen::VectorXd y(2);
  y << 1, 2;
  const GramPair g = compute_gram(Dataset(x, y));
  CHECK(g.sigma_hat.isApprox(0.5 * Eigen::MatrixXd::Identity(2, 2), 1e-15));
  CHECK(g.gamma_hat(0) == doctest::Approx(0.5).epsilon(1e-15));
  CHECK(g.gamma_hat(1) == doctest::Approx(1.0).epsilon(1e-15));
}

TEST_CASE("compute_gram matches the double-loop oracle") {
  const Dataset data = random_dataset(8, 3, 42);
  const GramPair g = compute_gram(data);
  const GramPair o = gram_naive(data);
  CHECK((g.sigma_hat - o.sigma_hat).cwiseAbs().maxCoeff() < 1e-12);
  CHECK((g.gamma_hat - o.gamma_hat).cwiseAbs().maxCoeff() < 1e-12);
}

TEST_CASE("compute_gram rejects non-finite input") {
  Eigen::MatrixXd x(2, 1);
  x << 1.0, std::numeric_limits<double>::quiet_NaN();
  CHECK_THROWS_AS(Dataset(x, Eigen::VectorXd::Zero(2)), InvalidDataError);
}

TEST_CASE("extract_submodel diagonal selection") {
  GramPair g{Eigen::Vector3d(1, 2, 3).asDiagonal(), Eigen::Vector3d(0, 0, 0)};
  const auto [sm, gm] = extract_submodel(g, ModelId{2, 3});
  CHECK(sm.isApprox(Eigen::Vector2d(2, 3).asDiagonal().toDenseMatrix(), 1e-15));
}

TEST_CASE("subvector picks entries in model order") {
  Eigen::VectorXd v(4);
  v << 4, 3, 2, 1;
  const Eigen::VectorXd vm = subvector(v, ModelId{2, 3});
  CHECK(vm(0) == 3.0);
  CHECK(vm(1) == 2.0);
}

TEST_CASE("extract_submodel equals the column-restricted recomputation") {
  const Dataset data = random_dataset(12, 5, 7);
  const GramPair g = compute_gram(data);
  const ModelId m{1, 4, 5};
  const auto [sm, gm] = extract_submodel(g, m);
  const Dataset restricted(subcolumns(data.x, m), data.y);
  const GramPair gr = compute_gram(restricted);
  CHECK(sm.isApprox(gr.sigma_hat, 1e-13));
  CHECK(gm.isApprox(gr.gamma_hat, 1e-13));
}

TEST_CASE("extract_submodel rejects out-of-range indices") {
  GramPair g{Eigen::MatrixXd::Identity(3, 3), Eigen::VectorXd::Zero(3)};
  CHECK_THROWS_AS(extract_submodel(g, ModelId{2, 4}), IndexError);
}

TEST_CASE("solve_ols identity Gram") {
  Eigen::VectorXd gamma(2);
  gamma << 0.3, -0.7;
  const auto sol = solve_ols(Eigen::MatrixXd::Identity(2, 2), gamma);
  CHECK(sol.rank_ok);
  CHECK(sol.beta.isApprox(gamma, 1e-14));
}

TEST_CASE("solve_ols rank-one system returns the minimum-norm minimizer") {
  Eigen::MatrixXd s(2, 2);
  s << 1, 1, 1, 1;
  Eigen::VectorXd gamma(2);
  gamma << 1, 1;
  const auto sol = solve_ols(s, gamma);
  CHECK_FALSE(sol.rank_ok);
  CHECK(sol.beta(0) == doctest::Approx(0.5).epsilon(1e-12));
  CHECK(sol.beta(1) == doctest::Approx(0.5).epsilon(1e-12));
}

TEST_CASE("solve_ols agrees with the coordinate-descent oracle") {
  const Eigen::MatrixXd s = random_spd(4, 11, 0.8, 2.5);
  const Eigen::VectorXd gamma = random_vector(4, 12);
  const auto sol = solve_ols(s, gamma);
  const Eigen::VectorXd oracle = coordinate_descent(s, gamma, 4000);
  CHECK((sol.beta - oracle).cwiseAbs().maxCoeff() < 1e-6);
}

TEST_CASE("solve_ols output satisfies the normal equations when rank_ok") {
  for (std::uint64_t seed = 0; seed < 25; ++seed) {
    const int d = 1 + static_cast<int>(seed % 6);
    const Dataset data = random_dataset(d + 10, d, 100 + seed);
    const GramPair g = compute_gram(data);
    const auto sol = solve_ols(g.sigma_hat, g.gamma_hat);
    if (sol.rank_ok)
      CHECK((g.sigma_hat * sol.beta - g.gamma_hat).norm() <= 1e-8 * (1.0 + g.gamma_hat.norm()));
  }
}

TEST_CASE("target_beta full model returns beta0") {
  const Eigen::MatrixXd x = random_matrix(20, 4, 5);
  const Eigen::VectorXd beta0 = random_vector(4, 6);
  CHECK(target_beta(x, beta0, ModelId{1, 2, 3, 4}).isApprox(beta0, 1e-14));
}

TEST_CASE("target_beta on an orthogonal design restricts beta0") {
  // scale so the Gram is the identity
  Eigen::MatrixXd x = Eigen::MatrixXd::Identity(6, 3) * std::sqrt(6.0);
  const Eigen::VectorXd beta0 = random_vector(3, 8);
  const Eigen::VectorXd bm = target_beta(x, beta0, ModelId{1, 3});
  CHECK(bm(0) == doctest::Approx(beta0(0)).epsilon(1e-12));
  CHECK(bm(1) == doctest::Approx(beta0(2)).epsilon(1e-12));
}

TEST_CASE("target_beta matches the least-squares-on-means oracle") {
  const Eigen::MatrixXd x = random_matrix(30, 4, 99);
  const Eigen::VectorXd beta0 = random_vector(4, 98);
  const ModelId m{1, 2};
  const Eigen::VectorXd bm = target_beta(x, beta0, m);
  // minimize sum_i (x_i' beta0 - x_{i,M}' t)^2 by coordinate descent
  const Eigen::MatrixXd xm = subcolumns(x, m);
  const Eigen::VectorXd mean = x * beta0;
  const Eigen::MatrixXd s = xm.transpose() * xm;
  const Eigen::VectorXd g = xm.transpose() * mean;
  const Eigen::VectorXd oracle = coordinate_descent(s, g, 4000);
  CHECK((bm - oracle).cwiseAbs().maxCoeff() < 1e-8);
}

TEST_CASE("d_sigma is zero when the matrices agree") {
  const Eigen::MatrixXd s = random_spd(3, 21);
  CHECK(d_sigma(s, s) < 1e-13);
}

TEST_CASE("d_sigma diagonal spectrum") {
  Eigen::MatrixXd sh = Eigen::Vector2d(1.5, 0.8).asDiagonal();
  CHECK(d_sigma(sh, Eigen::MatrixXd::Identity(2, 2)) == doctest::Approx(0.5).epsilon(1e-13));
}

TEST_CASE("d_sigma matches the power-iteration oracle") {
  const Eigen::MatrixXd sh = random_spd(4, 31, 0.5, 3.0);
  const Eigen::MatrixXd s = random_spd(4, 32, 0.5, 3.0);
  const double got = d_sigma(sh, s);
  const Eigen::MatrixXd w = inv_sqrt_pd(s);
  const Eigen::MatrixXd whitened = symmetrize(w * sh * w) - Eigen::MatrixXd::Identity(4, 4);
  const double oracle = power_iteration_abs_max(whitened, 33);
  CHECK(std::abs(got - oracle) < 1e-8);
}

TEST_CASE("d_sigma rejects non-PD reference") {
  Eigen::MatrixXd s = Eigen::MatrixXd::Zero(2, 2);
  s(0, 0) = 1.0;
  CHECK_THROWS_AS(d_sigma(Eigen::MatrixXd::Identity(2, 2), s), NotPositiveDefiniteError);
}

TEST_CASE("det_inequality_report collapses when sigma equals the sample Gram") {
  const Dataset data = random_dataset(40, 3, 51);
  const GramPair g = compute_gram(data);
  const ModelId m{1, 2, 3};
  const Eigen::VectorXd beta = random_vector(3, 52);
  const DetIneqReport rep = det_inequality_report(data, m, g.sigma_hat, beta);
  CHECK(rep.d_sigma < 1e-12);
  CHECK(close_rel(rep.lower, rep.actual, 1e-10));
  CHECK(close_rel(rep.upper, rep.actual, 1e-10));
  CHECK(rep.linrep_error <= 1e-10);
}

TEST_CASE("det_inequality_report score vanishes at the fitted coefficients") {
  const Dataset data = random_dataset(25, 3, 61);
  const GramPair g = compute_gram(data);
  const ModelId m{1, 2, 3};
  const auto fit = solve_ols(g.sigma_hat, g.gamma_hat);
  const DetIneqReport rep = det_inequality_report(data, m, g.sigma_hat, fit.beta);
  CHECK(rep.score_norm < 1e-10);
  CHECK(rep.actual < 1e-10);
}

TEST_CASE("bracket and linear-representation bound hold on random triples") {
  int checked = 0;
  for (std::uint64_t seed = 0; seed < 200; ++seed) {
    alr::Rng rng(seed * 7 + 1);
    const int d = 1 + static_cast<int>(rng.next() % 4);
    const int n = d + 2 + static_cast<int>(rng.next() % 40);
    const Dataset data = random_dataset(n, d, 1000 + seed);
    const Eigen::MatrixXd sigma = random_spd(d, 2000 + seed, 0.3, 3.0);
    const Eigen::VectorXd beta = 2.0 * random_vector(d, 3000 + seed);
    std::vector<int> all(d);
    for (int j = 0; j < d; ++j) all[static_cast<std::size_t>(j)] = j + 1;
    const DetIneqReport rep = det_inequality_report(data, ModelId(all), sigma, beta);
    CHECK(leq_rel(rep.lower, rep.actual, 1e-8));
    CHECK(leq_rel(rep.actual, rep.upper, 1e-8));
    CHECK(leq_rel(rep.linrep_error, rep.linrep_bound, 1e-8));
    ++checked;
  }
  CHECK(checked == 200);
}

TEST_CASE("affine change of basis leaves the report invariant") {
  const Dataset data = random_dataset(30, 3, 71);
  const Eigen::MatrixXd sigma = random_spd(3, 72);
  const Eigen::VectorXd beta = random_vector(3, 73);
  const ModelId m{1, 2, 3};
  const DetIneqReport rep = det_inequality_report(data, m, sigma, beta);

  const Eigen::MatrixXd a = random_spd(3, 74, 0.5, 2.0);  // invertible
  const Dataset transformed(data.x * a, data.y);
  const Eigen::MatrixXd sigma_t = a.transpose() * sigma * a;
  const Eigen::VectorXd beta_t = a.inverse() * beta;
  const DetIneqReport rep_t = det_inequality_report(transformed, m, sigma_t, beta_t);

  CHECK(close_rel(rep.d_sigma, rep_t.d_sigma, 1e-8));
  CHECK(close_rel(rep.score_norm, rep_t.score_norm, 1e-8));
  CHECK(close_rel(rep.actual, rep_t.actual, 1e-8));
  CHECK(close_rel(rep.lower, rep_t.lower, 1e-8));
  CHECK(close_rel(rep.upper, rep_t.upper, 1e-8));
}

TEST_CASE("d_sigma vanishes only at the reference") {
  const Eigen::MatrixXd s = random_spd(3, 81);
  Eigen::MatrixXd perturbed = s;
  perturbed(0, 0) += 0.1;
  CHECK(d_sigma(perturbed, s) > 1e-3);
}

TEST_CASE("loo_gram_bound zero last row gives the scalar inflation case") {
  Eigen::MatrixXd x = random_matrix(10, 2, 91);
  x.row(9).setZero();
  const auto [lhs, rhs] = loo_gram_bound(Dataset(x, Eigen::VectorXd::Zero(10)));
  CHECK(lhs == doctest::Approx(1.0 / 9.0).epsilon(1e-10));
  CHECK(rhs == doctest::Approx(1.0 / 9.0).epsilon(1e-12));
}

TEST_CASE("loo_gram_bound identical rows") {
  Eigen::MatrixXd x(2, 1);
  x << 1, 1;
  const auto [lhs, rhs] = loo_gram_bound(Dataset(x, Eigen::VectorXd::Zero(2)));
  CHECK(lhs < 1e-14);
  CHECK(rhs == doctest::Approx(2.0).epsilon(1e-14));
}

TEST_CASE("loo_gram_bound holds on random data") {
  const Dataset data = random_dataset(20, 3, 95);
  const auto [lhs, rhs] = loo_gram_bound(data);
  CHECK(lhs <= rhs + 1e-10);
}

TEST_CASE("csv ingestion: y column anywhere, covariates in file order") {
  const std::string path = "alr_test_data.csv";
  {
    std::ofstream out(path);
    out << "a,y,b\n1.5,2.0,3.25\n-0.5,0.0,4.0\n";
  }
  const Dataset data = load_csv(path);
  CHECK(data.n() == 2);
  CHECK(data.d() == 2);
  CHECK(data.x(0, 0) == 1.5);
  CHECK(data.x(0, 1) == 3.25);
  CHECK(data.y(0) == 2.0);
  CHECK(data.y(1) == 0.0);
  const auto names = csv_covariate_names(path);
  REQUIRE(names.size() == 2);
  CHECK(names[0] == "a");
  CHECK(names[1] == "b");
  std::remove(path.c_str());
}

TEST_CASE("csv ingestion rejects malformed input") {
  const std::string path = "alr_test_bad.csv";
  {
    std::ofstream out(path);
    out << "a,b\n1.0,2.0\n";
  }
  CHECK_THROWS_AS(load_csv(path), InvalidDataError);  // no response column
  {
    std::ofstream out(path);
    out << "a,y\n1.0,oops\n";
  }
  CHECK_THROWS_AS(load_csv(path), InvalidDataError);
  {
    std::ofstream out(path);
    out << "a,y\n1.0\n";
  }
  CHECK_THROWS_AS(load_csv(path), InvalidDataError);  // ragged row
  std::remove(path.c_str());
  CHECK_THROWS_AS(load_csv("alr_no_such_file.csv"), InvalidDataError);
}

TEST_CASE("dataset shape invariants") {
  CHECK_THROWS_AS(Dataset(Eigen::MatrixXd::Zero(3, 2), Eigen::VectorXd::Zero(2)), InvalidDataError);
  CHECK_THROWS_AS(Dataset(Eigen::MatrixXd(0, 2), Eigen::VectorXd(0)), InvalidDataError);
}

TEST_CASE("target_beta rejects a singular restricted Gram") {
  Eigen::MatrixXd x = random_matrix(8, 3, 303);
  x.col(1) = x.col(0);  // restricted block {1,2} is rank one
  CHECK_THROWS_AS(target_beta(x, Eigen::Vector3d(1.0, 0.0, -1.0), ModelId{1, 2}), RankError);
}

TEST_CASE("loo_gram_bound needs at least two rows") {
  Eigen::MatrixXd x(1, 1);
  x << 1.0;
  CHECK_THROWS_AS(loo_gram_bound(Dataset(x, Eigen::VectorXd::Ones(1))), DomainError);
}

TEST_CASE("gram pair is exactly symmetric and positive semi-definite") {
  const Dataset data = random_dataset(37, 5, 301);
  const GramPair g = compute_gram(data);
  CHECK((g.sigma_hat - g.sigma_hat.transpose()).cwiseAbs().maxCoeff() == 0.0);
  Eigen::SelfAdjointEigenSolver<Eigen::MatrixXd> es(g.sigma_hat);
  CHECK(es.eigenvalues().minCoeff() >= -1e-10 * g.sigma_hat.trace());
}

TEST_CASE("csv ingestion tolerates CRLF line endings") {
  const std::string path = "alr_test_crlf.csv";
  {
    std::ofstream out(path, std::ios::binary);
    out << "x1,y\r\n1.0,2.0\r\n3.0,4.0\r\n";
  }
  const Dataset data = load_csv(path);
  CHECK(data.n() == 2);
  CHECK(data.x(1, 0) == 3.0);
  CHECK(data.y(1) == 4.0);
  std::remove(path.c_str());
}
