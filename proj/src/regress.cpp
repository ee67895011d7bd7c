#include "alr/regress.hpp"

#include <cmath>
#include <limits>

#include "alr/errors.hpp"
#include "alr/kernels.hpp"
#include "alr/linalg.hpp"

namespace alr {

GramPair compute_gram(const Dataset& data) {
  const double n = static_cast<double>(data.n());
  auto sums = kernels::gram_sums(data.x, data.y);
  GramPair g;
  g.sigma_hat = symmetrize(sums.xtx / n);
  g.gamma_hat = sums.xty / n;
  return g;
}

std::pair<Eigen::MatrixXd, Eigen::VectorXd> extract_submodel(const GramPair& g, const ModelId& m) {
  return {submatrix(g.sigma_hat, m), subvector(g.gamma_hat, m)};
}

OlsSolve solve_ols(const Eigen::MatrixXd& g_m, const Eigen::VectorXd& gamma_m) {
  auto sol = solve_spd_minnorm(g_m, gamma_m);
  return {std::move(sol.x), sol.rank_ok};
}

OlsFit fit_model(const Dataset& data, const GramPair& g, const ModelId& m) {
  auto [sm, gm] = extract_submodel(g, m);
  auto sol = solve_ols(sm, gm);
  const Eigen::MatrixXd xm = subcolumns(data.x, m);
  Eigen::VectorXd resid = data.y - xm * sol.beta;
  return OlsFit{m, std::move(sol.beta), std::move(resid), std::move(sm), sol.rank_ok};
}

Eigen::VectorXd target_beta(const Eigen::MatrixXd& design, const Eigen::VectorXd& beta0, const ModelId& m) {
  if (beta0.size() != design.cols()) throw DomainError("beta0 length does not match design columns");
  m.check_within(static_cast<int>(design.cols()));
  const double n = static_cast<double>(design.rows());
  const Eigen::MatrixXd sigma_hat = symmetrize(design.transpose() * design / n);
  const Eigen::VectorXd mean_proj = sigma_hat * beta0;
  if (m.size() == design.cols()) return beta0;
  const Eigen::MatrixXd sm = submatrix(sigma_hat, m);
  auto sol = solve_spd_minnorm(sm, subvector(mean_proj, m));
  if (!sol.rank_ok) throw RankError("design Gram singular on model " + m.str());
  return sol.x;
}

double d_sigma(const Eigen::MatrixXd& sigma_hat_m, const Eigen::MatrixXd& sigma_m) {
  if (sigma_hat_m.rows() != sigma_m.rows() || sigma_hat_m.cols() != sigma_m.cols())
    throw DomainError("d_sigma: dimension mismatch");
  const Eigen::MatrixXd w = inv_sqrt_pd(sigma_m);
  const Eigen::MatrixXd whitened = symmetrize(w * symmetrize(sigma_hat_m) * w);
  return operator_norm_sym(whitened - Eigen::MatrixXd::Identity(w.rows(), w.cols()));
}

DetIneqReport det_inequality_report(const Dataset& data, const ModelId& m, const Eigen::MatrixXd& sigma,
                                    const Eigen::VectorXd& beta) {
  if (beta.size() != m.size()) throw DomainError("beta length must equal model size");
  const GramPair g = compute_gram(data);
  auto [sigma_hat_m, gamma_hat_m] = extract_submodel(g, m);
  const Eigen::MatrixXd sigma_m = submatrix(sigma, m);

  DetIneqReport rep{};
  rep.d_sigma = d_sigma(sigma_hat_m, sigma_m);

  // score = sigma_m^-1 (gamma_hat_m - sigma_hat_m beta)
  const Eigen::VectorXd raw = gamma_hat_m - sigma_hat_m * beta;
  const Eigen::MatrixXd w = inv_sqrt_pd(sigma_m);
  const Eigen::VectorXd score = w * (w * raw);
  rep.score_norm = sigma_norm(score, sigma_m);

  const auto fit = solve_ols(sigma_hat_m, gamma_hat_m);
  const Eigen::VectorXd err = fit.beta - beta;
  rep.actual = sigma_norm(err, sigma_m);
  rep.linrep_error = sigma_norm(err - score, sigma_m);

  const double inf = std::numeric_limits<double>::infinity();
  rep.lower = rep.score_norm / (1.0 + rep.d_sigma);
  rep.upper = rep.d_sigma < 1.0 ? rep.score_norm / (1.0 - rep.d_sigma) : inf;
  rep.linrep_bound = rep.d_sigma < 1.0 ? rep.d_sigma * rep.score_norm / (1.0 - rep.d_sigma) : inf;
  return rep;
}

std::pair<double, double> loo_gram_bound(const Dataset& data) {
  const int n = data.n();
  if (n < 2) throw DomainError("leave-one-out bound needs n >= 2");
  const GramPair g = compute_gram(data);
  const Eigen::VectorXd xn = data.x.row(n - 1).transpose();
  const Eigen::MatrixXd sigma_loo =
      symmetrize((data.x.transpose() * data.x - xn * xn.transpose()) / static_cast<double>(n - 1));
  const Eigen::MatrixXd w = inv_sqrt_pd(g.sigma_hat);
  const Eigen::MatrixXd whitened = symmetrize(w * sigma_loo * w);
  const double lhs = operator_norm_sym(whitened - Eigen::MatrixXd::Identity(data.d(), data.d()));
  const double rhs = (1.0 + (w * xn).squaredNorm()) / static_cast<double>(n - 1);
  return {lhs, rhs};
}

}  // namespace alr
