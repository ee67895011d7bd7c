#pragma once

#include <Eigen/Core>

#include "alr/dataset.hpp"
#include "alr/model_id.hpp"

namespace alr {

// Sample second-moment pair: sigma_hat = n^-1 sum x_i x_i',
// gamma_hat = n^-1 sum x_i y_i.
struct GramPair {
  Eigen::MatrixXd sigma_hat;
  Eigen::VectorXd gamma_hat;
};

struct OlsFit {
  ModelId model;
  Eigen::VectorXd beta_hat;
  Eigen::VectorXd residuals;   // y_i - x_{i,M}' beta_hat
  Eigen::MatrixXd sigma_hat_m;
  bool rank_ok;
};

// Deterministic error-bound report for one model against a reference
// (sigma, beta) pair.
struct DetIneqReport {
  double d_sigma;       // operator-norm discrepancy of the whitened Gram
  double score_norm;    // || sigma^-1 (gamma_hat - sigma_hat beta) ||_sigma
  double lower;         // score_norm / (1 + d_sigma)
  double upper;         // score_norm / (1 - d_sigma)_+, +inf when d_sigma >= 1
  double actual;        // || beta_hat - beta ||_sigma
  double linrep_error;  // || beta_hat - beta - sigma^-1 (gamma_hat - sigma_hat beta) ||_sigma
  double linrep_bound;  // d_sigma * score_norm / (1 - d_sigma)_+
};

GramPair compute_gram(const Dataset& data);

// (sigma_hat_M, gamma_hat_M) by index selection
std::pair<Eigen::MatrixXd, Eigen::VectorXd> extract_submodel(const GramPair& g, const ModelId& m);

struct OlsSolve {
  Eigen::VectorXd beta;
  bool rank_ok;
};

// Coefficients minimizing -2 theta' gamma_m + theta' g_m theta.  Rank
// deficient systems get the minimum-norm minimizer and rank_ok = false.
OlsSolve solve_ols(const Eigen::MatrixXd& g_m, const Eigen::VectorXd& gamma_m);

// Full fit for one model: coefficients, residuals, Gram block.
OlsFit fit_model(const Dataset& data, const GramPair& g, const ModelId& m);

// Best linear predictor coefficients in model M for a fixed design with
// mean response X beta0:  beta_M = sigma_hat_M^-1 (sigma_hat beta0)_M.
Eigen::VectorXd target_beta(const Eigen::MatrixXd& design, const Eigen::VectorXd& beta0, const ModelId& m);

// || sigma_m^-1/2 sigma_hat_m sigma_m^-1/2 - I ||_op
double d_sigma(const Eigen::MatrixXd& sigma_hat_m, const Eigen::MatrixXd& sigma_m);

// Evaluates the two-sided estimation-error bracket and the linear
// representation bound for model m, reference matrix sigma (full d x d)
// and reference coefficients beta (length |m|).
DetIneqReport det_inequality_report(const Dataset& data, const ModelId& m, const Eigen::MatrixXd& sigma,
                                    const Eigen::VectorXd& beta);

// Leave-one-out Gram perturbation: returns (lhs, rhs) with
// lhs = || sigma_hat^-1/2 sigma_hat_{-n} sigma_hat^-1/2 - I ||_op and
// rhs = (n-1)^-1 (1 + || sigma_hat^-1/2 x_n ||^2); lhs <= rhs always.
std::pair<double, double> loo_gram_bound(const Dataset& data);

}  // namespace alr
