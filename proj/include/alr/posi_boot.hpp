#pragma once

#include <Eigen/Core>
#include <cstdint>
#include <map>
#include <vector>

#include "alr/dataset.hpp"
#include "alr/model_space.hpp"
#include "alr/regress.hpp"

namespace alr {

// Standardized influence scores for every model in a collection, stored as
// one n x C matrix of contiguous per-model column blocks.
// Column j of model M holds (sigma_hat_M^-1 x_{i,M})_j * r_i / se_{M,j}.
struct InfluenceScores {
  Eigen::MatrixXd psi;                   // n x total coordinate count
  std::vector<std::ptrdiff_t> offsets;   // size nmodels + 1
  std::ptrdiff_t model_offset(std::size_t m) const { return offsets[m]; }
  int model_width(std::size_t m) const { return static_cast<int>(offsets[m + 1] - offsets[m]); }
};

// Per-model bootstrap samples of the max-|t| statistic.
struct BootstrapDraws {
  int b;
  Eigen::MatrixXd t;  // b x nmodels, all entries >= 0
  std::uint64_t seed;
};

// Median/MAD summaries and the four simultaneous quantiles.
struct PosiSummary {
  Eigen::VectorXd med;            // per model, median of its draws
  Eigen::VectorXd mad;            // per model, median absolute deviation (no constant)
  std::vector<char> mad_fallback; // mad below 1e-12, scaled statistic degraded to centered form
  std::map<int, double> med_frak; // per size s, median over draws of the size-s max
  double k0, k1, k2, k3;
  double alpha;
  bool any_fallback;
};

enum class PosiMethod : int { constant = 0, centered = 1, scaled = 2, size_adjusted = 3 };

// throws DomainError for anything outside {0,1,2,3}
PosiMethod posi_method_from_int(int method);

struct PosiRegion {
  PosiMethod method;
  ModelId model;
  Eigen::VectorXd center;  // beta_hat_M
  Eigen::VectorXd se;      // per-coordinate studentizers
  double threshold;        // m(R_hat): box is max_j |center_j - theta_j| / se_j <= threshold
};

// Builds the score matrix for all models.  fits and ses must be indexed as
// the collection is.  A zero se is accepted only when the corresponding raw
// score column is identically zero (perfect fit); otherwise it is an error.
InfluenceScores influence_scores(const Dataset& data, const ModelCollection& coll,
                                 const std::vector<OlsFit>& fits,
                                 const std::vector<Eigen::VectorXd>& ses);

// Gaussian-multiplier bootstrap of the per-model max-|t| statistics.
// Deterministic given seed and independent of the worker count.
BootstrapDraws multiplier_draws(const InfluenceScores& scores, int b, std::uint64_t seed);

PosiSummary summarize(const BootstrapDraws& draws, const ModelCollection& coll, double alpha);

// Threshold rules:
//   method 0: k0
//   method 1: med_M + k1
//   method 2: med_M + mad_M * k2
//   method 3: med_M + mad_M * (k3 + med_frak(|M|))
PosiRegion build_region(PosiMethod method, const ModelCollection& coll, std::size_t model_index,
                        const Eigen::VectorXd& beta_hat, const Eigen::VectorXd& se,
                        const PosiSummary& summary);

bool covers(const PosiRegion& region, const Eigen::VectorXd& target);

// smallest order statistic with rank >= ceil((1 - alpha) * b)
double empirical_quantile(std::vector<double> values, double alpha);

double median(std::vector<double> values);

}  // namespace alr
