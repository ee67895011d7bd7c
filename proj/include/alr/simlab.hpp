#pragma once

#include <Eigen/Core>
#include <cstdint>
#include <map>
#include <string>
#include <vector>

#include "alr/dataset.hpp"
#include "alr/model_space.hpp"

namespace alr {

enum class DesignKind { orthogonal, exchangeable, worst_case };

std::string design_kind_name(DesignKind kind);
DesignKind design_kind_from_name(const std::string& name);

struct DesignSpec {
  DesignKind kind;
  int d;
  int n;
};

struct SimConfig {
  DesignSpec design;
  int k_max;
  double alpha = 0.05;
  double sigma_noise = 1.0;
  int replications;
  int b_boot = 200;
  std::uint64_t seed = 0;
  std::vector<int> methods = {0, 1, 2, 3};
  bool oracle_variance = false;  // sigma^2 (sigma_hat_M^-1)_jj / n instead of the sandwich
  bool fixed_beta0 = false;      // one beta0 for all replications
  std::uint64_t collection_cap = kDefaultCollectionCap;
};

struct SizeRow {
  int method;
  int size;
  double coverage;   // frequency of covering every size-s target simultaneously
  double width_min;  // replication averages of the size-s threshold summaries
  double width_med;
  double width_max;
};

struct SimReport {
  std::string setting;
  int n = 0, d = 0, k = 0, reps = 0, b = 0;
  double alpha = 0.0;
  std::uint64_t seed = 0;
  std::vector<int> methods;
  std::vector<SizeRow> rows;
  std::map<int, double> total_coverage;  // per method

  // per-replication diagnostics (not serialized): constant-rule threshold and
  // per-method median threshold by size, used for dispersion and the width
  // ordering checks
  std::vector<double> rep_threshold0;
  std::map<int, Eigen::MatrixXd> rep_med_threshold;  // method -> reps x sizes (column s-1)
};

// Fixed design with n^-1 X'X equal to the target Gram of the kind:
// identity; identity + alpha 11' with alpha = -1/(d+2); or identity with the
// last row/column off-diagonal set to c, c^2 = 1/(2(d-1)).
Eigen::MatrixXd make_design(const DesignSpec& spec, std::uint64_t seed);

// target Gram matrix of a design kind
Eigen::MatrixXd design_gram(const DesignSpec& spec);

// y = X beta0 + sigma_noise * z with z iid standard normal
Eigen::VectorXd draw_response(const Eigen::MatrixXd& x, const Eigen::VectorXd& beta0, double sigma_noise,
                              std::uint64_t seed);

// Coverage experiment over the collection of all models of size <= k_max.
// Replications run in parallel; every replication derives its own random
// streams from (seed, replication), so the report is identical for any
// thread count.
SimReport run_experiment(const SimConfig& cfg);

void report_csv(const SimReport& report, const std::string& path);
SimReport parse_report_csv(const std::string& path);

enum class RateMode { random_gaussian, fixed_design };

struct RateRow {
  std::string mode;
  int n, d, s, trial;
  double max_d_sigma;   // max over models of size s
  double normalizer;    // sqrt(s log(e d / s) / n)
  double ratio;
};

// Empirical scaling of the whitened-Gram discrepancy: rows of X drawn iid
// N(0, I) (so the reference matrix is the identity), or a fixed design where
// the reference equals the sample Gram and everything is zero.
std::vector<RateRow> rate_scan(RateMode mode, const std::vector<int>& ns, int d, const std::vector<int>& ss,
                               int trials, std::uint64_t seed);

void rate_csv(const std::vector<RateRow>& rows, const std::string& path);

// 1-alpha quantile over b multiplier draws of the collection-wide max
// statistic, for one simulated dataset of the given design.  Enumerates all
// models of size <= k; throws SizeError when the collection exceeds the cap.
struct MaxQuantileResult {
  double k0;
  std::uint64_t n_models;
};
MaxQuantileResult max_stat_quantile(const DesignSpec& spec, int k, int b, double alpha, std::uint64_t seed,
                                    std::uint64_t cap = kDefaultCollectionCap);

}  // namespace alr
