#include <CLI11.hpp>
#include <cmath>
#include <cstdint>
#include <fstream>
#include <iostream>
#include <json.hpp>
#include <string>
#include <vector>

#include "alr/chisq.hpp"
#include "alr/dataset.hpp"
#include "alr/errors.hpp"
#include "alr/linalg.hpp"
#include "alr/maxnorm.hpp"
#include "alr/model_space.hpp"
#include "alr/posi_boot.hpp"
#include "alr/regress.hpp"
#include "alr/rng.hpp"
#include "alr/sandwich.hpp"
#include "alr/simlab.hpp"

using json = nlohmann::json;

namespace {

std::vector<int> parse_int_list(const std::string& s) {
  std::vector<int> out;
  std::string cur;
  std::stringstream ss(s);
  while (std::getline(ss, cur, ',')) {
    if (!cur.empty()) out.push_back(std::stoi(cur));
  }
  if (out.empty()) throw alr::DomainError("empty list '" + s + "'");
  return out;
}

alr::ModelCollection load_collection(const std::string& spec, int d) {
  // either "up-to-K" or a path to a JSON array of 1-based index arrays
  if (spec.rfind("up-to-", 0) == 0) {
    const int k = std::stoi(spec.substr(6));
    return alr::enumerate_up_to_k(d, k);
  }
  std::ifstream in(spec);
  if (!in) throw alr::Error("cannot open collection file " + spec);
  json j;
  in >> j;
  std::vector<std::vector<int>> models;
  for (const auto& entry : j) models.push_back(entry.get<std::vector<int>>());
  return alr::from_list(d, models);
}

struct PosiOutput {
  alr::ModelId model;
  Eigen::VectorXd beta_hat, se;
  double threshold;
};

json region_record(int method, const PosiOutput& o) {
  json rec;
  rec["method"] = method;
  rec["model"] = o.model.indices();
  rec["beta_hat"] = std::vector<double>(o.beta_hat.begin(), o.beta_hat.end());
  rec["se"] = std::vector<double>(o.se.begin(), o.se.end());
  rec["threshold"] = o.threshold;
  std::vector<double> lo(o.beta_hat.size()), hi(o.beta_hat.size());
  for (int j = 0; j < o.beta_hat.size(); ++j) {
    lo[static_cast<std::size_t>(j)] = o.beta_hat(j) - o.threshold * o.se(j);
    hi[static_cast<std::size_t>(j)] = o.beta_hat(j) + o.threshold * o.se(j);
  }
  rec["interval_low"] = lo;
  rec["interval_high"] = hi;
  return rec;
}

int run_fit(const std::string& data_path, double alpha, int b, std::uint64_t seed) {
  const alr::Dataset data = alr::load_csv(data_path);
  const alr::GramPair gram = alr::compute_gram(data);
  std::vector<int> full(data.d());
  for (int j = 0; j < data.d(); ++j) full[static_cast<std::size_t>(j)] = j + 1;
  const alr::ModelId full_model(full);
  const alr::OlsFit fit = alr::fit_model(data, gram, full_model);
  const auto sv = alr::sandwich_variance(fit.sigma_hat_m, alr::meat_estimate(data, fit));

  // max-|t| quantile from the bootstrap on the singleton collection {full}
  const alr::ModelCollection coll(data.d(), {full_model});
  const auto scores = alr::influence_scores(data, coll, {fit}, {sv.se});
  const auto draws = alr::multiplier_draws(scores, b, seed);
  const auto summary = alr::summarize(draws, coll, alpha);

  const auto chi = alr::chi_square_region(fit, sv, alpha);
  const auto box = alr::max_t_region(fit, sv, summary.k0, alpha);

  json out;
  out["n"] = data.n();
  out["d"] = data.d();
  out["alpha"] = alpha;
  out["beta_hat"] = std::vector<double>(fit.beta_hat.begin(), fit.beta_hat.end());
  out["se"] = std::vector<double>(sv.se.begin(), sv.se.end());
  out["rank_ok"] = fit.rank_ok;
  out["chi_square_region"] = {{"center", std::vector<double>(fit.beta_hat.begin(), fit.beta_hat.end())},
                              {"threshold", chi.threshold},
                              {"alpha", alpha}};
  std::vector<double> lo(fit.beta_hat.size()), hi(fit.beta_hat.size());
  for (int j = 0; j < fit.beta_hat.size(); ++j) {
    lo[static_cast<std::size_t>(j)] = fit.beta_hat(j) - box.threshold * sv.se(j);
    hi[static_cast<std::size_t>(j)] = fit.beta_hat(j) + box.threshold * sv.se(j);
  }
  out["max_t_region"] = {{"z", box.threshold}, {"interval_low", lo}, {"interval_high", hi}, {"b", b}, {"seed", seed}};
  std::cout << out.dump(2) << '\n';
  return 0;
}

int run_posi(const std::string& data_path, const std::string& collection, double alpha, int b,
             std::uint64_t seed, const std::string& method_arg) {
  const alr::Dataset data = alr::load_csv(data_path);
  const alr::ModelCollection coll = load_collection(collection, data.d());
  const alr::GramPair gram = alr::compute_gram(data);

  std::vector<alr::OlsFit> fits;
  std::vector<Eigen::VectorXd> ses;
  fits.reserve(coll.size());
  ses.reserve(coll.size());
  for (std::size_t m = 0; m < coll.size(); ++m) {
    fits.push_back(alr::fit_model(data, gram, coll[m]));
    ses.push_back(alr::sandwich_variance(fits[m].sigma_hat_m, alr::meat_estimate(data, fits[m])).se);
  }
  const auto scores = alr::influence_scores(data, coll, fits, ses);
  const auto draws = alr::multiplier_draws(scores, b, seed);
  const auto summary = alr::summarize(draws, coll, alpha);

  std::vector<int> methods;
  if (method_arg == "all")
    methods = {0, 1, 2, 3};
  else
    methods = {std::stoi(method_arg)};

  for (int method : methods) {
    const auto pm = alr::posi_method_from_int(method);
    for (std::size_t m = 0; m < coll.size(); ++m) {
      const auto region = alr::build_region(pm, coll, m, fits[m].beta_hat, ses[m], summary);
      std::cout << region_record(method, {coll[m], fits[m].beta_hat, ses[m], region.threshold}).dump()
                << '\n';
    }
  }
  return 0;
}

int run_simulate(const alr::SimConfig& cfg, const std::string& out_path) {
  const alr::SimReport report = alr::run_experiment(cfg);
  alr::report_csv(report, out_path);
  std::cerr << "wrote " << out_path << '\n';
  for (int m : report.methods)
    std::cerr << "method " << m << " total coverage " << report.total_coverage.at(m) << '\n';
  return 0;
}

int run_designs(const std::string& kind, int d, int n, std::uint64_t seed, const std::string& out_path) {
  const alr::DesignSpec spec{alr::design_kind_from_name(kind), d, n};
  const Eigen::MatrixXd x = alr::make_design(spec, alr::derive_seed(seed, 0));
  std::ofstream out(out_path);
  if (!out) throw alr::Error("cannot write " + out_path);
  for (int j = 0; j < d; ++j) out << (j ? "," : "") << 'x' << (j + 1);
  out << '\n';
  out.precision(17);
  for (int i = 0; i < n; ++i) {
    for (int j = 0; j < d; ++j) out << (j ? "," : "") << x(i, j);
    out << '\n';
  }
  std::cerr << "wrote " << out_path << '\n';
  return 0;
}

// values from a single-column CSV (optional header)
Eigen::VectorXd load_values(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw alr::Error("cannot open " + path);
  std::vector<double> vals;
  std::string line;
  bool first = true;
  while (std::getline(in, line)) {
    if (line.empty() || line == "\r") continue;
    try {
      vals.push_back(std::stod(line));
    } catch (const std::exception&) {
      if (!first) throw alr::InvalidDataError(path + ": bad value '" + line + "'");
    }
    first = false;
  }
  if (vals.empty()) throw alr::InvalidDataError(path + ": no values");
  Eigen::VectorXd w(static_cast<Eigen::Index>(vals.size()));
  for (std::size_t i = 0; i < vals.size(); ++i) w(static_cast<Eigen::Index>(i)) = vals[i];
  return w;
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"assumption-lean least squares toolkit"};
  app.require_subcommand(1);

  // fit
  std::string fit_data;
  double fit_alpha = 0.05;
  int fit_b = 200;
  std::uint64_t fit_seed = 0;
  auto* fit_cmd = app.add_subcommand("fit", "full-model fit with sandwich confidence regions");
  fit_cmd->add_option("--data", fit_data, "dataset CSV (response column 'y')")->required();
  fit_cmd->add_option("--alpha", fit_alpha, "miscoverage level");
  fit_cmd->add_option("--b", fit_b, "bootstrap draws for the max-|t| quantile");
  fit_cmd->add_option("--seed", fit_seed, "bootstrap seed");

  // posi
  std::string posi_data, posi_coll = "up-to-1", posi_method = "all";
  double posi_alpha = 0.05;
  int posi_b = 200;
  std::uint64_t posi_seed = 0;
  auto* posi_cmd = app.add_subcommand("posi", "simultaneous post-selection confidence boxes");
  posi_cmd->add_option("--data", posi_data, "dataset CSV")->required();
  posi_cmd->add_option("--collection", posi_coll, "'up-to-K' or JSON file of 1-based index arrays");
  posi_cmd->add_option("--alpha", posi_alpha, "miscoverage level");
  posi_cmd->add_option("--b", posi_b, "bootstrap draws");
  posi_cmd->add_option("--seed", posi_seed, "bootstrap seed");
  posi_cmd->add_option("--method", posi_method, "0,1,2,3 or all");

  // simulate
  alr::SimConfig cfg;
  std::string sim_design = "orthogonal", sim_methods = "0,1,2,3", sim_out = "report.csv";
  cfg.design = {alr::DesignKind::orthogonal, 10, 100};
  cfg.k_max = 5;
  cfg.replications = 300;
  auto* sim_cmd = app.add_subcommand("simulate", "coverage experiment over a submodel collection");
  sim_cmd->add_option("--design", sim_design, "orthogonal | exchangeable | worstcase");
  sim_cmd->add_option("--d", cfg.design.d, "covariate count");
  sim_cmd->add_option("--n", cfg.design.n, "sample size");
  sim_cmd->add_option("--k", cfg.k_max, "max model size");
  sim_cmd->add_option("--alpha", cfg.alpha, "miscoverage level");
  sim_cmd->add_option("--reps", cfg.replications, "replications");
  sim_cmd->add_option("--b", cfg.b_boot, "bootstrap draws per replication");
  sim_cmd->add_option("--seed", cfg.seed, "experiment seed");
  sim_cmd->add_option("--methods", sim_methods, "comma list out of 0,1,2,3");
  sim_cmd->add_flag("--oracle-variance", cfg.oracle_variance, "use noise-variance studentizers");
  sim_cmd->add_flag("--fixed-beta0", cfg.fixed_beta0, "one beta0 for all replications");
  sim_cmd->add_option("--out", sim_out, "report CSV path");

  // designs
  std::string des_kind = "orthogonal", des_out = "X.csv";
  int des_d = 10, des_n = 100;
  std::uint64_t des_seed = 0;
  auto* des_cmd = app.add_subcommand("designs", "write a fixed design matrix");
  des_cmd->add_option("--kind", des_kind, "orthogonal | exchangeable | worstcase");
  des_cmd->add_option("--d", des_d, "covariate count");
  des_cmd->add_option("--n", des_n, "sample size");
  des_cmd->add_option("--seed", des_seed, "seed");
  des_cmd->add_option("--out", des_out, "output CSV");

  // rate-scan
  std::string rs_ns = "200,400,800", rs_ss = "1,2,3", rs_mode = "random", rs_out = "rates.csv";
  int rs_d = 12, rs_trials = 50;
  std::uint64_t rs_seed = 0;
  auto* rs_cmd = app.add_subcommand("rate-scan", "scaling of the whitened-Gram discrepancy");
  rs_cmd->add_option("--n", rs_ns, "comma list of sample sizes");
  rs_cmd->add_option("--d", rs_d, "covariate count");
  rs_cmd->add_option("--s", rs_ss, "comma list of model sizes");
  rs_cmd->add_option("--trials", rs_trials, "trials per grid point");
  rs_cmd->add_option("--mode", rs_mode, "random | fixed");
  rs_cmd->add_option("--seed", rs_seed, "seed");
  rs_cmd->add_option("--out", rs_out, "output CSV");

  // models
  std::string ml_out = "collection.json";
  int ml_d = 10, ml_k = 2;
  auto* ml_cmd = app.add_subcommand("models", "export a model collection as JSON");
  ml_cmd->add_option("--d", ml_d, "ambient dimension");
  ml_cmd->add_option("--k", ml_k, "max model size");
  ml_cmd->add_option("--out", ml_out, "output JSON (array of 1-based index arrays)");

  // maxnorm
  std::string mn_values, mn_data;
  double mn_eps = 0.25, mn_delta = 0.05, mn_bound = 0.0, mn_q = 0.0;
  std::uint64_t mn_seed = 0, mn_m = 0;
  int mn_k = 1, mn_b_index = 0;
  auto* mn_cmd = app.add_subcommand("maxnorm", "q-norm upper estimate of a maximum");
  mn_cmd->add_option("--values", mn_values, "CSV of non-negative values (one per line)");
  mn_cmd->add_option("--data", mn_data, "dataset CSV for the implicit per-model statistic");
  mn_cmd->add_option("--k", mn_k, "max model size of the implicit collection");
  mn_cmd->add_option("--draw-index", mn_b_index, "multiplier draw index for the implicit statistic");
  mn_cmd->add_option("--m", mn_m, "index-set size (defaults to value count / collection size)");
  mn_cmd->add_option("--eps", mn_eps, "multiplicative slack");
  mn_cmd->add_option("--delta", mn_delta, "failure probability");
  mn_cmd->add_option("--bound", mn_bound, "a-priori upper bound B (required for sampling)");
  mn_cmd->add_option("--q", mn_q, "report the deterministic bracket at this exponent");
  mn_cmd->add_option("--seed", mn_seed, "sampling seed");

  CLI11_PARSE(app, argc, argv);

  try {
    if (*fit_cmd) return run_fit(fit_data, fit_alpha, fit_b, fit_seed);
    if (*posi_cmd) return run_posi(posi_data, posi_coll, posi_alpha, posi_b, posi_seed, posi_method);
    if (*sim_cmd) {
      cfg.design.kind = alr::design_kind_from_name(sim_design);
      cfg.methods = parse_int_list(sim_methods);
      return run_simulate(cfg, sim_out);
    }
    if (*des_cmd) return run_designs(des_kind, des_d, des_n, des_seed, des_out);
    if (*ml_cmd) {
      const auto coll = alr::enumerate_up_to_k(ml_d, ml_k);
      json j = json::array();
      for (const auto& m : coll.models()) j.push_back(m.indices());
      std::ofstream out(ml_out);
      if (!out) throw alr::Error("cannot write " + ml_out);
      out << j.dump() << '\n';
      std::cerr << "wrote " << ml_out << " (" << coll.size() << " models)\n";
      return 0;
    }
    if (*rs_cmd) {
      const auto mode = rs_mode == "fixed" ? alr::RateMode::fixed_design : alr::RateMode::random_gaussian;
      const auto rows = alr::rate_scan(mode, parse_int_list(rs_ns), rs_d, parse_int_list(rs_ss), rs_trials,
                                       rs_seed);
      alr::rate_csv(rows, rs_out);
      std::cerr << "wrote " << rs_out << '\n';
      return 0;
    }
    if (*mn_cmd) {
      json out;
      if (!mn_values.empty()) {
        const Eigen::VectorXd w = load_values(mn_values);
        const std::uint64_t m = mn_m ? mn_m : static_cast<std::uint64_t>(w.size());
        if (mn_q > 0.0) {
          const auto [lower, upper] = alr::qnorm_bounds(w, mn_q);
          out["q"] = mn_q;
          out["lower"] = lower;
          out["upper"] = upper;
          out["max"] = w.maxCoeff();
        }
        if (mn_bound > 0.0) {
          const auto est = alr::sampled_max_upper(
              [&](std::uint64_t j) { return w(static_cast<Eigen::Index>(j % static_cast<std::uint64_t>(w.size()))); },
              m, mn_eps, mn_delta, mn_bound, mn_seed);
          out["sampled"] = {{"point", est.point}, {"upper", est.upper}, {"q", est.q},
                            {"k", est.k},         {"eps", est.eps},     {"delta", est.delta}};
        }
      } else if (!mn_data.empty()) {
        if (mn_bound <= 0.0) throw alr::DomainError("--bound is required with --data");
        // Implicit collection: index j enumerates models of size <= k by
        // (size, lexicographic) rank; w(j) is that model's multiplier
        // statistic under one shared draw, evaluated lazily per model.
        const alr::Dataset data = alr::load_csv(mn_data);
        const alr::GramPair gram = alr::compute_gram(data);
        const std::uint64_t m = alr::count_up_to_k(data.d(), mn_k);
        Eigen::VectorXd g(data.n());
        alr::Rng rng = alr::Rng::substream(mn_seed, static_cast<std::uint64_t>(mn_b_index));
        for (int i = 0; i < data.n(); ++i) g(i) = rng.normal();
        auto evaluator = [&](std::uint64_t j) {
          const alr::ModelId model = alr::model_at(data.d(), mn_k, j);
          const alr::OlsFit fit = alr::fit_model(data, gram, model);
          const Eigen::MatrixXd xm = alr::subcolumns(data.x, model);
          const Eigen::MatrixXd inv = alr::inverse_spd(fit.sigma_hat_m);
          const Eigen::MatrixXd raw = (xm * inv).array().colwise() * fit.residuals.array();
          double best = 0.0;
          for (int col = 0; col < raw.cols(); ++col) {
            const double norm = raw.col(col).norm();
            if (norm > 0.0) best = std::max(best, std::abs(raw.col(col).dot(g)) / norm);
          }
          return best;
        };
        const auto est = alr::sampled_max_upper(evaluator, m, mn_eps, mn_delta, mn_bound, mn_seed + 1);
        out["m"] = m;
        out["sampled"] = {{"point", est.point}, {"upper", est.upper}, {"q", est.q},
                          {"k", est.k},         {"eps", est.eps},     {"delta", est.delta}};
      } else {
        throw alr::DomainError("maxnorm needs --values or --data");
      }
      std::cout << out.dump(2) << '\n';
      return 0;
    }
  } catch (const std::exception& e) {
    std::cerr << "error: " << e.what() << '\n';
    return 1;
  }
  return 0;
}
