#include "alr/simlab.hpp"

#include <Eigen/Dense>
#include <algorithm>
#include <charconv>
#include <cmath>
#include <cstdio>
#include <fstream>
#include <sstream>

#include "alr/errors.hpp"
#include "alr/linalg.hpp"
#include "alr/posi_boot.hpp"
#include "alr/regress.hpp"
#include "alr/rng.hpp"
#include "alr/sandwich.hpp"

namespace alr {

std::string design_kind_name(DesignKind kind) {
  switch (kind) {
    case DesignKind::orthogonal: return "orthogonal";
    case DesignKind::exchangeable: return "exchangeable";
    case DesignKind::worst_case: return "worstcase";
  }
  throw DomainError("unknown design kind");
}

DesignKind design_kind_from_name(const std::string& name) {
  if (name == "orthogonal") return DesignKind::orthogonal;
  if (name == "exchangeable") return DesignKind::exchangeable;
  if (name == "worstcase" || name == "worst_case") return DesignKind::worst_case;
  throw DomainError("unknown design kind '" + name + "'");
}

Eigen::MatrixXd design_gram(const DesignSpec& spec) {
  const int d = spec.d;
  if (d < 1) throw DomainError("design needs d >= 1");
  Eigen::MatrixXd g = Eigen::MatrixXd::Identity(d, d);
  switch (spec.kind) {
    case DesignKind::orthogonal:
      break;
    case DesignKind::exchangeable: {
      const double a = -1.0 / (d + 2);
      g.array() += a;
      g.diagonal().array() = 1.0 + a;
      break;
    }
    case DesignKind::worst_case: {
      if (d < 2) throw DomainError("worst-case design needs d >= 2");
      const double c = std::sqrt(1.0 / (2.0 * (d - 1)));
      for (int j = 0; j + 1 < d; ++j) {
        g(j, d - 1) = c;
        g(d - 1, j) = c;
      }
      break;
    }
  }
  return g;
}

Eigen::MatrixXd make_design(const DesignSpec& spec, std::uint64_t seed) {
  if (spec.n < spec.d) throw DomainError("design needs n >= d");
  const Eigen::MatrixXd g = design_gram(spec);
  {
    Eigen::SelfAdjointEigenSolver<Eigen::MatrixXd> es(g);
    if (es.eigenvalues().minCoeff() <= 0.0) throw Error("internal: design Gram not positive definite");
  }
  Rng rng(seed);
  Eigen::MatrixXd a(spec.n, spec.d);
  for (int i = 0; i < spec.n; ++i)
    for (int j = 0; j < spec.d; ++j) a(i, j) = rng.normal();
  Eigen::HouseholderQR<Eigen::MatrixXd> qr(a);
  Eigen::MatrixXd q = qr.householderQ() * Eigen::MatrixXd::Identity(spec.n, spec.d);
  return std::sqrt(static_cast<double>(spec.n)) * q * sqrt_psd(g);
}

Eigen::VectorXd draw_response(const Eigen::MatrixXd& x, const Eigen::VectorXd& beta0, double sigma_noise,
                              std::uint64_t seed) {
  if (beta0.size() != x.cols()) throw DomainError("beta0 length does not match design");
  if (sigma_noise < 0.0) throw DomainError("noise scale must be >= 0");
  Rng rng(seed);
  Eigen::VectorXd y = x * beta0;
  for (int i = 0; i < y.size(); ++i) y(i) += sigma_noise * rng.normal();
  return y;
}

namespace {

// stream layout: 0 design; per replication r: 3r+1 beta0, 3r+2 noise,
// 3r+3 bootstrap
constexpr std::uint64_t kDesignStream = 0;

Eigen::VectorXd uniform_pm1(int d, Rng& rng) {
  Eigen::VectorXd b(d);
  for (int i = 0; i < d; ++i) b(i) = 2.0 * rng.uniform() - 1.0;
  return b;
}

struct RepOutcome {
  // indexed [method][size-1]
  std::vector<std::vector<char>> covered;
  std::vector<std::vector<double>> wmin, wmed, wmax;
  std::vector<char> total_covered;
  double threshold0 = 0.0;
  std::vector<std::vector<double>> med_thr;
};

std::string fmt(double v) {
  char buf[64];
  auto res = std::to_chars(buf, buf + sizeof(buf), v);
  return std::string(buf, res.ptr);
}

std::string fmt(std::uint64_t v) { return std::to_string(v); }
std::string fmt(int v) { return std::to_string(v); }

}  // namespace

SimReport run_experiment(const SimConfig& cfg) {
  if (cfg.replications < 1) throw DomainError("need at least one replication");
  if (cfg.b_boot < 50) throw DomainError("need b >= 50 bootstrap draws");
  std::vector<int> methods = cfg.methods;
  std::sort(methods.begin(), methods.end());
  methods.erase(std::unique(methods.begin(), methods.end()), methods.end());
  if (methods.empty()) throw DomainError("no methods requested");
  for (int m : methods) posi_method_from_int(m);

  const ModelCollection coll = enumerate_up_to_k(cfg.design.d, cfg.k_max, cfg.collection_cap);
  const Eigen::MatrixXd x = make_design(cfg.design, derive_seed(cfg.seed, kDesignStream));
  const int nmethods = static_cast<int>(methods.size());
  const int k = cfg.k_max;
  const int reps = cfg.replications;

  Eigen::VectorXd shared_beta0;
  if (cfg.fixed_beta0) {
    Rng rng = Rng::substream(cfg.seed, 1);
    shared_beta0 = uniform_pm1(cfg.design.d, rng);
  }

  std::vector<RepOutcome> outcomes(reps);
  std::vector<std::string> failures(reps);

#pragma omp parallel for schedule(dynamic)
  for (int r = 0; r < reps; ++r) {
    try {
      Eigen::VectorXd beta0;
      if (cfg.fixed_beta0) {
        beta0 = shared_beta0;
      } else {
        Rng rng = Rng::substream(cfg.seed, 3ull * r + 1);
        beta0 = uniform_pm1(cfg.design.d, rng);
      }
      const Eigen::VectorXd y = draw_response(x, beta0, cfg.sigma_noise, derive_seed(cfg.seed, 3ull * r + 2));
      const Dataset data(x, y);
      const GramPair gram = compute_gram(data);

      // Studentizers come from the full-model meat restricted to each
      // submodel, so they estimate the sampling variance of beta_hat_M
      // rather than folding in the submodel's approximation bias.  The
      // n/(n-d) factor undoes the residual shrinkage of the full fit.
      std::vector<int> all(static_cast<std::size_t>(cfg.design.d));
      for (int j = 0; j < cfg.design.d; ++j) all[static_cast<std::size_t>(j)] = j + 1;
      const OlsFit full = fit_model(data, gram, ModelId(all));
      Eigen::MatrixXd full_meat = meat_estimate(data, full);
      if (data.n() > cfg.design.d)
        full_meat *= static_cast<double>(data.n()) / (data.n() - cfg.design.d);

      const auto nm = coll.size();
      std::vector<OlsFit> fits;
      fits.reserve(nm);
      std::vector<Eigen::VectorXd> ses(nm), targets(nm);
      for (std::size_t m = 0; m < nm; ++m) {
        fits.push_back(fit_model(data, gram, coll[m]));
        if (cfg.oracle_variance) {
          const Eigen::MatrixXd bread = inverse_spd(fits[m].sigma_hat_m);
          ses[m] = (cfg.sigma_noise * cfg.sigma_noise / data.n() * bread.diagonal().cwiseMax(0.0))
                       .cwiseSqrt();
        } else {
          const auto sv = sandwich_variance(fits[m].sigma_hat_m, submatrix(full_meat, coll[m]));
          ses[m] = sv.se;
        }
        // spacings below solver precision count as exact recovery (sigma = 0)
        for (int j = 0; j < ses[m].size(); ++j)
          ses[m](j) = std::max(ses[m](j), 1e-9 * (1.0 + std::abs(fits[m].beta_hat(j))));
        targets[m] = target_beta(x, beta0, coll[m]);
      }

      const InfluenceScores scores = influence_scores(data, coll, fits, ses);
      const BootstrapDraws draws = multiplier_draws(scores, cfg.b_boot, derive_seed(cfg.seed, 3ull * r + 3));
      const PosiSummary summary = summarize(draws, coll, cfg.alpha);

      RepOutcome& out = outcomes[r];
      out.covered.assign(nmethods, std::vector<char>(k, 1));
      out.wmin.assign(nmethods, std::vector<double>(k, 0.0));
      out.wmed.assign(nmethods, std::vector<double>(k, 0.0));
      out.wmax.assign(nmethods, std::vector<double>(k, 0.0));
      out.med_thr.assign(nmethods, std::vector<double>(k, 0.0));
      out.total_covered.assign(nmethods, 1);
      out.threshold0 = summary.k0;

      std::vector<double> thr_buf;
      for (int mi = 0; mi < nmethods; ++mi) {
        const PosiMethod method = posi_method_from_int(methods[mi]);
        for (int s = 1; s <= k; ++s) {
          const auto [lo, hi] = coll.stratum_range(s);
          thr_buf.clear();
          for (std::size_t m = lo; m < hi; ++m) {
            const PosiRegion region = build_region(method, coll, m, fits[m].beta_hat, ses[m], summary);
            thr_buf.push_back(region.threshold);
            if (!covers(region, targets[m])) {
              out.covered[mi][s - 1] = 0;
              out.total_covered[mi] = 0;
            }
          }
          out.wmin[mi][s - 1] = *std::min_element(thr_buf.begin(), thr_buf.end());
          out.wmax[mi][s - 1] = *std::max_element(thr_buf.begin(), thr_buf.end());
          out.wmed[mi][s - 1] = median(thr_buf);
          out.med_thr[mi][s - 1] = out.wmed[mi][s - 1];
        }
      }
    } catch (const std::exception& e) {
      failures[r] = e.what();
      if (failures[r].empty()) failures[r] = "unknown error";
    }
  }

  for (int r = 0; r < reps; ++r)
    if (!failures[r].empty())
      throw Error("replication " + std::to_string(r) + " failed: " + failures[r]);

  SimReport report;
  report.setting = design_kind_name(cfg.design.kind);
  report.n = cfg.design.n;
  report.d = cfg.design.d;
  report.k = k;
  report.reps = reps;
  report.b = cfg.b_boot;
  report.alpha = cfg.alpha;
  report.seed = cfg.seed;
  report.methods = methods;
  report.rep_threshold0.resize(reps);
  for (int r = 0; r < reps; ++r) report.rep_threshold0[r] = outcomes[r].threshold0;

  for (int mi = 0; mi < nmethods; ++mi) {
    Eigen::MatrixXd med_thr(reps, k);
    double total = 0.0;
    for (int r = 0; r < reps; ++r) total += outcomes[r].total_covered[mi];
    report.total_coverage[methods[mi]] = total / reps;
    for (int s = 1; s <= k; ++s) {
      SizeRow row{};
      row.method = methods[mi];
      row.size = s;
      double cov = 0.0, wmin = 0.0, wmed = 0.0, wmax = 0.0;
      for (int r = 0; r < reps; ++r) {
        cov += outcomes[r].covered[mi][s - 1];
        wmin += outcomes[r].wmin[mi][s - 1];
        wmed += outcomes[r].wmed[mi][s - 1];
        wmax += outcomes[r].wmax[mi][s - 1];
        med_thr(r, s - 1) = outcomes[r].med_thr[mi][s - 1];
      }
      row.coverage = cov / reps;
      row.width_min = wmin / reps;
      row.width_med = wmed / reps;
      row.width_max = wmax / reps;
      report.rows.push_back(row);
    }
    report.rep_med_threshold[methods[mi]] = std::move(med_thr);
  }
  return report;
}

void report_csv(const SimReport& report, const std::string& path) {
  std::ofstream out(path);
  if (!out) throw Error("cannot write " + path);
  out << "setting,method,size_s,coverage,width_min,width_med,width_max,total_coverage,n,d,k,alpha,reps,b,seed\n";
  for (const auto& row : report.rows) {
    out << report.setting << ',' << fmt(row.method) << ',' << fmt(row.size) << ',' << fmt(row.coverage)
        << ',' << fmt(row.width_min) << ',' << fmt(row.width_med) << ',' << fmt(row.width_max) << ','
        << fmt(report.total_coverage.at(row.method)) << ',' << fmt(report.n) << ',' << fmt(report.d) << ','
        << fmt(report.k) << ',' << fmt(report.alpha) << ',' << fmt(report.reps) << ',' << fmt(report.b)
        << ',' << fmt(report.seed) << '\n';
  }
  if (!out) throw Error("write failed for " + path);
}

namespace {

double parse_double(const std::string& s) {
  double v = 0.0;
  auto res = std::from_chars(s.data(), s.data() + s.size(), v);
  if (res.ec != std::errc() || res.ptr != s.data() + s.size())
    throw InvalidDataError("bad numeric field '" + s + "'");
  return v;
}

}  // namespace

SimReport parse_report_csv(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw Error("cannot open " + path);
  std::string line;
  if (!std::getline(in, line)) throw InvalidDataError(path + ": empty report");
  SimReport report;
  bool first = true;
  while (std::getline(in, line)) {
    if (line.empty()) continue;
    std::vector<std::string> f;
    std::stringstream ss(line);
    std::string cell;
    while (std::getline(ss, cell, ',')) f.push_back(cell);
    if (f.size() != 15) throw InvalidDataError(path + ": bad report row");
    SizeRow row{};
    row.method = static_cast<int>(parse_double(f[1]));
    row.size = static_cast<int>(parse_double(f[2]));
    row.coverage = parse_double(f[3]);
    row.width_min = parse_double(f[4]);
    row.width_med = parse_double(f[5]);
    row.width_max = parse_double(f[6]);
    report.total_coverage[row.method] = parse_double(f[7]);
    report.rows.push_back(row);
    if (first) {
      report.setting = f[0];
      report.n = static_cast<int>(parse_double(f[8]));
      report.d = static_cast<int>(parse_double(f[9]));
      report.k = static_cast<int>(parse_double(f[10]));
      report.alpha = parse_double(f[11]);
      report.reps = static_cast<int>(parse_double(f[12]));
      report.b = static_cast<int>(parse_double(f[13]));
      report.seed = static_cast<std::uint64_t>(parse_double(f[14]));
      first = false;
    }
    if (std::find(report.methods.begin(), report.methods.end(), row.method) == report.methods.end())
      report.methods.push_back(row.method);
  }
  return report;
}

std::vector<RateRow> rate_scan(RateMode mode, const std::vector<int>& ns, int d, const std::vector<int>& ss,
                               int trials, std::uint64_t seed) {
  if (trials < 1) throw DomainError("need at least one trial");
  for (int s : ss)
    if (s < 1 || s > d) throw DomainError("stratum size out of range");
  std::vector<RateRow> rows(ns.size() * ss.size() * static_cast<std::size_t>(trials));

  for (std::size_t ni = 0; ni < ns.size(); ++ni) {
    const int n = ns[ni];
    if (n < d) throw DomainError("rate scan needs n >= d");
#pragma omp parallel for schedule(dynamic)
    for (int trial = 0; trial < trials; ++trial) {
      Eigen::MatrixXd x(n, d);
      Rng rng = Rng::substream(seed, ni * 1000003ull + static_cast<std::uint64_t>(trial));
      for (int i = 0; i < n; ++i)
        for (int j = 0; j < d; ++j) x(i, j) = rng.normal();
      const Eigen::MatrixXd sigma_hat = symmetrize(x.transpose() * x / static_cast<double>(n));
      const Eigen::MatrixXd identity = Eigen::MatrixXd::Identity(d, d);
      const Eigen::MatrixXd& ref = mode == RateMode::fixed_design ? sigma_hat : identity;
      for (std::size_t si = 0; si < ss.size(); ++si) {
        const int s = ss[si];
        double worst = 0.0;
        ModelCollection coll = enumerate_exact_k(d, s);
        for (const auto& m : coll.models()) {
          const double v = d_sigma(submatrix(sigma_hat, m), submatrix(ref, m));
          if (v > worst) worst = v;
        }
        RateRow row;
        row.mode = mode == RateMode::fixed_design ? "fixed" : "random";
        row.n = n;
        row.d = d;
        row.s = s;
        row.trial = trial;
        row.max_d_sigma = worst;
        row.normalizer = std::sqrt(s * std::log(std::exp(1.0) * d / s) / n);
        row.ratio = worst / row.normalizer;
        rows[(ni * ss.size() + si) * static_cast<std::size_t>(trials) + static_cast<std::size_t>(trial)] =
            row;
      }
    }
  }
  return rows;
}

void rate_csv(const std::vector<RateRow>& rows, const std::string& path) {
  std::ofstream out(path);
  if (!out) throw Error("cannot write " + path);
  out << "mode,n,d,s,trial,max_d_sigma,normalizer,ratio\n";
  for (const auto& r : rows)
    out << r.mode << ',' << fmt(r.n) << ',' << fmt(r.d) << ',' << fmt(r.s) << ',' << fmt(r.trial) << ','
        << fmt(r.max_d_sigma) << ',' << fmt(r.normalizer) << ',' << fmt(r.ratio) << '\n';
}

MaxQuantileResult max_stat_quantile(const DesignSpec& spec, int k, int b, double alpha, std::uint64_t seed,
                                    std::uint64_t cap) {
  const ModelCollection coll = enumerate_up_to_k(spec.d, k, cap);
  const Eigen::MatrixXd x = make_design(spec, derive_seed(seed, kDesignStream));
  // pure-noise response: the quantile then reflects the design geometry
  // alone, with every submodel's residuals estimating the same noise
  const Eigen::VectorXd y = draw_response(x, Eigen::VectorXd::Zero(spec.d), 1.0, derive_seed(seed, 2));
  const Dataset data(x, y);
  const GramPair gram = compute_gram(data);
  const int n = data.n();
  const auto nm = coll.size();

  // packed per-model blocks: Gram inverse, coefficients, studentizers
  std::vector<std::ptrdiff_t> voff(nm + 1, 0), moff(nm + 1, 0);
  for (std::size_t m = 0; m < nm; ++m) {
    voff[m + 1] = voff[m] + coll[m].size();
    moff[m + 1] = moff[m] + coll[m].size() * coll[m].size();
  }
  std::vector<double> inv_pack(static_cast<std::size_t>(moff[nm]));
  std::vector<double> beta_pack(static_cast<std::size_t>(voff[nm]));
  std::vector<double> se_pack(static_cast<std::size_t>(voff[nm]));
  std::vector<int> idx_pack(static_cast<std::size_t>(voff[nm]));

#pragma omp parallel for schedule(dynamic)
  for (std::ptrdiff_t m = 0; m < static_cast<std::ptrdiff_t>(nm); ++m) {
    const ModelId& model = coll[static_cast<std::size_t>(m)];
    const int w = model.size();
    const OlsFit fit = fit_model(data, gram, model);
    const Eigen::MatrixXd inv = inverse_spd(fit.sigma_hat_m);
    const Eigen::MatrixXd xm = subcolumns(data.x, model);
    // sandwich studentizer from this model's residuals
    const Eigen::MatrixXd meat =
        symmetrize(xm.transpose() * fit.residuals.cwiseAbs2().asDiagonal() * xm) /
        (static_cast<double>(n) * n);
    const Eigen::VectorXd se = (inv * meat * inv).diagonal().cwiseMax(0.0).cwiseSqrt();
    for (int j = 0; j < w; ++j) {
      beta_pack[static_cast<std::size_t>(voff[m] + j)] = fit.beta_hat(j);
      se_pack[static_cast<std::size_t>(voff[m] + j)] = se(j);
      idx_pack[static_cast<std::size_t>(voff[m] + j)] = model.indices()[static_cast<std::size_t>(j)] - 1;
    }
    Eigen::Map<Eigen::MatrixXd>(&inv_pack[static_cast<std::size_t>(moff[m])], w, w) = inv;
  }

  // per draw: a = n^-1 X'(g o y), B = n^-1 X' diag(g) X, then
  // W_M = a_M - B_M beta_M and T_M = max_j |(inv_M W_M)_j| / se_{M,j}
  std::vector<double> maxstat(static_cast<std::size_t>(b));
#pragma omp parallel
  {
    Eigen::VectorXd g(n), a(spec.d);
    Eigen::MatrixXd bmat(spec.d, spec.d);
    std::vector<double> wbuf(static_cast<std::size_t>(k)), vbuf(static_cast<std::size_t>(k));
#pragma omp for schedule(static)
    for (int r = 0; r < b; ++r) {
      Rng rng = Rng::substream(derive_seed(seed, 3), static_cast<std::uint64_t>(r));
      for (int i = 0; i < n; ++i) g(i) = rng.normal();
      a.noalias() = data.x.transpose() * g.cwiseProduct(data.y) / static_cast<double>(n);
      bmat.noalias() = data.x.transpose() * g.asDiagonal() * data.x / static_cast<double>(n);
      double best = 0.0;
      for (std::size_t m = 0; m < nm; ++m) {
        const int w = static_cast<int>(voff[m + 1] - voff[m]);
        const int* idx = &idx_pack[static_cast<std::size_t>(voff[m])];
        const double* beta = &beta_pack[static_cast<std::size_t>(voff[m])];
        const double* se = &se_pack[static_cast<std::size_t>(voff[m])];
        const double* inv = &inv_pack[static_cast<std::size_t>(moff[m])];
        for (int row = 0; row < w; ++row) {
          double acc = a(idx[row]);
          for (int col = 0; col < w; ++col) acc -= bmat(idx[row], idx[col]) * beta[col];
          wbuf[static_cast<std::size_t>(row)] = acc;
        }
        for (int row = 0; row < w; ++row) {
          double acc = 0.0;
          for (int col = 0; col < w; ++col) acc += inv[col * w + row] * wbuf[static_cast<std::size_t>(col)];
          const double t = se[row] > 0.0 ? std::abs(acc) / se[row] : 0.0;
          if (t > best) best = t;
        }
      }
      maxstat[static_cast<std::size_t>(r)] = best;
    }
  }
  return {empirical_quantile(std::move(maxstat), alpha), static_cast<std::uint64_t>(nm)};
}

}  // namespace alr
