#include "alr/posi_boot.hpp"

#include <algorithm>
#include <cmath>
#include <limits>

#include "alr/errors.hpp"
#include "alr/kernels.hpp"
#include "alr/linalg.hpp"

namespace alr {

namespace {
constexpr double kMadFloor = 1e-12;
}

PosiMethod posi_method_from_int(int method) {
  if (method < 0 || method > 3) throw DomainError("method must be one of 0,1,2,3");
  return static_cast<PosiMethod>(method);
}

double median(std::vector<double> values) {
  if (values.empty()) throw DomainError("median of empty sample");
  std::sort(values.begin(), values.end());
  const std::size_t n = values.size();
  if (n % 2 == 1) return values[n / 2];
  return 0.5 * (values[n / 2 - 1] + values[n / 2]);
}

double empirical_quantile(std::vector<double> values, double alpha) {
  if (values.empty()) throw DomainError("quantile of empty sample");
  if (!(alpha > 0.0 && alpha < 1.0)) throw DomainError("alpha must be in (0,1)");
  const auto b = static_cast<double>(values.size());
  auto rank = static_cast<std::size_t>(std::ceil((1.0 - alpha) * b));
  rank = std::max<std::size_t>(1, std::min(values.size(), rank));
  std::nth_element(values.begin(), values.begin() + static_cast<std::ptrdiff_t>(rank - 1), values.end());
  return values[rank - 1];
}

InfluenceScores influence_scores(const Dataset& data, const ModelCollection& coll,
                                 const std::vector<OlsFit>& fits, const std::vector<Eigen::VectorXd>& ses) {
  if (fits.size() != coll.size() || ses.size() != coll.size())
    throw DomainError("fits/ses must cover the collection");
  const int n = data.n();
  InfluenceScores out;
  out.offsets.resize(coll.size() + 1);
  out.offsets[0] = 0;
  for (std::size_t m = 0; m < coll.size(); ++m) out.offsets[m + 1] = out.offsets[m] + coll[m].size();
  out.psi.resize(n, out.offsets.back());

  for (std::size_t m = 0; m < coll.size(); ++m) {
    const OlsFit& fit = fits[m];
    const Eigen::VectorXd& se = ses[m];
    if (fit.beta_hat.size() != coll[m].size() || se.size() != coll[m].size())
      throw DomainError("fit/se width mismatch for model " + coll[m].str());
    // raw_ij = (sigma_hat_M^-1 x_{i,M})_j * r_i
    const Eigen::MatrixXd xm = subcolumns(data.x, coll[m]);
    const Eigen::MatrixXd bread = inverse_spd(fit.sigma_hat_m);
    Eigen::MatrixXd raw = (xm * bread).array().colwise() * fit.residuals.array();
    for (int j = 0; j < coll[m].size(); ++j) {
      auto col = out.psi.col(out.offsets[m] + j);
      if (se(j) > 0.0) {
        col = raw.col(j) / se(j);
      } else if (raw.col(j).cwiseAbs().maxCoeff() == 0.0) {
        col.setZero();
      } else {
        throw DegenerateVarianceError("zero standard error with nonzero scores in model " + coll[m].str());
      }
    }
  }
  return out;
}

BootstrapDraws multiplier_draws(const InfluenceScores& scores, int b, std::uint64_t seed) {
  if (b < 50) throw DomainError("multiplier bootstrap needs b >= 50");
  BootstrapDraws out;
  out.b = b;
  out.seed = seed;
  out.t = kernels::multiplier_stats(scores.psi, scores.offsets, b, seed);
  return out;
}

PosiSummary summarize(const BootstrapDraws& draws, const ModelCollection& coll, double alpha) {
  if (static_cast<std::size_t>(draws.t.cols()) != coll.size())
    throw DomainError("draws do not match the collection");
  if (!(alpha > 0.0 && alpha < 1.0)) throw DomainError("alpha must be in (0,1)");
  const int b = draws.b;
  const auto nm = coll.size();

  PosiSummary s;
  s.alpha = alpha;
  s.med.resize(static_cast<Eigen::Index>(nm));
  s.mad.resize(static_cast<Eigen::Index>(nm));
  s.mad_fallback.assign(nm, 0);
  s.any_fallback = false;

  std::vector<double> buf(static_cast<std::size_t>(b));
  for (std::size_t m = 0; m < nm; ++m) {
    for (int r = 0; r < b; ++r) buf[static_cast<std::size_t>(r)] = draws.t(r, static_cast<Eigen::Index>(m));
    const double med = median(buf);
    for (double& v : buf) v = std::abs(v - med);
    const double mad = median(buf);
    s.med(static_cast<Eigen::Index>(m)) = med;
    s.mad(static_cast<Eigen::Index>(m)) = mad;
    if (mad < kMadFloor) {
      s.mad_fallback[m] = 1;
      s.any_fallback = true;
    }
  }

  const auto sizes = coll.sizes_present();
  Eigen::VectorXd eff_mad(static_cast<Eigen::Index>(nm));
  for (std::size_t m = 0; m < nm; ++m)
    eff_mad(static_cast<Eigen::Index>(m)) = s.mad_fallback[m] ? 1.0 : s.mad(static_cast<Eigen::Index>(m));

  std::vector<double> max_t(b), max_c(b), max_cs(b);
  std::map<int, std::vector<double>> frak;
  for (int sz : sizes) frak[sz].assign(static_cast<std::size_t>(b), 0.0);

  for (int r = 0; r < b; ++r) {
    double mt = 0.0, mc = -std::numeric_limits<double>::infinity(), mcs = mc;
    for (int sz : sizes) {
      const auto [lo, hi] = coll.stratum_range(sz);
      double fr = -std::numeric_limits<double>::infinity();
      for (std::size_t m = lo; m < hi; ++m) {
        const auto mi = static_cast<Eigen::Index>(m);
        const double t = draws.t(r, mi);
        const double c = t - s.med(mi);
        const double cs = c / eff_mad(mi);
        if (t > mt) mt = t;
        if (c > mc) mc = c;
        if (cs > mcs) mcs = cs;
        if (cs > fr) fr = cs;
      }
      frak[sz][static_cast<std::size_t>(r)] = fr;
    }
    max_t[static_cast<std::size_t>(r)] = mt;
    max_c[static_cast<std::size_t>(r)] = mc;
    max_cs[static_cast<std::size_t>(r)] = mcs;
  }

  for (int sz : sizes) s.med_frak[sz] = median(frak[sz]);

  std::vector<double> size_adj(static_cast<std::size_t>(b));
  for (int r = 0; r < b; ++r) {
    double best = -std::numeric_limits<double>::infinity();
    for (int sz : sizes) best = std::max(best, frak[sz][static_cast<std::size_t>(r)] - s.med_frak[sz]);
    size_adj[static_cast<std::size_t>(r)] = best;
  }

  s.k0 = empirical_quantile(max_t, alpha);
  s.k1 = empirical_quantile(max_c, alpha);
  s.k2 = empirical_quantile(max_cs, alpha);
  s.k3 = empirical_quantile(size_adj, alpha);
  return s;
}

PosiRegion build_region(PosiMethod method, const ModelCollection& coll, std::size_t model_index,
                        const Eigen::VectorXd& beta_hat, const Eigen::VectorXd& se,
                        const PosiSummary& summary) {
  if (model_index >= coll.size()) throw DomainError("model index out of range");
  const auto mi = static_cast<Eigen::Index>(model_index);
  const ModelId& model = coll[model_index];
  if (beta_hat.size() != model.size() || se.size() != model.size())
    throw DomainError("beta_hat/se width mismatch");
  const double eff_mad = summary.mad_fallback[model_index] ? 1.0 : summary.mad(mi);
  double threshold = 0.0;
  switch (method) {
    case PosiMethod::constant:
      threshold = summary.k0;
      break;
    case PosiMethod::centered:
      threshold = summary.med(mi) + summary.k1;
      break;
    case PosiMethod::scaled:
      threshold = summary.med(mi) + eff_mad * summary.k2;
      break;
    case PosiMethod::size_adjusted: {
      auto it = summary.med_frak.find(model.size());
      if (it == summary.med_frak.end()) throw DomainError("no size stratum for model " + model.str());
      threshold = summary.med(mi) + eff_mad * (summary.k3 + it->second);
      break;
    }
    default:
      throw DomainError("unknown method");
  }
  // a negative rule value denotes an empty box; the stored threshold stays >= 0
  return PosiRegion{method, model, beta_hat, se, std::max(0.0, threshold)};
}

bool covers(const PosiRegion& region, const Eigen::VectorXd& target) {
  if (target.size() != region.center.size()) throw DomainError("target length mismatch");
  double worst = 0.0;
  for (int j = 0; j < target.size(); ++j) {
    const double diff = std::abs(region.center(j) - target(j));
    double t;
    if (region.se(j) > 0.0)
      t = diff / region.se(j);
    else
      t = diff == 0.0 ? 0.0 : std::numeric_limits<double>::infinity();
    if (t > worst) worst = t;
  }
  return worst <= region.threshold;
}

}  // namespace alr
