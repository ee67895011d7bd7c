#include "alr/chisq.hpp"

#include <cmath>
#include <limits>

#include "alr/errors.hpp"

namespace alr {

namespace {

// series expansion, converges fast for x < a + 1
double gamma_p_series(double a, double x) {
  double term = 1.0 / a;
  double sum = term;
  for (int k = 1; k < 10000; ++k) {
    term *= x / (a + k);
    sum += term;
    if (std::abs(term) < std::abs(sum) * 1e-16) break;
  }
  return sum * std::exp(-x + a * std::log(x) - std::lgamma(a));
}

// modified Lentz continued fraction for Q(a, x), x >= a + 1
double gamma_q_contfrac(double a, double x) {
  const double tiny = 1e-300;
  double b = x + 1.0 - a;
  double c = 1.0 / tiny;
  double d = 1.0 / b;
  double h = d;
  for (int i = 1; i < 10000; ++i) {
    const double an = -static_cast<double>(i) * (static_cast<double>(i) - a);
    b += 2.0;
    d = an * d + b;
    if (std::abs(d) < tiny) d = tiny;
    c = b + an / c;
    if (std::abs(c) < tiny) c = tiny;
    d = 1.0 / d;
    const double del = d * c;
    h *= del;
    if (std::abs(del - 1.0) < 1e-16) break;
  }
  return h * std::exp(-x + a * std::log(x) - std::lgamma(a));
}

}  // namespace

double regularized_gamma_p(double a, double x) {
  if (a <= 0.0 || x < 0.0) throw DomainError("regularized_gamma_p: need a > 0, x >= 0");
  if (x == 0.0) return 0.0;
  if (x < a + 1.0) return gamma_p_series(a, x);
  return 1.0 - gamma_q_contfrac(a, x);
}

double chisq_quantile(int df, double alpha) {
  if (df < 1) throw DomainError("chisq_quantile: df must be >= 1");
  if (!(alpha > 0.0 && alpha < 1.0)) throw DomainError("chisq_quantile: alpha must be in (0,1)");
  const double a = 0.5 * df;
  const double target = 1.0 - alpha;

  // bracket the root of P(a, x/2) = target
  double lo = 0.0;
  double hi = df + 10.0 * std::sqrt(2.0 * df) + 10.0;
  while (regularized_gamma_p(a, 0.5 * hi) < target) {
    lo = hi;
    hi *= 2.0;
    if (hi > 1e12) throw DomainError("chisq_quantile: bracketing failed");
  }
  for (int i = 0; i < 80; ++i) {
    const double mid = 0.5 * (lo + hi);
    if (regularized_gamma_p(a, 0.5 * mid) < target)
      lo = mid;
    else
      hi = mid;
  }

  // Newton polish; density of chi2_df at x
  double x = 0.5 * (lo + hi);
  for (int i = 0; i < 60; ++i) {
    const double f = regularized_gamma_p(a, 0.5 * x) - target;
    const double pdf = std::exp((a - 1.0) * std::log(0.5 * x) - 0.5 * x - std::lgamma(a)) * 0.5;
    if (pdf <= 0.0) break;
    const double step = f / pdf;
    const double next = x - step;
    if (next <= lo || next >= hi) break;  // keep the bisection bracket
    x = next;
    if (std::abs(step) <= 1e-12 * x) break;
  }
  return x;
}

}  // namespace alr
