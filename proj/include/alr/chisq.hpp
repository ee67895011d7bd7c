#pragma once

namespace alr {

// Regularized lower incomplete gamma P(a, x) for a > 0, x >= 0.
double regularized_gamma_p(double a, double x);

// (1 - alpha) quantile of the chi-square distribution with df degrees of
// freedom, by numerical inversion of P(df/2, x/2) to 1e-10 relative.
double chisq_quantile(int df, double alpha);

}  // namespace alr
