#pragma once

namespace vgreg {

/// Regularized lower incomplete gamma P(a, x) for a > 0, x >= 0.
double regularized_gamma_p(double a, double x);

/// CDF of the chi-square distribution with `dof` degrees of freedom.
double chi2_cdf(double x, int dof);

/// x with chi2_cdf(x, dof) == p, by safeguarded Newton iteration on the
/// incomplete gamma function. Throws InvalidArgument unless 0 < p < 1 and
/// dof >= 1.
double chi2_quantile(double p, int dof);

}  // namespace vgreg
