#pragma once

#include <span>

namespace survkit::stats {

/// Regularized lower incomplete gamma P(a, x) = gamma(a, x) / Gamma(a).
double regularized_gamma_p(double a, double x);

/// Regularized upper incomplete gamma Q(a, x) = 1 - P(a, x).
double regularized_gamma_q(double a, double x);

/// Survival function of the chi-square distribution: Pr(X > x) with df degrees
/// of freedom, computed as Q(df/2, x/2).
double chi_square_sf(double x, int df);

double normal_cdf(double z);
double normal_sf(double z);

/// Two-sided p-value for a standard normal z statistic: erfc(|z| / sqrt(2)).
double two_sided_normal_p(double z);

/// Linear-interpolation quantile (the "type 7" convention: h = (n-1)p) of an
/// ascending-sorted sample. p must lie in [0, 1] and the sample must be
/// non-empty.
double quantile_sorted(std::span<const double> sorted, double p);

} // namespace survkit::stats
