#pragma once

#include <cstddef>
#include <vector>

namespace sentipred::stats {

double mean(const std::vector<double>& x);
/// Sample variance (n-1 denominator); 0 for fewer than two points.
double variance(const std::vector<double>& x);

/// Pearson correlation of two equal-length vectors; 0 when either side is
/// constant.
double pearson(const std::vector<double>& x, const std::vector<double>& y);

/// Quantile of the standard normal distribution (Acklam's algorithm,
/// relative error below 1.15e-9). p must lie in (0, 1).
double normal_quantile(double p);

/// Regularized incomplete beta function I_x(a, b).
double incomplete_beta(double a, double b, double x);

/// Two-sided p-value of a t statistic with df degrees of freedom.
double t_pvalue_two_sided(double t, double df);

/// Upper-tail probability P(F > f) for an F(df1, df2) distribution.
double f_sf(double f, double df1, double df2);

}  // namespace sentipred::stats
