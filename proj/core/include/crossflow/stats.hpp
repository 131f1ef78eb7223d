#pragma once

#include <cstddef>
#include <span>
#include <vector>

namespace crossflow::stats {

double mean(std::span<const double> xs);
double variance(std::span<const double> xs);  // population variance
double stddev(std::span<const double> xs);

/// Quantile with linear interpolation between order statistics
/// (position q * (n - 1)). Input need not be sorted.
double quantile(std::span<const double> xs, double q);

/// Median via quantile(0.5).
double median(std::span<const double> xs);

/// R^2 of the univariate OLS fit y = a + b * x. Returns 0 when x or y
/// has zero variance.
double univariate_r2(std::span<const double> x, std::span<const double> y);

/// Two-sided p-value of a t statistic with `dof` degrees of freedom.
double t_pvalue_two_sided(double t, double dof);

/// Regularized incomplete beta function I_x(a, b).
double incomplete_beta(double a, double b, double x);

}  // namespace crossflow::stats
