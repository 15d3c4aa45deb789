#pragma once

#include <vector>

namespace gazeqa::stats {

double mean(const std::vector<double>& v);

/// Population standard deviation (divide by n).
double population_sd(const std::vector<double>& v);

/// Sample standard deviation (divide by n - 1); requires n >= 2.
double sample_sd(const std::vector<double>& v);

/// Linear-interpolation percentile between order statistics ("type 7").
/// p in [0, 1]; throws std::invalid_argument on empty input.
double percentile(std::vector<double> values, double p);
double median(std::vector<double> values);

/// Regularized incomplete beta I_x(a, b), a, b > 0, x in [0, 1].
double incomplete_beta(double a, double b, double x);

double t_cdf(double t, double df);

/// Two-sided p-value for an observed t statistic.
double t_two_sided_p(double t, double df);

/// Inverse CDF of Student's t; 0 < p < 1, df >= 1.
double t_quantile(double p, double df);

}  // namespace gazeqa::stats
