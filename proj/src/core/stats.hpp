#pragma once

#include <vector>

namespace gwfit {

double normal_cdf(double x);
double normal_quantile(double p);

// chi-square quantile with two degrees of freedom: -2 log(1 - level)
double chi2_quantile_2dof(double level);

// One-sample Kolmogorov-Smirnov statistic against the standard normal.
double ks_statistic(std::vector<double> sample);

// Asymptotic p-value from the Kolmogorov distribution.
double ks_pvalue(double statistic, int n);

double median(std::vector<double> v);
double mean(const std::vector<double>& v);
double variance(const std::vector<double>& v);

}  // namespace gwfit
