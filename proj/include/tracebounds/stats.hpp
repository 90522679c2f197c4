#pragma once

#include <cstddef>
#include <functional>
#include <span>
#include <vector>

namespace tracebounds {

struct KsResult {
    double statistic = 0.0; ///< sup |F̂ − G|
    double p_value = 1.0;
};

/// Survival function of the Kolmogorov distribution, Pr{K > λ}.
double kolmogorov_survival(double lambda);

/// One-sample KS test against a continuous CDF, asymptotic p-value with
/// Stephens' small-sample correction.
KsResult ks_one_sample(std::span<const double> sample, const std::function<double(double)>& cdf);

/// Two-sample KS test, asymptotic p-value with the same correction on the
/// effective size n·m/(n+m).
KsResult ks_two_sample(std::span<const double> a, std::span<const double> b);

double normal_cdf(double x);

/// Empirical quantile by linear interpolation between order statistics
/// (type 7). `sorted` must be ascending and nonempty.
double quantile_sorted(std::span<const double> sorted, double q);
double median(std::vector<double> values);

/// √(p(1−p)/n)
double binomial_std_error(double p, std::size_t n);

} // namespace tracebounds
