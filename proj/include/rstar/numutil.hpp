#pragma once

#include <utility>
#include <vector>

namespace rstar {

/// Standard normal CDF, erfc-based (absolute error below 1e-15).
double normal_cdf(double x);

/// Standard normal quantile; rational approximation polished with one
/// Halley step on the erfc-based CDF.
double normal_quantile(double p);

double mean(const std::vector<double>& v);

/// Sample standard deviation (divisor n-1; 0 for fewer than two values).
double stdev(const std::vector<double>& v);

/// Linear-interpolated quantile of a sorted sample (R type 7).
double quantile_sorted(const std::vector<double>& sorted, double q);

/// Least-squares slope of log(y) against log(x); pairs with y <= 0 are
/// clamped to `floor_y` before the log. Returns NaN for fewer than 2 points.
double loglog_slope(const std::vector<double>& x, const std::vector<double>& y,
                    double floor_y = 1e-300);

/// Intercept a of log(y) = a + slope*log(x) for a fixed slope (least squares).
double loglog_intercept(const std::vector<double>& x, const std::vector<double>& y,
                        double slope, double floor_y = 1e-300);

}  // namespace rstar
