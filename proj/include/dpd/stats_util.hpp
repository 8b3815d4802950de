#pragma once

#include <span>

namespace dpd {

// Descriptive statistics used for starting values and reports.
double mean(std::span<const double> x);
/// (1/n) sum (x - mean)^2
double central_second_moment(std::span<const double> x);
/// (1/(n-1)) sum (x - mean)^2
double sample_variance(std::span<const double> x);
double median(std::span<const double> x);
double median_absolute_deviation(std::span<const double> x);
/// Linear-interpolation quantile (type 7).
double quantile(std::span<const double> x, double prob);

}  // namespace dpd
