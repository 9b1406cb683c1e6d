#pragma once

#include <span>
#include <vector>

namespace sitm::stats {

// Descriptive statistics over finite samples. Empty input yields NaN.
// Standard deviations are population (1/N) throughout.

double mean(std::span<const double> x);
double population_std(std::span<const double> x);
double median(std::span<const double> x);
/// Linear-interpolated quantile (Hyndman-Fan type 7), q in [0, 1].
double quantile(std::span<const double> x, double q);
double iqr(std::span<const double> x);
double min(std::span<const double> x);
double max(std::span<const double> x);

/// Fisher skewness m3 / m2^1.5; 0 when the spread is zero.
double skewness(std::span<const double> x);
/// Excess kurtosis m4 / m2^2 - 3; 0 when the spread is zero.
double excess_kurtosis(std::span<const double> x);

/// Copies the finite entries of x.
std::vector<double> finite_values(std::span<const double> x);

}  // namespace sitm::stats
