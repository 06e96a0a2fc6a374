#pragma once

#include <span>

namespace fasthymix {

double mean(std::span<const double> v);

/// Population (1/n) standard deviation.
double population_std(std::span<const double> v);

double median(std::span<const double> v);

/// Median absolute deviation from the median (unscaled).
double median_absolute_deviation(std::span<const double> v);

/// max(v) - min(v); 0 for an empty span.
double value_range(std::span<const double> v);

}  // namespace fasthymix
