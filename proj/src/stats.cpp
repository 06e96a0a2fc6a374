#include "fasthymix/stats.hpp"

#include <algorithm>
#include <cmath>
#include <vector>

#include "fasthymix/errors.hpp"

namespace fasthymix {

double mean(std::span<const double> v) {
    if (v.empty()) throw DegenerateInputError("mean of empty vector");
    double sum = 0.0;
    for (double x : v) sum += x;
    return sum / static_cast<double>(v.size());
}

double population_std(std::span<const double> v) {
    const double m = mean(v);
    double ss = 0.0;
    for (double x : v) ss += (x - m) * (x - m);
    return std::sqrt(ss / static_cast<double>(v.size()));
}

double median(std::span<const double> v) {
    if (v.empty()) throw DegenerateInputError("median of empty vector");
    std::vector<double> tmp(v.begin(), v.end());
    const auto mid = tmp.size() / 2;
    std::nth_element(tmp.begin(), tmp.begin() + static_cast<std::ptrdiff_t>(mid), tmp.end());
    const double upper = tmp[mid];
    if (tmp.size() % 2 == 1) return upper;
    const double lower = *std::max_element(tmp.begin(), tmp.begin() + static_cast<std::ptrdiff_t>(mid));
    return 0.5 * (lower + upper);
}

double median_absolute_deviation(std::span<const double> v) {
    const double m = median(v);
    std::vector<double> dev(v.size());
    std::transform(v.begin(), v.end(), dev.begin(), [m](double x) { return std::abs(x - m); });
    return median(dev);
}

double value_range(std::span<const double> v) {
    if (v.empty()) return 0.0;
    const auto [lo, hi] = std::minmax_element(v.begin(), v.end());
    return *hi - *lo;
}

}  // namespace fasthymix
