#pragma once

#include <cmath>
#include <cstddef>
#include <limits>
#include <span>
#include <utility>

namespace reflab::stats {

/// Two-sided 99% normal quantile.
inline constexpr double z99 = 2.5758293035489004;

struct Interval {
    double lo = 0.0;
    double hi = 1.0;
    double width() const { return hi - lo; }
    bool contains(double x) const { return lo <= x && x <= hi; }
};

/// Wilson score interval for `successes` out of `trials`.
inline Interval wilson(std::size_t successes, std::size_t trials, double z = z99) {
    if (trials == 0) return {0.0, 1.0};
    const double n = static_cast<double>(trials);
    const double p = static_cast<double>(successes) / n;
    const double z2 = z * z;
    const double denom = 1.0 + z2 / n;
    const double centre = (p + z2 / (2.0 * n)) / denom;
    const double half = z * std::sqrt(p * (1.0 - p) / n + z2 / (4.0 * n * n)) / denom;
    // p itself must sit inside the interval even after rounding.
    return {std::min(std::max(0.0, centre - half), p), std::max(std::min(1.0, centre + half), p)};
}

/// Binomial standard deviation of a proportion estimate.
inline double binomial_sd(double p, std::size_t trials) {
    if (trials == 0) return std::numeric_limits<double>::infinity();
    return std::sqrt(p * (1.0 - p) / static_cast<double>(trials));
}

/// (estimate - expected) / sd; 0 when both agree exactly with zero sd.
inline double zscore(double estimate, double expected, std::size_t trials) {
    const double sd = binomial_sd(expected, trials);
    const double diff = estimate - expected;
    if (sd == 0.0) {
        if (diff == 0.0) return 0.0;
        return diff > 0 ? std::numeric_limits<double>::infinity() : -std::numeric_limits<double>::infinity();
    }
    return diff / sd;
}

inline double mean(std::span<const double> xs) {
    if (xs.empty()) return std::numeric_limits<double>::quiet_NaN();
    double s = 0.0;
    for (double x : xs) s += x;
    return s / static_cast<double>(xs.size());
}

/// Population standard deviation (divide by N).
inline double population_sd(std::span<const double> xs) {
    if (xs.empty()) return std::numeric_limits<double>::quiet_NaN();
    const double m = mean(xs);
    double s = 0.0;
    for (double x : xs) s += (x - m) * (x - m);
    return std::sqrt(s / static_cast<double>(xs.size()));
}

}  // namespace reflab::stats
