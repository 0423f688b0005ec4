#pragma once

#include <charconv>
#include <cmath>
#include <cstdio>
#include <string>

namespace reflab {

/// Shortest round-trip decimal form; "nan"/"inf"/"-inf" for non-finite values.
inline std::string format_double(double x) {
    if (std::isnan(x)) return "nan";
    if (std::isinf(x)) return x > 0 ? "inf" : "-inf";
    char buf[64];
    auto [end, ec] = std::to_chars(buf, buf + sizeof buf, x);
    return std::string(buf, end);
}

/// Fixed one-decimal percentage of a ratio, e.g. 0.1234 -> "12.3".
inline std::string format_percent(double ratio) {
    if (std::isnan(ratio)) return "";
    char buf[32];
    std::snprintf(buf, sizeof buf, "%.1f", ratio * 100.0);
    return buf;
}

}  // namespace reflab
