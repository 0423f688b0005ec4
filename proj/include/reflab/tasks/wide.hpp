#pragma once

// Exact unsigned integer arithmetic for Mult states. Two 10-digit operands
// multiply to below 10^20, which overflows 64 bits, so 128 bits are used.

#include <algorithm>
#include <string>
#include <string_view>

#include "reflab/error.hpp"

namespace reflab {

using Wide = unsigned __int128;

inline constexpr int kMaxWideDigits = 38;

inline constexpr Wide pow10(int p) {
    Wide v = 1;
    for (int i = 0; i < p; ++i) v *= 10;
    return v;
}

/// Decimal digit at position p (0 = units).
inline constexpr int digit_at(Wide v, int p) { return static_cast<int>((v / pow10(p)) % 10); }

/// Number of decimal digits; 0 has one digit.
inline constexpr int digit_count(Wide v) {
    int n = 1;
    while (v >= 10) {
        v /= 10;
        ++n;
    }
    return n;
}

inline std::string to_string(Wide v) {
    std::string s;
    do {
        s.push_back(static_cast<char>('0' + static_cast<int>(v % 10)));
        v /= 10;
    } while (v != 0);
    std::reverse(s.begin(), s.end());
    return s;
}

/// Parses a non-empty decimal string of at most 38 digits.
inline Wide parse_wide(std::string_view s) {
    if (s.empty()) throw InputError("empty integer");
    if (s.size() > static_cast<std::size_t>(kMaxWideDigits)) throw InputError("integer too long: " + std::string(s));
    Wide v = 0;
    for (char c : s) {
        if (c < '0' || c > '9') throw InputError("not a decimal integer: " + std::string(s));
        v = v * 10 + static_cast<unsigned>(c - '0');
    }
    return v;
}

}  // namespace reflab
