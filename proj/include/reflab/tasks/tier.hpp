#pragma once

#include <array>
#include <string>
#include <string_view>

#include "reflab/error.hpp"

namespace reflab {

enum class Tier { id_easy, id_hard, ood_hard };

inline constexpr std::array<Tier, 3> kAllTiers{Tier::id_easy, Tier::id_hard, Tier::ood_hard};

inline std::string_view to_string(Tier t) {
    switch (t) {
        case Tier::id_easy: return "id_easy";
        case Tier::id_hard: return "id_hard";
        case Tier::ood_hard: return "ood_hard";
    }
    return "?";
}

inline Tier parse_tier(std::string_view s) {
    for (Tier t : kAllTiers)
        if (to_string(t) == s) return t;
    throw InputError("unknown tier '" + std::string(s) + "' (expected id_easy, id_hard or ood_hard)");
}

struct TierRange {
    int lo = 0;
    int hi = 0;  // inclusive

    bool contains(int v) const { return lo <= v && v <= hi; }
};

/// Digit count of the greater Mult operand.
inline TierRange mult_digit_range(Tier t) {
    switch (t) {
        case Tier::id_easy: return {1, 5};
        case Tier::id_hard: return {6, 8};
        case Tier::ood_hard: return {9, 10};
    }
    return {};
}

/// Number of blank Sudoku cells.
inline TierRange sudoku_blank_range(Tier t) {
    switch (t) {
        case Tier::id_easy: return {9, 35};
        case Tier::id_hard: return {36, 53};
        case Tier::ood_hard: return {54, 62};
    }
    return {};
}

}  // namespace reflab
