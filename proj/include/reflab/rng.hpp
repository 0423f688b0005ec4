#pragma once

#include <cstdint>
#include <limits>
#include <string_view>

namespace reflab {

namespace detail {

constexpr std::uint64_t mix64(std::uint64_t z) noexcept {
    z = (z ^ (z >> 30)) * 0xBF58476D1CE4E5B9ULL;
    z = (z ^ (z >> 27)) * 0x94D049BB133111EBULL;
    return z ^ (z >> 31);
}

constexpr std::uint64_t fnv1a(std::string_view s) noexcept {
    std::uint64_t h = 0xCBF29CE484222325ULL;
    for (unsigned char c : s) {
        h ^= c;
        h *= 0x100000001B3ULL;
    }
    return h;
}

}  // namespace detail

/// Counter-based, splittable generator.
///
/// Output k of a stream is a keyed double finalization of the counter k, so
/// any stream can be derived from (seed, path of split ids) without touching
/// its siblings. Episode runners derive one stream per episode; results are
/// then independent of scheduling order.
///
/// Satisfies UniformRandomBitGenerator.
class Rng {
public:
    using result_type = std::uint64_t;

    explicit constexpr Rng(std::uint64_t seed = 0) noexcept
        : key0_(detail::mix64(seed ^ 0x6A09E667F3BCC909ULL)),
          key1_(detail::mix64(seed + 0x3C6EF372FE94F82BULL)) {}

    static constexpr result_type min() noexcept { return 0; }
    static constexpr result_type max() noexcept { return std::numeric_limits<result_type>::max(); }

    constexpr result_type operator()() noexcept {
        const std::uint64_t c = counter_++;
        return detail::mix64(detail::mix64(c * 0x9E3779B97F4A7C15ULL ^ key0_) + key1_);
    }

    /// Independent child stream; the parent's position is irrelevant.
    constexpr Rng split(std::uint64_t id) const noexcept {
        Rng child;
        child.key0_ = detail::mix64(key0_ ^ detail::mix64(id + 0xA54FF53A5F1D36F1ULL));
        child.key1_ = detail::mix64(key1_ + detail::mix64(id ^ 0x510E527FADE682D1ULL));
        child.counter_ = 0;
        return child;
    }

    constexpr Rng split(std::string_view name) const noexcept { return split(detail::fnv1a(name)); }

    /// Uniform double in [0, 1) with 53 random bits.
    constexpr double uniform() noexcept { return static_cast<double>((*this)() >> 11) * 0x1.0p-53; }

    /// True with probability p; p <= 0 never, p >= 1 always.
    constexpr bool bernoulli(double p) noexcept { return uniform() < p; }

    /// Uniform integer in [0, n). Lemire's multiply-shift with rejection; n must be > 0.
    constexpr std::uint64_t below(std::uint64_t n) noexcept {
        unsigned __int128 m = static_cast<unsigned __int128>((*this)()) * n;
        auto low = static_cast<std::uint64_t>(m);
        if (low < n) {
            const std::uint64_t threshold = (0 - n) % n;
            while (low < threshold) {
                m = static_cast<unsigned __int128>((*this)()) * n;
                low = static_cast<std::uint64_t>(m);
            }
        }
        return static_cast<std::uint64_t>(m >> 64);
    }

    /// Uniform integer in [lo, hi] (inclusive).
    constexpr std::int64_t between(std::int64_t lo, std::int64_t hi) noexcept {
        return lo + static_cast<std::int64_t>(below(static_cast<std::uint64_t>(hi - lo) + 1));
    }

    constexpr std::uint64_t position() const noexcept { return counter_; }

    friend constexpr bool operator==(const Rng&, const Rng&) = default;

private:
    std::uint64_t key0_ = 0;
    std::uint64_t key1_ = 0;
    std::uint64_t counter_ = 0;
};

}  // namespace reflab
