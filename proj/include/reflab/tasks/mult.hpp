#pragma once

// Integer multiplication as an MTP. A state x*y+z keeps x*y+z equal to the
// query product; a step picks a digit value u of one operand, adds
// u * other * 10^p to z for every position p holding u, and zeroes those
// digits. The answer is z once an operand reaches 0.

#include <algorithm>
#include <cstdint>
#include <optional>
#include <string>
#include <string_view>
#include <vector>

#include "reflab/error.hpp"
#include "reflab/mtp.hpp"
#include "reflab/rng.hpp"
#include "reflab/tasks/tier.hpp"
#include "reflab/tasks/wide.hpp"

namespace reflab {

inline constexpr int kMaxMultDigits = 10;

struct MultTask;

struct MultQuery {
    using task = MultTask;
    Wide x = 0;
    Wide y = 0;

    friend bool operator==(const MultQuery&, const MultQuery&) = default;
};

struct MultState {
    Wide x = 0;
    Wide y = 0;
    Wide z = 0;

    bool terminal() const noexcept { return x == 0 || y == 0; }
    Wide value() const noexcept { return x * y + z; }

    friend bool operator==(const MultState&, const MultState&) = default;
};

enum class Side : unsigned char { x, y };

inline std::string_view to_string(Side s) { return s == Side::x ? "x" : "y"; }

/// Either an answer (is_answer, answer) or an elimination of digit u from one
/// operand. partial_sums[k] is z after adding contributions[0..k].
struct MultStep {
    bool is_answer = false;
    Wide answer = 0;
    Side side = Side::y;
    int digit = 0;
    std::vector<int> positions;
    Wide delta = 0;
    std::vector<Wide> contributions;
    std::vector<Wide> partial_sums;
    MultState next;

    friend bool operator==(const MultStep&, const MultStep&) = default;
};

inline Wide& operand(MultState& s, Side side) { return side == Side::x ? s.x : s.y; }
inline Wide operand(const MultState& s, Side side) { return side == Side::x ? s.x : s.y; }
inline Wide other_operand(const MultState& s, Side side) { return side == Side::x ? s.y : s.x; }

struct MultTask {
    using query_type = MultQuery;
    using state_type = MultState;
    using step_type = MultStep;

    static void validate(const MultQuery& q) {
        if (digit_count(q.x) > kMaxMultDigits || digit_count(q.y) > kMaxMultDigits)
            throw InputError("Mult operands are limited to 10 digits");
    }
    static MultState initial_state(const MultQuery& q) { return {q.x, q.y, 0}; }
    static bool is_answer(const MultStep& r) { return r.is_answer; }
    static bool check_answer(const MultQuery& q, const MultStep& r) { return r.is_answer && r.answer == q.x * q.y; }
};

inline std::string render(const MultState& s) { return to_string(s.x) + "*" + to_string(s.y) + "+" + to_string(s.z); }
inline std::string render(const MultQuery& q) { return to_string(q.x) + "*" + to_string(q.y); }

inline MultState parse_mult_state(std::string_view text) {
    const auto star = text.find('*');
    const auto plus = text.find('+');
    if (star == std::string_view::npos || plus == std::string_view::npos || plus < star)
        throw InputError("Mult state must look like x*y+z: " + std::string(text));
    return {parse_wide(text.substr(0, star)), parse_wide(text.substr(star + 1, plus - star - 1)),
            parse_wide(text.substr(plus + 1))};
}

inline MultQuery parse_mult_query(std::string_view text) {
    const auto star = text.find('*');
    if (star == std::string_view::npos) throw InputError("Mult query must look like x*y: " + std::string(text));
    return {parse_wide(text.substr(0, star)), parse_wide(text.substr(star + 1))};
}

/// Recomputes partial sums from index `from` on and assembles next.z.
inline void mult_resum(const MultState& s, MultStep& r, std::size_t from = 0) {
    r.partial_sums.resize(r.contributions.size());
    for (std::size_t k = from; k < r.contributions.size(); ++k)
        r.partial_sums[k] = (k == 0 ? s.z : r.partial_sums[k - 1]) + r.contributions[k];
    r.next.z = r.partial_sums.empty() ? s.z : r.partial_sums.back();
}

/// Eliminates every occurrence of digit u from the chosen operand.
inline MultStep mult_elimination_step(const MultState& s, Side side, int u) {
    if (u < 1 || u > 9) throw InputError("digit must be in 1..9");
    const Wide op = operand(s, side);
    MultStep r;
    r.side = side;
    r.digit = u;
    for (int p = 0, n = digit_count(op); p < n; ++p)
        if (digit_at(op, p) == u) r.positions.push_back(p);
    if (r.positions.empty()) throw InputError("operand has no digit " + std::to_string(u));
    r.delta = static_cast<Wide>(u) * other_operand(s, side);
    r.next = s;
    for (int p : r.positions) {
        r.contributions.push_back(r.delta * pow10(p));
        operand(r.next, side) -= static_cast<Wide>(u) * pow10(p);
    }
    mult_resum(s, r);
    return r;
}

/// Expert plan: the smallest nonzero digit of y. Throws InputError on a
/// terminal state.
inline MultStep mult_expert_step(const MultState& s) {
    if (s.terminal()) throw InputError("terminal Mult state has no elimination step");
    int u = 10;
    for (int p = 0, n = digit_count(s.y); p < n; ++p) {
        const int d = digit_at(s.y, p);
        if (d != 0 && d < u) u = d;
    }
    return mult_elimination_step(s, Side::y, u);
}

inline MultStep mult_answer_step(const MultState& s) {
    MultStep r;
    r.is_answer = true;
    r.answer = s.z;
    return r;
}

/// Returns step.next after structural checks; arithmetic is not validated.
inline MultState mult_apply(const MultState& s, const MultStep& r) {
    (void)s;
    if (r.is_answer) throw TransitionError("answer steps have no successor state");
    if (r.digit < 1 || r.digit > 9) throw TransitionError("step digit out of range");
    if (r.contributions.size() != r.positions.size() || r.partial_sums.size() != r.positions.size())
        throw TransitionError("positions, contributions and partial sums differ in length");
    for (int p : r.positions)
        if (p < 0 || p >= kMaxWideDigits) throw TransitionError("digit position out of range");
    return r.next;
}

struct MultTransition {
    MultState apply(const MultState& s, const MultStep& r) const { return mult_apply(s, r); }
};

struct MultExpertPolicy {
    MultStep sample(const MultState& s, Rng&) const { return s.terminal() ? mult_answer_step(s) : mult_expert_step(s); }
};

// --- verification --------------------------------------------------------------

/// One label: the step keeps x*y+z (answer: answer equals x*y+z).
inline Verification mult_verify_binary(const MultState& s, const MultStep& r) {
    if (r.is_answer) return Verification::from_verdict(r.answer == s.value());
    return Verification::from_verdict(r.next.value() == s.value());
}

/// Label layout of a detailed elimination check with K positions:
/// [0] delta = u * other operand; [1+2k] contribution k = delta * 10^p_k;
/// [2+2k] partial sum k = previous sum + contribution k; [1+2K] reduced
/// operand (digits at the listed positions were u and are now 0);
/// [2+2K] next z equals the last partial sum and the other operand is unchanged.
/// An answer step gets the single binary label.
namespace mult_labels {
inline constexpr std::size_t delta = 0;
inline constexpr std::size_t contribution(std::size_t k) { return 1 + 2 * k; }
inline constexpr std::size_t partial_sum(std::size_t k) { return 2 + 2 * k; }
inline constexpr std::size_t operand(std::size_t K) { return 1 + 2 * K; }
inline constexpr std::size_t assembly(std::size_t K) { return 2 + 2 * K; }
inline constexpr std::size_t count(std::size_t K) { return 3 + 2 * K; }
}  // namespace mult_labels

inline Verification mult_verify_detailed(const MultState& s, const MultStep& r) {
    if (r.is_answer) return mult_verify_binary(s, r);
    const std::size_t K = r.positions.size();
    const bool shapes_ok = r.contributions.size() == K && r.partial_sums.size() == K;
    const bool digit_ok = r.digit >= 1 && r.digit <= 9;
    const Wide u = digit_ok ? static_cast<Wide>(r.digit) : 0;
    Verification v;
    v.push_back(label_of(digit_ok && r.delta == u * other_operand(s, r.side)));
    Wide sum = s.z;
    for (std::size_t k = 0; k < K; ++k) {
        const int p = r.positions[k];
        const bool pos_ok = p >= 0 && p < kMaxWideDigits;
        const Wide c = k < r.contributions.size() ? r.contributions[k] : 0;
        const Wide ps = k < r.partial_sums.size() ? r.partial_sums[k] : 0;
        v.push_back(label_of(shapes_ok && pos_ok && c == r.delta * pow10(p)));
        v.push_back(label_of(shapes_ok && ps == sum + c));
        sum = ps;
    }
    bool operand_ok = digit_ok;
    Wide expected = operand(s, r.side);
    for (std::size_t k = 0; k < K && operand_ok; ++k) {
        const int p = r.positions[k];
        for (std::size_t j = 0; j < k; ++j) operand_ok = operand_ok && r.positions[j] != p;
        operand_ok = operand_ok && p >= 0 && p < kMaxWideDigits && digit_at(operand(s, r.side), p) == r.digit;
        if (operand_ok) expected -= u * pow10(p);
    }
    v.push_back(label_of(operand_ok && operand(r.next, r.side) == expected));
    const bool z_ok = K == 0 ? r.next.z == s.z : shapes_ok && r.next.z == r.partial_sums.back();
    v.push_back(label_of(z_ok && other_operand(r.next, r.side) == other_operand(s, r.side)));
    return v;
}

// --- corruption --------------------------------------------------------------

/// Changes one uniformly chosen decimal digit of v to a different value.
inline Wide perturb_digit(Wide v, Rng& rng) {
    const int p = static_cast<int>(rng.below(static_cast<std::uint64_t>(digit_count(v))));
    const int old = digit_at(v, p);
    int d = static_cast<int>(rng.below(9));
    if (d >= old) ++d;
    return v - static_cast<Wide>(old) * pow10(p) + static_cast<Wide>(d) * pow10(p);
}

/// Perturbs contribution k and recomputes the running sum and next z.
inline void corrupt_mult_contribution(const MultState& s, MultStep& r, std::size_t k, Rng& rng) {
    r.contributions.at(k) = perturb_digit(r.contributions[k], rng);
    mult_resum(s, r, k);
}

struct MultCorruption {
    MultStep step;
    std::size_t label = 0;  // index of the corrupted element in the detailed layout
};

/// Single-element corruption of a well-formed step, chosen uniformly over
/// the detailed label positions; downstream values are recomputed so only the
/// chosen element is wrong.
inline MultCorruption corrupt_mult_step(const MultState& s, const MultStep& r, Rng& rng) {
    MultCorruption c{r, 0};
    if (r.is_answer) {
        c.step.answer = perturb_digit(r.answer, rng);
        return c;
    }
    const std::size_t K = r.positions.size();
    c.label = static_cast<std::size_t>(rng.below(mult_labels::count(K)));
    MultStep& t = c.step;
    if (c.label == mult_labels::delta) {
        t.delta = perturb_digit(t.delta, rng);
        for (std::size_t k = 0; k < K; ++k) t.contributions[k] = t.delta * pow10(t.positions[k]);
        mult_resum(s, t);
    } else if (c.label == mult_labels::operand(K)) {
        operand(t.next, t.side) = perturb_digit(operand(t.next, t.side), rng);
    } else if (c.label == mult_labels::assembly(K)) {
        t.next.z = perturb_digit(t.next.z, rng);
    } else if (c.label % 2 == 1) {
        corrupt_mult_contribution(s, t, (c.label - 1) / 2, rng);
    } else {
        const std::size_t k = (c.label - 2) / 2;
        t.partial_sums[k] = perturb_digit(t.partial_sums[k], rng);
        mult_resum(s, t, k + 1);
    }
    return c;
}

/// Expert policy that corrupts its step with some probability: one
/// contribution digit for eliminations, one answer digit for answers.
/// `revision_error` applies from the second attempt at a state on.
class MultNoisyPolicy {
public:
    explicit MultNoisyPolicy(double error, std::optional<double> revision_error = std::nullopt)
        : first_(error), revision_(revision_error.value_or(error)) {
        if (!(first_ >= 0.0 && first_ <= 1.0) || !(revision_ >= 0.0 && revision_ <= 1.0))
            throw InputError("policy error probabilities must lie in [0, 1]");
    }

    MultStep sample(const MultState& s, std::size_t attempt, Rng& rng) const {
        MultStep r = MultExpertPolicy{}.sample(s, rng);
        if (!rng.bernoulli(attempt <= 1 ? first_ : revision_)) return r;
        if (r.is_answer) {
            r.answer = perturb_digit(r.answer, rng);
        } else {
            const auto k = static_cast<std::size_t>(rng.below(r.contributions.size()));
            corrupt_mult_contribution(s, r, k, rng);
        }
        return r;
    }

private:
    double first_;
    double revision_;
};

// --- queries -----------------------------------------------------------------

/// Uniform number with exactly `digits` decimal digits.
inline Wide random_with_digits(int digits, Rng& rng) {
    Wide v = static_cast<Wide>(1 + rng.below(9));
    for (int i = 1; i < digits; ++i) v = v * 10 + rng.below(10);
    return v;
}

/// The greater operand gets d digits, d uniform in the tier range; the other
/// gets a uniform count in [1, d]; which operand is greater is a coin flip.
inline MultQuery gen_mult_query(Tier tier, Rng& rng) {
    const auto range = mult_digit_range(tier);
    const int d = static_cast<int>(rng.between(range.lo, range.hi));
    const int e = static_cast<int>(rng.between(1, d));
    const Wide a = random_with_digits(d, rng);
    const Wide b = random_with_digits(e, rng);
    return rng.bernoulli(0.5) ? MultQuery{a, b} : MultQuery{b, a};
}

/// Tier whose digit range contains the larger operand's digit count.
inline Tier mult_tier_of(const MultQuery& q) {
    const int d = std::max(digit_count(q.x), digit_count(q.y));
    for (Tier t : kAllTiers)
        if (mult_digit_range(t).contains(d)) return t;
    throw InputError("Mult query exceeds every tier");
}

}  // namespace reflab
