#pragma once

// Rule-based step verifiers over both tasks, and verdict-flipping noise.

#include <string_view>

#include "reflab/error.hpp"
#include "reflab/mtp.hpp"
#include "reflab/rng.hpp"
#include "reflab/tasks/mult.hpp"
#include "reflab/tasks/sudoku.hpp"

namespace reflab {

inline Verification verify_binary(const MultState& s, const MultStep& r) { return mult_verify_binary(s, r); }
inline Verification verify_binary(const SudokuBoard& s, const SudokuStep& r) { return sudoku_verify_binary(s, r); }
inline Verification verify_detailed(const MultState& s, const MultStep& r) { return mult_verify_detailed(s, r); }
inline Verification verify_detailed(const SudokuBoard& s, const SudokuStep& r) { return sudoku_verify_detailed(s, r); }

enum class VerifyStyle { binary, detailed };

inline std::string_view to_string(VerifyStyle s) { return s == VerifyStyle::binary ? "binary" : "detailed"; }

inline VerifyStyle parse_verify_style(std::string_view s) {
    if (s == "binary") return VerifyStyle::binary;
    if (s == "detailed") return VerifyStyle::detailed;
    throw InputError("unknown verification style '" + std::string(s) + "' (expected binary or detailed)");
}

/// Exact rule-based checker for either task.
struct OracleVerifier {
    VerifyStyle style = VerifyStyle::binary;

    template <class State, class Step>
    Verification verify(const State& s, const Step& r, Rng&) const {
        return style == VerifyStyle::binary ? verify_binary(s, r) : verify_detailed(s, r);
    }

    template <class State, class Step>
    bool correct(const State& s, const Step& r) const {
        return !verify_binary(s, r).rejects();
    }
};

/// Oracle whose overall verdict is flipped: a correct step is rejected with
/// probability e_minus (detailed: one uniformly chosen label turns negative),
/// an incorrect one is accepted with probability e_plus (all labels positive).
class NoisyVerifier {
public:
    NoisyVerifier(VerifyStyle style, double e_minus, double e_plus)
        : oracle_{style}, e_minus_(e_minus), e_plus_(e_plus) {
        if (!(e_minus >= 0.0 && e_minus <= 1.0) || !(e_plus >= 0.0 && e_plus <= 1.0))
            throw InputError("verifier error rates must lie in [0, 1]");
    }

    template <class State, class Step>
    Verification verify(const State& s, const Step& r, Rng& rng) const {
        Verification v = oracle_.verify(s, r, rng);
        if (!v.rejects()) {
            if (rng.bernoulli(e_minus_)) v.set(rng.below(v.size()), Label::negative);
        } else if (rng.bernoulli(e_plus_)) {
            for (std::size_t i = 0; i < v.size(); ++i) v.set(i, Label::positive);
        }
        return v;
    }

    double e_minus() const noexcept { return e_minus_; }
    double e_plus() const noexcept { return e_plus_; }

private:
    OracleVerifier oracle_;
    double e_minus_;
    double e_plus_;
};

/// Accepts everything with a single positive label.
struct AcceptingVerifier {
    template <class State, class Step>
    Verification verify(const State&, const Step&, Rng&) const {
        return Verification::single(Label::positive);
    }
};

}  // namespace reflab
