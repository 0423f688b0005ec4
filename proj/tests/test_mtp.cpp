#include <gtest/gtest.h>

#include "oracles.hpp"
#include "reflab/reflab.hpp"

using namespace reflab;

namespace {

struct CountingTransition {
    mutable int calls = 0;
    MultState apply(const MultState& s, const MultStep& r) const {
        ++calls;
        return mult_apply(s, r);
    }
};

std::string value_of(const MultState& s) { return oracle::expression_value(render(s)); }

}  // namespace

TEST(Verification, RejectedIffAnyNegative) {
    EXPECT_FALSE(is_rejected(Verification::parse("++")));
    EXPECT_FALSE(is_rejected(Verification{}));
    EXPECT_TRUE(is_rejected(Verification::parse("+-+")));
    EXPECT_EQ(Verification::parse("+-+").negatives(), 1u);
}

TEST(Verification, ParseRejectsOtherCharacters) {
    EXPECT_THROW(Verification::parse("+x"), InputError);
    EXPECT_EQ(Verification::parse("").str(), "");
}

TEST(ReflectiveTransition, NegativeLabelKeepsState) {
    const MultState s{12, 34, 0};
    const auto step = mult_expert_step(s);
    CountingTransition tr;
    EXPECT_EQ(reflective_transition(s, VerifiedStep<MultStep>{step, Verification::parse("-")}, tr), s);
    EXPECT_EQ(tr.calls, 0);
}

TEST(ReflectiveTransition, EmptyVerificationApplies) {
    const MultState s{12, 34, 0};
    const auto step = mult_expert_step(s);
    EXPECT_EQ(reflective_transition(s, VerifiedStep<MultStep>{step, {}}, MultTransition{}), step.next);
}

TEST(ReflectiveTransition, UnitDigitElimination) {
    const MultState s{12, 34, 0};
    const auto step = mult_elimination_step(s, Side::y, 4);
    const auto next = reflective_transition(s, VerifiedStep<MultStep>{step, Verification::parse("+")}, MultTransition{});
    EXPECT_EQ(next, (MultState{12, 30, 48}));
    EXPECT_EQ(value_of(next), oracle::multiply("12", "34"));
}

TEST(RunNonreflective, ZeroOperandAnswersAtOnce) {
    Rng rng(1);
    const auto rec = run_nonreflective(MultExpertPolicy{}, MultTransition{}, MultQuery{0, 7}, 10, rng);
    ASSERT_EQ(rec.outcome, Outcome::correct);
    EXPECT_EQ(rec.steps_used, 1u);
    EXPECT_EQ(rec.answer->answer, 0u);
}

TEST(RunNonreflective, PerfectSyntheticChainTakesNSteps) {
    const SyntheticSelfVerifyingPolicy p({1.0, 0.0, 0.0, 0.0});
    Rng rng(2);
    const auto rec = run_nonreflective(p, p, SyntheticQuery{3}, 100, rng);
    EXPECT_EQ(rec.outcome, Outcome::correct);
    EXPECT_EQ(rec.events.size(), 3u);
}

TEST(RunNonreflective, ExpertMultiplies) {
    Rng rng(3);
    const auto rec = run_nonreflective(MultExpertPolicy{}, MultTransition{}, MultQuery{12, 34}, 10, rng);
    ASSERT_TRUE(rec.answer);
    EXPECT_EQ(to_string(rec.answer->answer), oracle::multiply("12", "34"));
    EXPECT_EQ(rec.outcome, Outcome::correct);
    for (const auto& e : rec.events) {
        EXPECT_EQ(e.disposition, Disposition::accepted);
        EXPECT_TRUE(e.verified.verification.empty());
    }
}

TEST(RunNonreflective, ConservesProductOnEveryState) {
    Rng qrng(4);
    for (int i = 0; i < 300; ++i) {
        const auto q = gen_mult_query(kAllTiers[i % 3], qrng);
        const auto product = oracle::multiply(to_string(q.x), to_string(q.y));
        Rng rng(static_cast<std::uint64_t>(i));
        const auto rec = run_nonreflective(MultExpertPolicy{}, MultTransition{}, q, 100, rng);
        for (const auto& e : rec.events) ASSERT_EQ(value_of(e.state), product) << render(q);
        ASSERT_EQ(rec.outcome, Outcome::correct);
    }
}

TEST(RunNonreflective, RespectsBudget) {
    Rng rng(5);
    const auto rec = run_nonreflective(MultExpertPolicy{}, MultTransition{}, MultQuery{12, 34}, 2, rng);
    EXPECT_EQ(rec.outcome, Outcome::budget_exhausted);
    EXPECT_EQ(rec.events.size(), 2u);
    EXPECT_EQ(rec.steps_used, rec.events.size());
    EXPECT_FALSE(rec.answer);
}

TEST(RunNonreflective, InputErrors) {
    Rng rng(6);
    EXPECT_THROW(run_nonreflective(MultExpertPolicy{}, MultTransition{}, MultQuery{1, 2}, 0, rng), InputError);
    EXPECT_THROW(run_nonreflective(MultExpertPolicy{}, MultTransition{}, MultQuery{pow10(10), 2}, 10, rng),
                 InputError);
    SudokuBoard bad;
    bad.set(0, 0, 5);
    bad.set(0, 1, 5);
    EXPECT_THROW(run_nonreflective(SudokuExpertPolicy{}, SudokuTransition{}, SudokuQuery{bad}, 10, rng), InputError);
}

TEST(RunNonreflective, SameSeedSameRecord) {
    const MultNoisyPolicy policy(0.3);
    const MultQuery q{98765, 4321};
    Rng a(77), b(77);
    EXPECT_EQ(run_nonreflective(policy, MultTransition{}, q, 50, a),
              run_nonreflective(policy, MultTransition{}, q, 50, b));
}

TEST(Rng, SplitStreamsAreStableAndDistinct) {
    const Rng root(9);
    Rng a = root.split("x").split(3);
    Rng b = root.split("x").split(3);
    Rng c = root.split("x").split(4);
    const auto va = a(), vb = b(), vc = c();
    EXPECT_EQ(va, vb);
    EXPECT_NE(va, vc);
}

TEST(Rng, BelowIsUniform) {
    Rng rng(10);
    std::array<int, 7> hits{};
    const int n = 70000;
    for (int i = 0; i < n; ++i) ++hits[rng.below(7)];
    for (int h : hits) EXPECT_NEAR(h, n / 7, 5 * std::sqrt(n / 7.0));
}
