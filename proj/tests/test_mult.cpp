#include <gtest/gtest.h>

#include "oracles.hpp"
#include "reflab/reflab.hpp"

using namespace reflab;

namespace {

std::string value_of(const MultState& s) { return oracle::expression_value(render(s)); }

/// Ground truth for a Mult step, from decimal strings.
bool truly_correct(const MultState& s, const MultStep& r) {
    if (r.is_answer) return to_string(r.answer) == value_of(s);
    return value_of(r.next) == value_of(s);
}

MultState random_state(Rng& rng) {
    for (;;) {
        const auto q = gen_mult_query(kAllTiers[rng.below(3)], rng);
        MultState s = MultTask::initial_state(q);
        const auto steps = rng.below(3);
        for (std::uint64_t i = 0; i < steps && !s.terminal(); ++i) s = mult_apply(s, mult_expert_step(s));
        if (!s.terminal()) return s;
    }
}

}  // namespace

TEST(MultExpert, FirstStep) {
    const auto r = mult_expert_step({12, 34, 0});
    EXPECT_EQ(r.digit, 3);
    EXPECT_EQ(r.side, Side::y);
    EXPECT_EQ(r.delta, 36u);
    EXPECT_EQ(r.positions, std::vector<int>{1});
    EXPECT_EQ(r.next, (MultState{12, 4, 360}));
    EXPECT_EQ(value_of(r.next), oracle::multiply("12", "34"));
}

TEST(MultExpert, SecondStepThenAnswer) {
    const auto r = mult_expert_step({12, 4, 360});
    EXPECT_EQ(r.digit, 4);
    EXPECT_EQ(r.delta, 48u);
    EXPECT_EQ(r.next, (MultState{12, 0, 408}));
    Rng rng(1);
    const auto a = MultExpertPolicy{}.sample(r.next, rng);
    ASSERT_TRUE(a.is_answer);
    EXPECT_EQ(to_string(a.answer), oracle::multiply("12", "34"));
}

TEST(MultExpert, TerminalThrows) { EXPECT_THROW(mult_expert_step({7, 0, 42}), InputError); }

TEST(MultExpert, RepeatedDigitsEliminatedTogether) {
    const auto r = mult_expert_step({25, 1213, 0});
    EXPECT_EQ(r.digit, 1);
    EXPECT_EQ(r.positions, (std::vector<int>{1, 3}));
    EXPECT_EQ(r.next.y, 203u);
    EXPECT_EQ(value_of(r.next), oracle::multiply("25", "1213"));
}

TEST(MultApply, AppliesCorruptedStepAsWritten) {
    const MultState s{12, 34, 0};
    auto r = mult_expert_step(s);
    r.next.z += 5;
    EXPECT_EQ(mult_apply(s, r), r.next);
    EXPECT_NE(value_of(mult_apply(s, r)), value_of(s));
}

TEST(MultApply, StructuralMismatchThrows) {
    const MultState s{12, 34, 0};
    auto r = mult_expert_step(s);
    r.contributions.push_back(1);
    EXPECT_THROW(mult_apply(s, r), TransitionError);
    EXPECT_THROW(mult_apply(s, mult_answer_step({12, 0, 408})), TransitionError);
    auto d = mult_expert_step(s);
    d.digit = 0;
    EXPECT_THROW(mult_apply(s, d), TransitionError);
}

TEST(MultVerify, BinaryExamples) {
    const MultState s{12, 34, 0};
    auto r = mult_expert_step(s);
    EXPECT_EQ(mult_verify_binary(s, r).str(), "+");
    r.delta += 1;
    for (std::size_t k = 0; k < r.positions.size(); ++k) r.contributions[k] = r.delta * pow10(r.positions[k]);
    mult_resum(s, r);
    EXPECT_EQ(mult_verify_binary(s, r).str(), "-");
    EXPECT_EQ(mult_verify_binary({12, 0, 408}, mult_answer_step({12, 0, 408})).str(), "+");
    EXPECT_EQ(mult_verify_binary({12, 0, 408}, mult_answer_step({12, 0, 407})).str(), "-");
}

TEST(MultVerify, DetailedExpertAllPositive) {
    Rng rng(2);
    for (int i = 0; i < 500; ++i) {
        const auto s = random_state(rng);
        const auto r = mult_expert_step(s);
        const auto v = mult_verify_detailed(s, r);
        EXPECT_EQ(v.size(), mult_labels::count(r.positions.size()));
        EXPECT_EQ(v.negatives(), 0u);
    }
}

TEST(MultVerify, DetailedFlagsWrongContribution) {
    const MultState s{25, 1213, 0};
    Rng rng(3);
    for (std::size_t k = 0; k < 2; ++k) {
        auto r = mult_expert_step(s);
        corrupt_mult_contribution(s, r, k, rng);
        const auto v = mult_verify_detailed(s, r);
        EXPECT_EQ(v.negatives(), 1u);
        EXPECT_EQ(v[mult_labels::contribution(k)], Label::negative);
        EXPECT_NE(value_of(r.next), oracle::multiply("25", "1213"));
    }
}

TEST(MultCorruption, LocalizedAndAgreesWithOracle) {
    Rng rng(4);
    for (int i = 0; i < 5000; ++i) {
        const auto s = random_state(rng);
        const auto r = rng.bernoulli(0.1) ? mult_answer_step({s.x, 0, s.value()}) : mult_expert_step(s);
        const MultState at = r.is_answer ? MultState{s.x, 0, s.value()} : s;
        const auto c = corrupt_mult_step(at, r, rng);
        const auto bin = mult_verify_binary(at, c.step);
        const auto det = mult_verify_detailed(at, c.step);
        ASSERT_FALSE(truly_correct(at, c.step));
        ASSERT_TRUE(bin.rejects());
        ASSERT_EQ(det.rejects(), bin.rejects());
        ASSERT_EQ(det.negatives(), 1u);
        ASSERT_EQ(det[c.label], Label::negative);
    }
}

TEST(MultVerify, BinaryMatchesIdentityOracle) {
    Rng rng(5);
    const MultNoisyPolicy policy(0.5);
    for (int i = 0; i < 3000; ++i) {
        const auto s = random_state(rng);
        const auto r = policy.sample(s, 1, rng);
        const bool ok = truly_correct(s, r);
        EXPECT_EQ(!mult_verify_binary(s, r).rejects(), ok);
        EXPECT_EQ(!mult_verify_detailed(s, r).rejects(), ok);
    }
}

TEST(MultNoisyPolicy, ZeroErrorIsExpert) {
    Rng rng(6);
    for (int i = 0; i < 200; ++i) {
        const auto s = random_state(rng);
        Rng a(static_cast<std::uint64_t>(i)), b(static_cast<std::uint64_t>(i));
        EXPECT_EQ(MultNoisyPolicy(0.0).sample(s, 1, a), MultExpertPolicy{}.sample(s, b));
    }
}

TEST(MultNoisyPolicy, FullErrorAlwaysRejected) {
    Rng rng(7);
    const MultNoisyPolicy policy(1.0);
    for (int i = 0; i < 1000; ++i) {
        const auto s = random_state(rng);
        EXPECT_TRUE(mult_verify_binary(s, policy.sample(s, 1, rng)).rejects());
        const MultState done{s.x, 0, s.value()};
        EXPECT_TRUE(mult_verify_binary(done, policy.sample(done, 1, rng)).rejects());
    }
}

TEST(MultNoisyPolicy, RevisionErrorFromSecondAttempt) {
    const MultNoisyPolicy policy(0.0, 1.0);
    Rng rng(8);
    const MultState s{987, 654, 0};
    EXPECT_FALSE(mult_verify_binary(s, policy.sample(s, 1, rng)).rejects());
    EXPECT_TRUE(mult_verify_binary(s, policy.sample(s, 2, rng)).rejects());
    EXPECT_THROW(MultNoisyPolicy(1.5), InputError);
}

TEST(MultAnswer, OracleCheck) {
    EXPECT_TRUE(MultTask::check_answer({12, 34}, mult_answer_step({12, 0, 408})));
    EXPECT_FALSE(MultTask::check_answer({12, 34}, mult_answer_step({12, 0, 407})));
    EXPECT_EQ(oracle::multiply("12", "34"), "408");
}

TEST(MultGen, TierDiscipline) {
    Rng rng(9);
    for (Tier t : kAllTiers) {
        const auto range = mult_digit_range(t);
        for (int i = 0; i < 3000; ++i) {
            const auto q = gen_mult_query(t, rng);
            const int dx = digit_count(q.x), dy = digit_count(q.y);
            ASSERT_TRUE(range.contains(std::max(dx, dy)));
            ASSERT_GE(std::min(dx, dy), 1);
            ASSERT_EQ(mult_tier_of(q), t);
        }
    }
    Rng a(10), b(10);
    EXPECT_EQ(gen_mult_query(Tier::id_hard, a), gen_mult_query(Tier::id_hard, b));
}

TEST(MultRender, RoundTrip) {
    Rng rng(11);
    for (int i = 0; i < 500; ++i) {
        const auto s = random_state(rng);
        EXPECT_EQ(parse_mult_state(render(s)), s);
        const auto q = gen_mult_query(Tier::ood_hard, rng);
        EXPECT_EQ(parse_mult_query(render(q)), q);
    }
    EXPECT_EQ(render(MultState{12, 34, 0}), "12*34+0");
    EXPECT_THROW(parse_mult_state("12*34"), InputError);
    EXPECT_THROW(parse_mult_query("12x34"), InputError);
}

TEST(MultSoundness, ExpertSolvesEveryTier) {
    Rng qrng(12);
    for (Tier t : kAllTiers) {
        for (int i = 0; i < 1000; ++i) {
            const auto q = gen_mult_query(t, qrng);
            Rng rng(static_cast<std::uint64_t>(i));
            const auto rec = run_nonreflective(MultExpertPolicy{}, MultTransition{}, q, 100, rng);
            ASSERT_TRUE(rec.answer);
            ASSERT_EQ(to_string(rec.answer->answer), oracle::multiply(to_string(q.x), to_string(q.y))) << render(q);
            ASSERT_EQ(rec.outcome, Outcome::correct);
        }
    }
}

TEST(MultValidate, TooManyDigits) {
    EXPECT_THROW(MultTask::validate({pow10(10), 3}), InputError);
    EXPECT_NO_THROW(MultTask::validate({pow10(10) - 1, pow10(10) - 1}));
}
