#include <gtest/gtest.h>

#include <bit>

#include "oracles.hpp"
#include "reflab/reflab.hpp"

using namespace reflab;

namespace {

oracle::Grid grid(const SudokuBoard& b) { return oracle::grid_from(render(b)); }

/// Ground truth for a Sudoku step: only blank cells change, to digits 1..9,
/// and the result breaks no rule.
bool truly_correct(const SudokuBoard& before, const SudokuStep& r) {
    const auto a = grid(before), b = grid(r.next);
    for (int i = 0; i < 81; ++i) {
        const int old = a[i / 9][i % 9], now = b[i / 9][i % 9];
        if (old != 0 && old != now) return false;
    }
    for (const auto& f : r.fills)
        if (f.value < 1 || f.value > 9 || a[f.row][f.col] != 0 || b[f.row][f.col] != f.value) return false;
    return oracle::no_conflicts(b);
}

/// A consistent, non-terminal board taken from an expert solve path.
SudokuBoard path_board(Rng& rng) {
    for (;;) {
        const auto p = gen_sudoku_puzzle(kAllTiers[rng.below(3)], rng);
        SudokuBoard b = p.query.givens;
        const auto steps = rng.below(4);
        for (std::uint64_t i = 0; i < steps && !b.complete(); ++i) {
            // Stay on the known solution so the board keeps a completion.
            const auto step = SudokuExpertPolicy{}.sample(b, rng);
            bool agrees = true;
            for (const auto& f : step.fills) agrees = agrees && p.solution.at(f.row, f.col) == f.value;
            if (!agrees) break;
            b = step.next;
        }
        if (!b.complete()) return b;
    }
}

SudokuBoard row_of_eight() {
    SudokuBoard b;
    for (int c = 0; c < 8; ++c) b.set(0, c, c + 1);
    return b;
}

}  // namespace

TEST(SudokuExpert, PigeonholeForcedFill) {
    Rng rng(1);
    const auto r = sudoku_expert_step(row_of_eight(), rng);
    ASSERT_EQ(r.fills.size(), 1u);
    EXPECT_EQ(r.fills[0], (SudokuFill{0, 8, 9}));
    EXPECT_FALSE(r.guess);
    EXPECT_TRUE(truly_correct(row_of_eight(), r));
}

TEST(SudokuExpert, GuessWhenNothingForced) {
    Rng rng(2);
    const SudokuBoard empty;
    const auto r = sudoku_expert_step(empty, rng);
    ASSERT_EQ(r.fills.size(), 1u);
    EXPECT_TRUE(r.guess);
    EXPECT_EQ(r.next.blanks(), 80);
    EXPECT_TRUE(truly_correct(empty, r));
}

TEST(SudokuExpert, GuessPicksFewestCandidates) {
    Rng rng(3);
    for (int i = 0; i < 200; ++i) {
        const auto b = path_board(rng);
        const auto r = sudoku_expert_step(b, rng);
        if (!r.guess) continue;
        ASSERT_EQ(r.fills.size(), 1u);
        int fewest = 10;
        for (int c = 0; c < 81; ++c)
            if (b.cells[static_cast<std::size_t>(c)] == 0) fewest = std::min(fewest, std::popcount(sudoku_candidates(b, c)));
        EXPECT_GE(fewest, 2);
        EXPECT_EQ(std::popcount(sudoku_candidates(b, r.fills[0].index())), fewest);
    }
}

TEST(SudokuExpert, DeadEndAndCompleteThrow) {
    auto b = row_of_eight();
    b.set(1, 8, 9);
    ASSERT_TRUE(b.consistent());
    Rng rng(4);
    EXPECT_THROW(sudoku_expert_step(b, rng), DeadEndError);
    Rng g(5);
    const auto p = gen_sudoku_puzzle(Tier::id_easy, g);
    EXPECT_THROW(sudoku_expert_step(p.solution, rng), InputError);
}

TEST(SudokuExpert, DeadEndPolicyStepIsRejected) {
    auto b = row_of_eight();
    b.set(1, 8, 9);
    Rng rng(6);
    const auto r = SudokuExpertPolicy{}.sample(b, rng);
    EXPECT_TRUE(sudoku_verify_binary(b, r).rejects());
    EXPECT_FALSE(truly_correct(b, r));
}

TEST(SudokuExpert, ForcedFillsAreSound) {
    Rng rng(7);
    for (int i = 0; i < 300; ++i) {
        const auto b = path_board(rng);
        const auto r = sudoku_expert_step(b, rng);
        ASSERT_TRUE(truly_correct(b, r));
        ASSERT_FALSE(sudoku_verify_binary(b, r).rejects());
        for (std::size_t k = 1; k < r.fills.size(); ++k) ASSERT_LT(r.fills[k - 1].index(), r.fills[k].index());
    }
}

TEST(SudokuApply, MismatchThrows) {
    const auto b = row_of_eight();
    Rng rng(8);
    auto r = sudoku_expert_step(b, rng);
    EXPECT_EQ(sudoku_apply(b, r), r.next);
    r.next.set(5, 5, 1);
    EXPECT_THROW(sudoku_apply(b, r), TransitionError);
    auto bad = sudoku_step_from_fills(b, {{0, 8, 9}});
    bad.fills[0].row = 9;
    EXPECT_THROW(sudoku_apply(b, bad), TransitionError);
}

TEST(SudokuVerify, BlockDuplicateIsNegative) {
    SudokuBoard b;
    b.set(0, 0, 5);
    const auto r = sudoku_step_from_fills(b, {{1, 1, 5}});
    EXPECT_EQ(sudoku_verify_binary(b, r).str(), "-");
    EXPECT_EQ(sudoku_verify_detailed(b, r).str(), "-");
    EXPECT_FALSE(truly_correct(b, r));
}

TEST(SudokuVerify, OnlyConflictingFillIsNegative) {
    SudokuBoard b;
    b.set(0, 0, 5);
    const auto r = sudoku_step_from_fills(b, {{2, 2, 5}, {0, 5, 3}});
    EXPECT_EQ(sudoku_verify_detailed(b, r).str(), "+-");
    EXPECT_EQ(sudoku_verify_binary(b, r).str(), "-");
}

TEST(SudokuVerify, LaterOfTwoClashingFillsIsBlamed) {
    const SudokuBoard b;
    const auto r = sudoku_step_from_fills(b, {{0, 2, 7}, {0, 1, 7}});
    EXPECT_EQ(sudoku_verify_detailed(b, r).str(), "+-");
}

TEST(SudokuVerify, OverwritingAGivenIsNegative) {
    const auto b = row_of_eight();
    const auto r = sudoku_step_from_fills(b, {{0, 0, 9}});
    EXPECT_EQ(sudoku_verify_detailed(b, r).str(), "-");
    EXPECT_FALSE(truly_correct(b, r));
}

TEST(SudokuVerify, BinaryMatchesOracleOnNoisySteps) {
    Rng rng(9);
    const SudokuNoisyPolicy policy(0.5);
    for (int i = 0; i < 1500; ++i) {
        const auto b = path_board(rng);
        const auto r = policy.sample(b, 1, rng);
        const bool ok = truly_correct(b, r);
        ASSERT_EQ(!sudoku_verify_binary(b, r).rejects(), ok);
        ASSERT_EQ(!sudoku_verify_detailed(b, r).rejects(), ok);
    }
}

TEST(SudokuCorruption, LocalizedAndRejected) {
    Rng rng(10);
    for (int i = 0; i < 3000; ++i) {
        const auto b = path_board(rng);
        const auto r = sudoku_expert_step(b, rng);
        const auto c = corrupt_sudoku_step(b, r, rng);
        const auto bin = sudoku_verify_binary(b, c.step);
        const auto det = sudoku_verify_detailed(b, c.step);
        ASSERT_FALSE(truly_correct(b, c.step));
        ASSERT_TRUE(bin.rejects());
        ASSERT_TRUE(det.rejects());
        ASSERT_EQ(det[c.label], Label::negative);
        if (c.step.fills.size() == r.fills.size()) ASSERT_EQ(det.negatives(), 1u);
    }
}

TEST(SudokuNoisyPolicy, ZeroErrorIsExpert) {
    Rng rng(11);
    for (int i = 0; i < 200; ++i) {
        const auto b = path_board(rng);
        Rng a(static_cast<std::uint64_t>(i)), e(static_cast<std::uint64_t>(i));
        EXPECT_EQ(SudokuNoisyPolicy(0.0).sample(b, 1, a), SudokuExpertPolicy{}.sample(b, e));
    }
}

TEST(SudokuNoisyPolicy, FullErrorAlwaysRejected) {
    Rng rng(12);
    const SudokuNoisyPolicy policy(1.0);
    for (int i = 0; i < 500; ++i) {
        const auto b = path_board(rng);
        EXPECT_TRUE(sudoku_verify_binary(b, policy.sample(b, 1, rng)).rejects());
    }
}

TEST(SudokuGen, ValidityAndTiers) {
    Rng rng(13);
    for (Tier t : kAllTiers) {
        const auto range = sudoku_blank_range(t);
        for (int i = 0; i < 300; ++i) {
            const auto p = gen_sudoku_puzzle(t, rng);
            ASSERT_TRUE(oracle::valid_solution(grid(p.query.givens), grid(p.solution)));
            ASSERT_TRUE(range.contains(p.query.givens.blanks()));
            ASSERT_EQ(sudoku_tier_of(p.query), t);
            ASSERT_TRUE(SudokuTask::check_answer(p.query, {{}, p.solution, false}));
        }
    }
    Rng a(14), b(14);
    EXPECT_EQ(gen_sudoku_query(Tier::ood_hard, a), gen_sudoku_query(Tier::ood_hard, b));
}

TEST(SudokuRender, RoundTrip) {
    Rng rng(15);
    const auto q = gen_sudoku_query(Tier::id_hard, rng);
    const auto text = render(q.givens);
    EXPECT_EQ(text.size(), 89u);
    EXPECT_EQ(parse_sudoku_board(text), q.givens);
    EXPECT_THROW(parse_sudoku_board("123"), InputError);
    EXPECT_THROW(parse_sudoku_board(std::string(81, 'x')), InputError);
}

TEST(SudokuAnswer, OracleCheck) {
    Rng rng(16);
    const auto p = gen_sudoku_puzzle(Tier::id_easy, rng);
    EXPECT_TRUE(SudokuTask::check_answer(p.query, {{}, p.solution, false}));
    auto wrong = p.solution;
    std::swap(wrong.cells[0], wrong.cells[1]);
    EXPECT_FALSE(SudokuTask::check_answer(p.query, {{}, wrong, false}));
    EXPECT_FALSE(oracle::no_conflicts(grid(wrong)));
}

TEST(SudokuRtbs, ExpertSolvesIdEasyPuzzles) {
    Rng qrng(17);
    const auto config = default_task_config<SudokuTask>();
    for (int i = 0; i < 500; ++i) {
        const auto q = gen_sudoku_query(Tier::id_easy, qrng);
        auto solvable = grid(q.givens);
        ASSERT_TRUE(oracle::solve(solvable));
        Rng rng(static_cast<std::uint64_t>(i));
        const auto rec = run_rtbs(SudokuExpertPolicy{}, OracleVerifier{}, SudokuTransition{}, q, config, rng);
        ASSERT_TRUE(rec.answer) << render(q);
        ASSERT_EQ(rec.outcome, Outcome::correct);
        ASSERT_TRUE(oracle::valid_solution(grid(q.givens), grid(rec.answer->next)));
    }
}
