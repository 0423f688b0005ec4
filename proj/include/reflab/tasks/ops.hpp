#pragma once

// Per-task bindings used by task-generic code (corpus, CLI, metrics).

#include <string_view>

#include "reflab/tasks/mult.hpp"
#include "reflab/tasks/sudoku.hpp"
#include "reflab/tasks/tier.hpp"

namespace reflab {

template <class T>
struct TaskOps;

template <>
struct TaskOps<MultTask> {
    static constexpr std::string_view name = "mult";
    using Expert = MultExpertPolicy;
    using Noisy = MultNoisyPolicy;
    using Transition = MultTransition;

    static MultQuery gen_query(Tier t, Rng& rng) { return gen_mult_query(t, rng); }
    static Tier tier_of(const MultQuery& q) { return mult_tier_of(q); }
};

template <>
struct TaskOps<SudokuTask> {
    static constexpr std::string_view name = "sudoku";
    using Expert = SudokuExpertPolicy;
    using Noisy = SudokuNoisyPolicy;
    using Transition = SudokuTransition;

    static SudokuQuery gen_query(Tier t, Rng& rng) { return gen_sudoku_query(t, rng); }
    static Tier tier_of(const SudokuQuery& q) { return sudoku_tier_of(q); }
};

enum class TaskKind { mult, sudoku };

inline TaskKind parse_task_kind(std::string_view s) {
    if (s == "mult") return TaskKind::mult;
    if (s == "sudoku") return TaskKind::sudoku;
    throw InputError("unknown task '" + std::string(s) + "' (expected mult or sudoku)");
}

/// Calls f(TaskOps-tag) with a value of the task type for the given kind.
template <class F>
decltype(auto) with_task(TaskKind kind, F&& f) {
    if (kind == TaskKind::mult) return f(MultTask{});
    return f(SudokuTask{});
}

}  // namespace reflab
