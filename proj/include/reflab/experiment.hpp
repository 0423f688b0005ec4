#pragma once

// Batches of task episodes under a chosen executor, with a noisy policy and a
// noisy verifier. Query i and its run use streams derived from (seed, i), so
// different modes see the same queries.

#include <cstdint>
#include <optional>
#include <vector>

#include "reflab/mtp.hpp"
#include "reflab/parallel.hpp"
#include "reflab/reflect.hpp"
#include "reflab/sim.hpp"
#include "reflab/tasks.hpp"

namespace reflab {

struct TaskRunSpec {
    Tier tier = Tier::id_hard;
    std::size_t queries = 2000;
    double policy_error = 0.0;
    std::optional<double> revision_error;  // defaults to policy_error
    VerifyStyle style = VerifyStyle::binary;
    double e_minus = 0.0;
    double e_plus = 0.0;
    sim::ModeSpec mode = sim::ModeSpec::rmtp();
    std::optional<ReflectConfig> config;  // defaults to default_task_config<T>()
    std::uint64_t seed = 0;
    std::size_t threads = 0;
};

/// Mult CoTs are short; Sudoku trace-back search needs room for dead ends.
template <class T>
ReflectConfig default_task_config() {
    if constexpr (std::is_same_v<T, SudokuTask>)
        return {2000, 4000, 4, false};
    else
        return {64, 96, 4, false};
}

template <TaskTraits T>
EpisodeRecord<T> run_task_episode(const TaskRunSpec& spec, std::size_t i) {
    using Ops = TaskOps<T>;
    Rng qrng = Rng(spec.seed).split("task-query").split(i);
    const auto query = Ops::gen_query(spec.tier, qrng);
    Rng rng = Rng(spec.seed).split("task-run").split(static_cast<std::uint64_t>(spec.mode.mode)).split(i);
    const typename Ops::Noisy policy(spec.policy_error, spec.revision_error);
    const NoisyVerifier verifier(spec.style, spec.e_minus, spec.e_plus);
    const typename Ops::Transition tr;
    ReflectConfig config = spec.config.value_or(default_task_config<T>());
    if (spec.mode.mode == sim::Mode::rtbs) config.width = spec.mode.width;
    switch (spec.mode.mode) {
        case sim::Mode::none: return run_nonreflective(policy, tr, query, config.total_budget, rng);
        case sim::Mode::rmtp: return run_rmtp(policy, verifier, tr, query, config, rng);
        case sim::Mode::rtbs: return run_rtbs(policy, verifier, tr, query, config, rng);
    }
    throw InputError("unknown mode");
}

template <TaskTraits T>
std::vector<EpisodeRecord<T>> run_task(const TaskRunSpec& spec) {
    if (spec.queries < 1) throw InputError("need at least one query");
    if (spec.mode.mode == sim::Mode::rtbs && spec.mode.width < 1) throw InputError("rtbs mode needs width >= 1");
    return parallel_generate<EpisodeRecord<T>>(spec.queries, spec.threads,
                                               [&](std::size_t i) { return run_task_episode<T>(spec, i); });
}

}  // namespace reflab
