#pragma once

// CoT corpus construction and JSONL serialization of corpora and episode
// records.
//
// Corpus line:
//   {"task":"mult","tier":"id_easy","query":"12*34","style":"binary",
//    "steps":[{"state":"12*34+0","step":{...},"labels":"+"}],"answer":{...}}
// Episode-record line:
//   {"task":...,"tier":...,"query":...,"events":[{"state":...,"step":...,
//    "labels":"+-","disposition":"rejected"}],"answer":{...}|null,
//    "steps_used":7,"outcome":"correct"}

#include <cmath>
#include <cstdint>
#include <functional>
#include <optional>
#include <string>
#include <string_view>
#include <vector>

#include "reflab/corpus/codec.hpp"
#include "reflab/corpus/lines.hpp"
#include "reflab/error.hpp"
#include "reflab/mtp.hpp"
#include "reflab/parallel.hpp"
#include "reflab/reflect.hpp"
#include "reflab/tasks.hpp"

namespace reflab {

enum class CotStyle { none, binary, detailed, optional_detailed };

inline std::string_view to_string(CotStyle s) {
    switch (s) {
        case CotStyle::none: return "none";
        case CotStyle::binary: return "binary";
        case CotStyle::detailed: return "detailed";
        case CotStyle::optional_detailed: return "optional_detailed";
    }
    return "?";
}

inline CotStyle parse_cot_style(std::string_view s) {
    for (CotStyle c : {CotStyle::none, CotStyle::binary, CotStyle::detailed, CotStyle::optional_detailed})
        if (to_string(c) == s) return c;
    throw InputError("unknown style '" + std::string(s) + "' (expected none, binary, detailed or optional_detailed)");
}

template <TaskTraits T>
struct CotStep {
    typename T::state_type state;
    typename T::step_type step;
    Verification verification;

    friend bool operator==(const CotStep&, const CotStep&) = default;
};

/// (Q, {R}, A) with per-step verification labels.
template <TaskTraits T>
struct CotExample {
    Tier tier = Tier::id_easy;
    typename T::query_type query;
    std::vector<CotStep<T>> steps;
    typename T::step_type answer;
    CotStyle style = CotStyle::none;

    friend bool operator==(const CotExample&, const CotExample&) = default;
};

template <class T>
inline constexpr std::size_t default_corpus_count = 0;
template <>
inline constexpr std::size_t default_corpus_count<MultTask> = 32000;
template <>
inline constexpr std::size_t default_corpus_count<SudokuTask> = 36000;

struct CorpusSpec {
    std::size_t count = 0;       // 0: task default
    double easy_fraction = 0.5;  // the rest is ID-Hard; OOD-Hard is never used for training
    CotStyle style = CotStyle::none;
    double proposal_noise = 0.0;
    std::uint64_t seed = 0;
    std::size_t width = 4;       // RTBS attempts per state (Sudoku)
    std::size_t budget = 20000;  // events per generation run
    std::size_t threads = 0;

    void validate() const {
        if (!(easy_fraction >= 0.0 && easy_fraction <= 1.0)) throw InputError("easy fraction must lie in [0, 1]");
        if (!(proposal_noise >= 0.0 && proposal_noise <= 1.0)) throw InputError("proposal noise must lie in [0, 1]");
        if (width < 1 || budget < 1) throw InputError("width and budget must be >= 1");
    }
};

/// Example i is ID-Easy iff floor((i+1)p) > floor(ip); over N examples exactly
/// floor(Np) are easy.
inline Tier corpus_tier(std::size_t i, double easy_fraction) {
    const double a = std::floor(static_cast<double>(i) * easy_fraction);
    const double b = std::floor(static_cast<double>(i + 1) * easy_fraction);
    return b > a ? Tier::id_easy : Tier::id_hard;
}

/// Events that survive on the final root-to-answer chain: accepted events not
/// undone by a later traceback.
template <TaskTraits T>
std::vector<const Event<T>*> accepted_path(const EpisodeRecord<T>& rec) {
    std::vector<const Event<T>*> path;
    for (const auto& e : rec.events) {
        if (e.disposition == Disposition::accepted) path.push_back(&e);
        else if (e.disposition == Disposition::traceback && !path.empty()) path.pop_back();
    }
    return path;
}

namespace detail {

template <TaskTraits T>
EpisodeRecord<T> corpus_run(const typename T::query_type& q, const CorpusSpec& spec, Rng& rng) {
    using Ops = TaskOps<T>;
    ReflectConfig config{spec.budget, spec.budget, spec.width, false};
    const typename Ops::Transition tr;
    if (spec.style == CotStyle::none) {
        if constexpr (std::is_same_v<T, MultTask>)
            return run_nonreflective(typename Ops::Expert{}, tr, q, spec.budget, rng);
        else
            return run_rtbs(typename Ops::Expert{}, OracleVerifier{}, tr, q, config, rng);
    }
    const typename Ops::Noisy policy(spec.proposal_noise);
    const OracleVerifier oracle{spec.style == CotStyle::binary ? VerifyStyle::binary : VerifyStyle::detailed};
    if constexpr (std::is_same_v<T, MultTask>)
        return run_rmtp(policy, oracle, tr, q, config, rng);
    else
        return run_rtbs(policy, oracle, tr, q, config, rng);
}

}  // namespace detail

/// The example(s) for index i: one, or two for optional_detailed (the
/// detailed example followed by its accepted chain without verification).
///
/// Style none follows the expert (for Sudoku, the accepted chain of an
/// oracle-verified trace-back search). Reflective styles sample the noisy
/// policy and label every proposal with the oracle: Mult under RMTP, Sudoku
/// under RTBS. Runs that do not end correctly are redrawn from a fresh stream.
template <TaskTraits T>
std::vector<CotExample<T>> generate_examples(const CorpusSpec& spec, std::size_t i) {
    Rng qrng = Rng(spec.seed).split("corpus-query").split(i);
    const Tier tier = corpus_tier(i, spec.easy_fraction);
    const auto query = TaskOps<T>::gen_query(tier, qrng);
    const Rng base = Rng(spec.seed).split("corpus-run").split(i);
    for (std::uint64_t attempt = 0; attempt < 1000; ++attempt) {
        Rng rng = base.split(attempt);
        const auto rec = detail::corpus_run<T>(query, spec, rng);
        if (rec.outcome != Outcome::correct) continue;
        std::vector<CotExample<T>> out;
        CotExample<T> ex{tier, query, {}, *rec.answer, spec.style};
        if (spec.style == CotStyle::none) {
            for (const auto* e : accepted_path(rec)) ex.steps.push_back({e->state, e->verified.step, {}});
            out.push_back(std::move(ex));
            return out;
        }
        for (const auto& e : rec.events)
            if (e.disposition != Disposition::traceback) ex.steps.push_back({e.state, e.verified.step, e.verified.verification});
        if (spec.style == CotStyle::optional_detailed) {
            CotExample<T> plain{tier, query, {}, *rec.answer, spec.style};
            for (const auto* e : accepted_path(rec)) plain.steps.push_back({e->state, e->verified.step, {}});
            out.push_back(std::move(ex));
            out.push_back(std::move(plain));
        } else {
            out.push_back(std::move(ex));
        }
        return out;
    }
    throw std::runtime_error("no correct CoT for corpus example " + std::to_string(i) + " after 1000 runs");
}

/// Streams the corpus to `sink` in index order. Generation is parallel in
/// chunks; output order and content do not depend on the thread count.
template <TaskTraits T, class Sink>
void generate_corpus(const CorpusSpec& spec, Sink&& sink) {
    spec.validate();
    const std::size_t count = spec.count ? spec.count : default_corpus_count<T>;
    const std::size_t threads = resolve_threads(spec.threads);
    const std::size_t chunk = 256 * threads;
    for (std::size_t lo = 0; lo < count; lo += chunk) {
        const std::size_t n = std::min(chunk, count - lo);
        auto batch = parallel_generate<std::vector<CotExample<T>>>(
            n, threads, [&](std::size_t k) { return generate_examples<T>(spec, lo + k); });
        for (auto& group : batch)
            for (auto& ex : group) sink(std::move(ex));
    }
}

template <TaskTraits T>
std::vector<CotExample<T>> generate_corpus(const CorpusSpec& spec) {
    std::vector<CotExample<T>> out;
    generate_corpus<T>(spec, [&](CotExample<T>&& ex) { out.push_back(std::move(ex)); });
    return out;
}

// --- JSONL ---------------------------------------------------------------------

template <TaskTraits T>
json to_json(const CotExample<T>& ex) {
    using C = Codec<T>;
    json steps = json::array();
    for (const auto& s : ex.steps)
        steps.push_back({{"state", C::state(s.state)}, {"step", C::step(s.step)}, {"labels", s.verification.str()}});
    return {{"task", TaskOps<T>::name},   {"tier", to_string(ex.tier)}, {"query", C::query(ex.query)},
            {"style", to_string(ex.style)}, {"steps", std::move(steps)},  {"answer", C::step(ex.answer)}};
}

namespace detail {

inline void expect_task(const json& j, std::string_view name) {
    const auto task = require(j, "task").get<std::string>();
    if (task != name) throw InputError("task is '" + task + "', expected '" + std::string(name) + "'");
}

/// Parses one line with `decode`, turning any failure into a ParseError that
/// names the line.
template <class F>
auto decode_line(const std::string& line, std::size_t line_no, F&& decode) {
    try {
        return decode(json::parse(line));
    } catch (const json::exception& e) {
        throw ParseError(line_no, e.what());
    } catch (const InputError& e) {
        throw ParseError(line_no, e.what());
    }
}

}  // namespace detail

template <TaskTraits T>
CotExample<T> cot_example_from_json(const json& j) {
    using C = Codec<T>;
    detail::expect_task(j, TaskOps<T>::name);
    CotExample<T> ex;
    ex.tier = parse_tier(detail::require(j, "tier").get<std::string>());
    ex.query = C::parse_query(detail::require(j, "query"));
    ex.style = parse_cot_style(detail::require(j, "style").get<std::string>());
    for (const auto& s : detail::require(j, "steps"))
        ex.steps.push_back({C::parse_state(detail::require(s, "state")), C::parse_step(detail::require(s, "step")),
                            Verification::parse(detail::require(s, "labels").get<std::string>())});
    ex.answer = C::parse_step(detail::require(j, "answer"));
    return ex;
}

template <TaskTraits T>
json to_json(const EpisodeRecord<T>& rec) {
    using C = Codec<T>;
    json events = json::array();
    for (const auto& e : rec.events)
        events.push_back({{"state", C::state(e.state)},
                          {"step", C::step(e.verified.step)},
                          {"labels", e.verified.verification.str()},
                          {"disposition", to_string(e.disposition)}});
    return {{"task", TaskOps<T>::name},
            {"tier", to_string(TaskOps<T>::tier_of(rec.query))},
            {"query", C::query(rec.query)},
            {"events", std::move(events)},
            {"answer", rec.answer ? C::step(*rec.answer) : json(nullptr)},
            {"steps_used", rec.steps_used},
            {"outcome", to_string(rec.outcome)}};
}

inline Disposition parse_disposition(std::string_view s) {
    for (Disposition d : {Disposition::accepted, Disposition::rejected, Disposition::traceback})
        if (to_string(d) == s) return d;
    throw InputError("unknown disposition '" + std::string(s) + "'");
}

inline Outcome parse_outcome(std::string_view s) {
    for (Outcome o : {Outcome::correct, Outcome::incorrect, Outcome::budget_exhausted})
        if (to_string(o) == s) return o;
    throw InputError("unknown outcome '" + std::string(s) + "'");
}

template <TaskTraits T>
EpisodeRecord<T> episode_record_from_json(const json& j) {
    using C = Codec<T>;
    detail::expect_task(j, TaskOps<T>::name);
    EpisodeRecord<T> rec;
    rec.query = C::parse_query(detail::require(j, "query"));
    for (const auto& e : detail::require(j, "events"))
        rec.events.push_back(Event<T>{C::parse_state(detail::require(e, "state")),
                                      {C::parse_step(detail::require(e, "step")),
                                       Verification::parse(detail::require(e, "labels").get<std::string>())},
                                      parse_disposition(detail::require(e, "disposition").get<std::string>())});
    if (const auto& a = detail::require(j, "answer"); !a.is_null()) rec.answer = C::parse_step(a);
    rec.steps_used = detail::require(j, "steps_used").get<std::size_t>();
    rec.outcome = parse_outcome(detail::require(j, "outcome").get<std::string>());
    return rec;
}

/// Writes one compact JSON object per line.
template <class Range>
void write_jsonl(const std::string& path, const Range& items) {
    LineWriter w(path);
    for (const auto& item : items) w.write(to_json(item).dump());
    w.close();
}

/// Reads every non-blank line with `decode(json)`; errors name the line.
template <class Item, class Decode>
std::vector<Item> read_jsonl(const std::string& path, Decode decode) {
    LineReader r(path);
    std::vector<Item> out;
    while (auto line = r.next()) {
        if (line->find_first_not_of(" \t") == std::string::npos) continue;
        out.push_back(detail::decode_line(*line, r.line_number(), decode));
    }
    return out;
}

template <TaskTraits T>
std::vector<CotExample<T>> read_corpus_jsonl(const std::string& path) {
    return read_jsonl<CotExample<T>>(path, [](const json& j) { return cot_example_from_json<T>(j); });
}

template <TaskTraits T>
std::vector<EpisodeRecord<T>> read_records_jsonl(const std::string& path) {
    return read_jsonl<EpisodeRecord<T>>(path, [](const json& j) { return episode_record_from_json<T>(j); });
}

/// The "task" field of the first non-blank line; nullopt for an empty file.
inline std::optional<TaskKind> peek_task(const std::string& path) {
    LineReader r(path);
    while (auto line = r.next()) {
        if (line->find_first_not_of(" \t") == std::string::npos) continue;
        return detail::decode_line(*line, r.line_number(), [](const json& j) {
            return parse_task_kind(detail::require(j, "task").get<std::string>());
        });
    }
    return std::nullopt;
}

}  // namespace reflab
