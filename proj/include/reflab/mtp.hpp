#pragma once

// Markov thought process core: verification labels, verified steps, episode
// records, the policy/verifier/transition contracts, and the non-reflective
// runner S(t+1) = T(S(t), R(t+1)).

#include <concepts>
#include <cstddef>
#include <optional>
#include <string>
#include <string_view>
#include <utility>
#include <vector>

#include "reflab/error.hpp"
#include "reflab/rng.hpp"

namespace reflab {

enum class Label : char { positive = '+', negative = '-' };

inline constexpr Label label_of(bool ok) noexcept { return ok ? Label::positive : Label::negative; }

/// Ordered verification labels. An empty list means verification was omitted;
/// it never means "accepted by a default check".
///
/// Stored as a '+'/'-' string, which is also the JSONL encoding.
class Verification {
public:
    Verification() = default;

    static Verification single(Label l) {
        Verification v;
        v.push_back(l);
        return v;
    }

    static Verification from_verdict(bool positive) {
        return single(label_of(positive));
    }

    /// Parses "++-"; throws InputError on any other character.
    static Verification parse(std::string_view text) {
        Verification v;
        for (char c : text) {
            if (c != '+' && c != '-') throw InputError("verification label must be '+' or '-'");
            v.labels_.push_back(c);
        }
        return v;
    }

    void push_back(Label l) { labels_.push_back(static_cast<char>(l)); }
    void set(std::size_t i, Label l) { labels_.at(i) = static_cast<char>(l); }

    std::size_t size() const noexcept { return labels_.size(); }
    bool empty() const noexcept { return labels_.empty(); }
    Label operator[](std::size_t i) const { return static_cast<Label>(labels_[i]); }

    bool rejects() const noexcept { return labels_.find('-') != std::string::npos; }
    std::size_t negatives() const noexcept {
        std::size_t n = 0;
        for (char c : labels_) n += (c == '-');
        return n;
    }

    const std::string& str() const noexcept { return labels_; }

    friend bool operator==(const Verification&, const Verification&) = default;

private:
    std::string labels_;
};

/// True iff any negative label is present.
inline bool is_rejected(const Verification& v) noexcept { return v.rejects(); }

template <class Step>
struct VerifiedStep {
    Step step;
    Verification verification;

    friend bool operator==(const VerifiedStep&, const VerifiedStep&) = default;
};

enum class Disposition { accepted, rejected, traceback };
enum class Outcome { correct, incorrect, budget_exhausted };

inline std::string_view to_string(Disposition d) {
    switch (d) {
        case Disposition::accepted: return "accepted";
        case Disposition::rejected: return "rejected";
        case Disposition::traceback: return "traceback";
    }
    return "?";
}

inline std::string_view to_string(Outcome o) {
    switch (o) {
        case Outcome::correct: return "correct";
        case Outcome::incorrect: return "incorrect";
        case Outcome::budget_exhausted: return "budget_exhausted";
    }
    return "?";
}

/// A task bundles query/state/step types with the oracle answer checker.
template <class T>
concept TaskTraits = requires(const typename T::query_type& q, const typename T::state_type& s,
                              const typename T::step_type& r) {
    { T::initial_state(q) } -> std::same_as<typename T::state_type>;
    { T::is_answer(r) } -> std::convertible_to<bool>;
    { T::check_answer(q, r) } -> std::convertible_to<bool>;
    T::validate(q);
};

template <class P, class State>
concept PolicyFor = requires(const P& p, const State& s, Rng& rng) {
    p.sample(s, rng);
} || requires(const P& p, const State& s, std::size_t attempt, Rng& rng) {
    p.sample(s, attempt, rng);
};

template <class V, class State, class Step>
concept VerifierFor = requires(const V& v, const State& s, const Step& r, Rng& rng) {
    { v.verify(s, r, rng) } -> std::convertible_to<Verification>;
};

template <class Tr, class State, class Step>
concept TransitionFor = requires(const Tr& t, const State& s, const Step& r) {
    { t.apply(s, r) } -> std::convertible_to<State>;
};

/// Calls the attempt-aware overload when the policy provides one. `attempt`
/// is 1 for the first proposal at a state and grows with each retry there.
template <class P, class State>
auto propose(const P& policy, const State& state, std::size_t attempt, Rng& rng) {
    if constexpr (requires { policy.sample(state, attempt, rng); })
        return policy.sample(state, attempt, rng);
    else
        return policy.sample(state, rng);
}

/// Rejection keeps the state; anything else (including an empty list) applies the step.
template <class State, class Step, class Transition>
State reflective_transition(const State& state, const VerifiedStep<Step>& verified,
                            const Transition& transition) {
    if (is_rejected(verified.verification)) return state;
    return transition.apply(state, verified.step);
}

template <TaskTraits T>
struct Event {
    typename T::state_type state;  // state the step was proposed on (restored state for traceback)
    VerifiedStep<typename T::step_type> verified;
    Disposition disposition = Disposition::accepted;

    friend bool operator==(const Event&, const Event&) = default;
};

template <TaskTraits T>
struct EpisodeRecord {
    using task_type = T;

    typename T::query_type query;
    std::vector<Event<T>> events;
    std::optional<typename T::step_type> answer;
    std::size_t steps_used = 0;
    Outcome outcome = Outcome::budget_exhausted;

    friend bool operator==(const EpisodeRecord&, const EpisodeRecord&) = default;
};

/// Receives the events of one episode. Executors are written against this
/// contract so Monte-Carlo runs can skip state snapshots entirely.
template <class S, class T>
concept EpisodeSink = requires(S& sink, const typename T::state_type& s, const typename T::step_type& r,
                               const Verification& v, Disposition d,
                               std::optional<typename T::step_type> answer, Outcome o) {
    sink.event(s, r, v, d);
    sink.finish(std::move(answer), o);
    { sink.events() } -> std::convertible_to<std::size_t>;
};

/// Full trace; produces an EpisodeRecord.
template <TaskTraits T>
class TraceRecorder {
public:
    explicit TraceRecorder(typename T::query_type query) { record_.query = std::move(query); }

    void event(const typename T::state_type& s, const typename T::step_type& r, const Verification& v,
               Disposition d) {
        record_.events.push_back(Event<T>{s, {r, v}, d});
    }

    void finish(std::optional<typename T::step_type> answer, Outcome o) {
        record_.answer = std::move(answer);
        record_.outcome = o;
        record_.steps_used = record_.events.size();
    }

    std::size_t events() const noexcept { return record_.events.size(); }

    EpisodeRecord<T> take() && { return std::move(record_); }

private:
    EpisodeRecord<T> record_;
};

/// Counts only; no copies of states or steps.
template <TaskTraits T>
class OutcomeRecorder {
public:
    void event(const typename T::state_type&, const typename T::step_type&, const Verification& v,
               Disposition d) {
        ++events_;
        if (d == Disposition::rejected) ++rejections_;
        if (d == Disposition::traceback) ++tracebacks_;
        if (!v.empty()) ++verified_;
    }

    void finish(std::optional<typename T::step_type>, Outcome o) { outcome_ = o; }

    std::size_t events() const noexcept { return events_; }
    std::size_t rejections() const noexcept { return rejections_; }
    std::size_t tracebacks() const noexcept { return tracebacks_; }
    std::size_t verified() const noexcept { return verified_; }
    Outcome outcome() const noexcept { return outcome_; }
    std::size_t proposals() const noexcept { return events_ - tracebacks_; }

private:
    std::size_t events_ = 0;
    std::size_t rejections_ = 0;
    std::size_t tracebacks_ = 0;
    std::size_t verified_ = 0;
    Outcome outcome_ = Outcome::budget_exhausted;
};

namespace detail {

template <TaskTraits T, class Sink>
void finish_with_answer(Sink& sink, const typename T::query_type& query, typename T::step_type answer) {
    const bool ok = T::check_answer(query, answer);
    sink.finish(std::move(answer), ok ? Outcome::correct : Outcome::incorrect);
}

}  // namespace detail

template <TaskTraits T, class Sink, class Policy, class Transition>
    requires EpisodeSink<Sink, T> && PolicyFor<Policy, typename T::state_type> &&
             TransitionFor<Transition, typename T::state_type, typename T::step_type>
void run_nonreflective_into(Sink& sink, const Policy& policy, const Transition& transition,
                            const typename T::query_type& query, std::size_t budget_T, Rng& rng) {
    if (budget_T < 1) throw InputError("budget_T must be >= 1");
    T::validate(query);
    auto state = T::initial_state(query);
    const Verification none;
    while (sink.events() < budget_T) {
        auto step = propose(policy, state, 1, rng);
        sink.event(state, step, none, Disposition::accepted);
        if (T::is_answer(step)) {
            detail::finish_with_answer<T>(sink, query, std::move(step));
            return;
        }
        state = transition.apply(state, step);
    }
    sink.finish(std::nullopt, Outcome::budget_exhausted);
}

/// Runs the plain MTP until an answer step or `budget_T` steps.
template <class Query, class Policy, class Transition>
EpisodeRecord<typename Query::task> run_nonreflective(const Policy& policy, const Transition& transition,
                                                      const Query& query, std::size_t budget_T, Rng& rng) {
    using T = typename Query::task;
    TraceRecorder<T> recorder(query);
    run_nonreflective_into<T>(recorder, policy, transition, query, budget_T, rng);
    return std::move(recorder).take();
}

}  // namespace reflab
