#pragma once

// Reflective execution: RMTP (verify, reject, resample) and reflective
// trace-back search (depth-first with at most m attempts per non-root state).

#include <cstddef>
#include <optional>
#include <vector>

#include "reflab/mtp.hpp"

namespace reflab {

struct ReflectConfig {
    std::size_t reflective_budget = 64;  // M: verified proposals before reverting to non-reflective
    std::size_t total_budget = 96;       // cap on recorded events
    std::size_t width = 4;               // m, RTBS only
    bool root_width_limited = false;     // true: the query state also gets only m attempts

    void validate() const {
        if (reflective_budget < 1 || total_budget < 1 || width < 1)
            throw InputError("reflective budget, total budget and width must all be >= 1");
    }
};

/// Parent states of the current RTBS frontier with the attempt count each had
/// used when its child was accepted.
template <TaskTraits T>
class TraceStack {
public:
    struct Entry {
        typename T::state_type parent;
        std::size_t attempt = 0;
        typename T::step_type step;  // the accepted step that left `parent`
    };

    void push(Entry e) { entries_.push_back(std::move(e)); }
    Entry pop() {
        Entry e = std::move(entries_.back());
        entries_.pop_back();
        return e;
    }
    bool empty() const noexcept { return entries_.empty(); }
    std::size_t depth() const noexcept { return entries_.size(); }
    const std::vector<Entry>& entries() const noexcept { return entries_; }

private:
    std::vector<Entry> entries_;
};

namespace detail {

template <TaskTraits T, class Verifier>
Verification maybe_verify(const Verifier& verifier, const typename T::state_type& state,
                          const typename T::step_type& step, std::size_t& verified, std::size_t budget, Rng& rng) {
    if (verified >= budget) return {};
    ++verified;
    return verifier.verify(state, step, rng);
}

}  // namespace detail

template <TaskTraits T, class Sink, class Policy, class Verifier, class Transition>
    requires EpisodeSink<Sink, T> && PolicyFor<Policy, typename T::state_type> &&
             VerifierFor<Verifier, typename T::state_type, typename T::step_type> &&
             TransitionFor<Transition, typename T::state_type, typename T::step_type>
void run_rmtp_into(Sink& sink, const Policy& policy, const Verifier& verifier, const Transition& transition,
                   const typename T::query_type& query, const ReflectConfig& config, Rng& rng) {
    config.validate();
    T::validate(query);
    auto state = T::initial_state(query);
    std::size_t attempt = 0;
    std::size_t verified = 0;
    while (sink.events() < config.total_budget) {
        ++attempt;
        VerifiedStep<typename T::step_type> vs{propose(policy, state, attempt, rng), {}};
        vs.verification = detail::maybe_verify<T>(verifier, state, vs.step, verified, config.reflective_budget, rng);
        if (is_rejected(vs.verification)) {
            sink.event(state, vs.step, vs.verification, Disposition::rejected);
            continue;
        }
        sink.event(state, vs.step, vs.verification, Disposition::accepted);
        if (T::is_answer(vs.step)) {
            detail::finish_with_answer<T>(sink, query, std::move(vs.step));
            return;
        }
        state = reflective_transition(state, vs, transition);
        attempt = 0;
    }
    sink.finish(std::nullopt, Outcome::budget_exhausted);
}

/// Reflective MTP. Rejected proposals leave the state unchanged and are
/// resampled; after `reflective_budget` verified proposals the run continues
/// without verification.
template <class Query, class Policy, class Verifier, class Transition>
EpisodeRecord<typename Query::task> run_rmtp(const Policy& policy, const Verifier& verifier,
                                             const Transition& transition, const Query& query,
                                             const ReflectConfig& config, Rng& rng) {
    using T = typename Query::task;
    TraceRecorder<T> recorder(query);
    run_rmtp_into<T>(recorder, policy, verifier, transition, query, config, rng);
    return std::move(recorder).take();
}

template <TaskTraits T, class Sink, class Policy, class Verifier, class Transition>
    requires EpisodeSink<Sink, T> && PolicyFor<Policy, typename T::state_type> &&
             VerifierFor<Verifier, typename T::state_type, typename T::step_type> &&
             TransitionFor<Transition, typename T::state_type, typename T::step_type>
void run_rtbs_into(Sink& sink, const Policy& policy, const Verifier& verifier, const Transition& transition,
                   const typename T::query_type& query, const ReflectConfig& config, Rng& rng) {
    config.validate();
    T::validate(query);
    const std::size_t m = config.width;
    auto state = T::initial_state(query);
    TraceStack<T> stack;
    std::size_t attempt = 0;
    std::size_t verified = 0;
    const Verification none;

    while (sink.events() < config.total_budget) {
        ++attempt;
        VerifiedStep<typename T::step_type> vs{propose(policy, state, attempt, rng), {}};
        vs.verification = detail::maybe_verify<T>(verifier, state, vs.step, verified, config.reflective_budget, rng);

        if (is_rejected(vs.verification)) {
            sink.event(state, vs.step, vs.verification, Disposition::rejected);
            if (attempt < m) continue;
            if (stack.empty()) {
                if (config.root_width_limited) {
                    sink.finish(std::nullopt, Outcome::incorrect);
                    return;
                }
                continue;  // the query state has no parent to reject
            }
            // m-th rejection: propagate "x" upward until an ancestor has attempts left.
            do {
                auto entry = stack.pop();
                state = std::move(entry.parent);
                attempt = entry.attempt;
                sink.event(state, entry.step, none, Disposition::traceback);
            } while (attempt >= m && !stack.empty() && sink.events() < config.total_budget);
            if (attempt >= m && stack.empty() && config.root_width_limited) {
                sink.finish(std::nullopt, Outcome::incorrect);
                return;
            }
            continue;
        }

        sink.event(state, vs.step, vs.verification, Disposition::accepted);
        if (T::is_answer(vs.step)) {
            detail::finish_with_answer<T>(sink, query, std::move(vs.step));
            return;
        }
        auto next = transition.apply(state, vs.step);
        stack.push({std::move(state), attempt, std::move(vs.step)});
        state = std::move(next);
        attempt = 0;
    }
    sink.finish(std::nullopt, Outcome::budget_exhausted);
}

/// Reflective trace-back search. The m-th rejection at a state rejects the
/// step that produced it and restores the nearest ancestor with attempts left.
template <class Query, class Policy, class Verifier, class Transition>
EpisodeRecord<typename Query::task> run_rtbs(const Policy& policy, const Verifier& verifier,
                                             const Transition& transition, const Query& query,
                                             const ReflectConfig& config, Rng& rng) {
    using T = typename Query::task;
    TraceRecorder<T> recorder(query);
    run_rtbs_into<T>(recorder, policy, verifier, transition, query, config, rng);
    return std::move(recorder).take();
}

}  // namespace reflab
