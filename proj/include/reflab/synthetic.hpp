#pragma once

// The simplified reasoning task: states carry only a complexity scale and a
// polarity. A (mu, e-, e+, f)-parameterized self-verifying policy acts on it.

#include <cstddef>
#include <optional>

#include "reflab/mtp.hpp"
#include "reflab/theory.hpp"

namespace reflab {

enum class Polarity : unsigned char { positive, negative };

struct SyntheticTask;

struct SyntheticQuery {
    using task = SyntheticTask;
    std::size_t scale = 0;

    friend bool operator==(const SyntheticQuery&, const SyntheticQuery&) = default;
};

/// Scale 0 is an answer: positive means correct, negative means wrong.
struct SyntheticState {
    std::size_t scale = 0;
    Polarity polarity = Polarity::positive;

    friend bool operator==(const SyntheticState&, const SyntheticState&) = default;
};

/// A proposed step and the verdict the self-verifying policy attached to it.
/// The verdict is drawn jointly with the step (one categorical draw over the
/// four outcomes on positive states).
struct SyntheticStep {
    SyntheticState target;
    bool flagged = false;  // the policy's own verification says "x"

    friend bool operator==(const SyntheticStep&, const SyntheticStep&) = default;
};

struct SyntheticTask {
    using query_type = SyntheticQuery;
    using state_type = SyntheticState;
    using step_type = SyntheticStep;

    static void validate(const SyntheticQuery&) {}
    static SyntheticState initial_state(const SyntheticQuery& q) { return {q.scale, Polarity::positive}; }
    static bool is_answer(const SyntheticStep& r) { return r.target.scale == 0; }
    static bool check_answer(const SyntheticQuery&, const SyntheticStep& r) {
        return r.target.scale == 0 && r.target.polarity == Polarity::positive;
    }
};

/// Policy, verifier and transition of the simplified task in one object.
/// With `posterior` set, attempt i at a positive state uses the i-th entry of
/// the attempt-indexed factors instead of `params`.
class SyntheticSelfVerifyingPolicy {
public:
    explicit SyntheticSelfVerifyingPolicy(theory::SimplifiedParams params,
                                          std::optional<theory::PosteriorParams> posterior = std::nullopt)
        : params_(params), posterior_(std::move(posterior)) {
        params_.validate();
        if (posterior_) posterior_->validate();
    }

    SyntheticStep sample(const SyntheticState& s, std::size_t attempt, Rng& rng) const {
        const std::size_t next = s.scale == 0 ? 0 : s.scale - 1;
        if (s.polarity == Polarity::negative) return {{next, Polarity::negative}, rng.bernoulli(params_.f)};
        double mu = params_.mu, em = params_.e_minus, ep = params_.e_plus;
        if (posterior_) {
            const std::size_t i = attempt == 0 ? 0 : attempt - 1;
            mu = posterior_->mu_at(i);
            em = posterior_->e_minus_at(i);
            ep = posterior_->e_plus_at(i);
        }
        const double u = rng.uniform();
        const double good_accept = mu * (1.0 - em);
        const double good_reject = mu * em;
        const double bad_accept = (1.0 - mu) * ep;
        if (u < good_accept) return {{next, Polarity::positive}, false};
        if (u < good_accept + good_reject) return {{next, Polarity::positive}, true};
        if (u < good_accept + good_reject + bad_accept) return {{next, Polarity::negative}, false};
        return {{next, Polarity::negative}, true};
    }

    SyntheticStep sample(const SyntheticState& s, Rng& rng) const { return sample(s, 1, rng); }

    Verification verify(const SyntheticState&, const SyntheticStep& r, Rng&) const {
        return Verification::from_verdict(!r.flagged);
    }

    SyntheticState apply(const SyntheticState& s, const SyntheticStep& r) const {
        if (s.scale == 0) throw TransitionError("no step applies to a scale-0 state");
        return r.target;
    }

    const theory::SimplifiedParams& params() const noexcept { return params_; }

private:
    theory::SimplifiedParams params_;
    std::optional<theory::PosteriorParams> posterior_;
};

}  // namespace reflab
