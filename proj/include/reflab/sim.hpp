#pragma once

// Monte-Carlo estimates of reasoning accuracy and solution length on the
// simplified task, using the same executors as the concrete tasks.

#include <cstdint>
#include <limits>
#include <optional>
#include <sstream>
#include <string>
#include <string_view>

#include "reflab/format.hpp"
#include "reflab/parallel.hpp"
#include "reflab/reflect.hpp"
#include "reflab/stats.hpp"
#include "reflab/synthetic.hpp"
#include "reflab/theory.hpp"

namespace reflab::sim {

enum class Mode { none, rmtp, rtbs };

struct ModeSpec {
    Mode mode = Mode::rmtp;
    std::size_t width = 0;  // RTBS only

    static ModeSpec none() { return {Mode::none, 0}; }
    static ModeSpec rmtp() { return {Mode::rmtp, 0}; }
    static ModeSpec rtbs(std::size_t m) { return {Mode::rtbs, m}; }

    friend bool operator==(const ModeSpec&, const ModeSpec&) = default;
};

inline std::string_view to_string(Mode m) {
    switch (m) {
        case Mode::none: return "none";
        case Mode::rmtp: return "rmtp";
        case Mode::rtbs: return "rtbs";
    }
    return "?";
}

inline Mode parse_mode(std::string_view s) {
    if (s == "none") return Mode::none;
    if (s == "rmtp") return Mode::rmtp;
    if (s == "rtbs") return Mode::rtbs;
    throw InputError("unknown mode '" + std::string(s) + "' (expected none, rmtp or rtbs)");
}

struct SimOptions {
    std::size_t threads = 0;        // 0: REFLECT_LAB_THREADS or hardware concurrency
    std::size_t budget = 1'000'000;  // total and reflective budget per episode
    std::optional<theory::PosteriorParams> posterior;
};

/// Budget exhaustion above this fraction of episodes marks a result as degenerate.
inline constexpr double kMaxExhaustedFraction = 1e-3;

struct SimResult {
    std::size_t episodes = 0;
    std::size_t successes = 0;
    double accuracy_hat = 0.0;
    stats::Interval wilson_ci;
    double mean_length_correct = std::numeric_limits<double>::quiet_NaN();
    std::uint64_t seed = 0;
    std::size_t budget_exhausted = 0;
    bool degenerate = false;  // budget exhaustion dominated
};

/// Theory value matching a mode: mu^n, rho~(n) or rho~_m(n).
inline double theory_accuracy(const theory::SimplifiedParams& p, std::size_t n, ModeSpec mode) {
    switch (mode.mode) {
        case Mode::none: return theory::rho_nonreflective(p.mu, n);
        case Mode::rmtp: return theory::rho_rmtp(p, n);
        case Mode::rtbs: return theory::rho_rtbs(p, mode.width, n);
    }
    return 0.0;
}

namespace detail {

struct Tally {
    std::size_t successes = 0;
    std::size_t exhausted = 0;
    std::uint64_t length_correct = 0;  // summed events over correct episodes
};

inline Tally merge(Tally a, const Tally& b) {
    a.successes += b.successes;
    a.exhausted += b.exhausted;
    a.length_correct += b.length_correct;
    return a;
}

inline Rng point_stream(std::uint64_t seed, std::string_view tag, ModeSpec mode, std::size_t n) {
    return Rng(seed).split(tag).split(static_cast<std::uint64_t>(mode.mode)).split(mode.width).split(n);
}

inline void run_synthetic(OutcomeRecorder<SyntheticTask>& sink, const SyntheticSelfVerifyingPolicy& policy,
                          std::size_t n, ModeSpec mode, std::size_t budget, Rng& rng) {
    const SyntheticQuery query{n};
    ReflectConfig config;
    config.reflective_budget = budget;
    config.total_budget = budget;
    config.width = mode.width == 0 ? 1 : mode.width;
    config.root_width_limited = true;
    switch (mode.mode) {
        case Mode::none:
            run_nonreflective_into<SyntheticTask>(sink, policy, policy, query, budget, rng);
            break;
        case Mode::rmtp:
            run_rmtp_into<SyntheticTask>(sink, policy, policy, policy, query, config, rng);
            break;
        case Mode::rtbs:
            run_rtbs_into<SyntheticTask>(sink, policy, policy, policy, query, config, rng);
            break;
    }
}

}  // namespace detail

/// Fraction of episodes from SyntheticState(n, positive) that end on a
/// positive scale-0 state. RTBS here caps attempts at the query state too, so
/// the estimate targets the product formula for rho~_m(n).
inline SimResult simulate_accuracy(const theory::SimplifiedParams& params, std::size_t n, ModeSpec mode,
                                   std::size_t episodes, std::uint64_t seed, const SimOptions& options = {}) {
    if (episodes < 1) throw InputError("episodes must be >= 1");
    if (mode.mode == Mode::rtbs && mode.width < 1) throw InputError("rtbs mode needs width >= 1");
    const SyntheticSelfVerifyingPolicy policy(params, options.posterior);
    const Rng base = detail::point_stream(seed, "accuracy", mode, n);
    const auto tally = parallel_reduce(
        episodes, options.threads, detail::Tally{},
        [&](detail::Tally& acc, std::size_t e) {
            Rng rng = base.split(e);
            OutcomeRecorder<SyntheticTask> sink;
            detail::run_synthetic(sink, policy, n, mode, options.budget, rng);
            if (sink.outcome() == Outcome::correct) {
                ++acc.successes;
                acc.length_correct += sink.events();
            } else if (sink.outcome() == Outcome::budget_exhausted) {
                ++acc.exhausted;
            }
        },
        detail::merge);

    SimResult r;
    r.episodes = episodes;
    r.successes = tally.successes;
    r.accuracy_hat = static_cast<double>(tally.successes) / static_cast<double>(episodes);
    r.wilson_ci = stats::wilson(tally.successes, episodes);
    if (tally.successes > 0)
        r.mean_length_correct = static_cast<double>(tally.length_correct) / static_cast<double>(tally.successes);
    r.seed = seed;
    r.budget_exhausted = tally.exhausted;
    r.degenerate = static_cast<double>(tally.exhausted) > kMaxExhaustedFraction * static_cast<double>(episodes);
    return r;
}

struct LengthEstimate {
    double mean = 0.0;       // proposals per correct episode, rejected ones included
    std::size_t correct = 0;
    std::size_t episodes = 0;
};

/// Mean number of proposal attempts over RMTP episodes that end correctly.
/// Throws NoSolutionError when no episode succeeds.
inline LengthEstimate estimate_length(const theory::SimplifiedParams& params, std::size_t n, std::size_t episodes,
                                      std::uint64_t seed, const SimOptions& options = {}) {
    const auto r = [&] {
        if (episodes < 1) throw InputError("episodes must be >= 1");
        const SyntheticSelfVerifyingPolicy policy(params, options.posterior);
        const Rng base = detail::point_stream(seed, "length", ModeSpec::rmtp(), n);
        return parallel_reduce(
            episodes, options.threads, detail::Tally{},
            [&](detail::Tally& acc, std::size_t e) {
                Rng rng = base.split(e);
                OutcomeRecorder<SyntheticTask> sink;
                detail::run_synthetic(sink, policy, n, ModeSpec::rmtp(), options.budget, rng);
                if (sink.outcome() == Outcome::correct) {
                    ++acc.successes;
                    acc.length_correct += sink.proposals();
                }
            },
            detail::merge);
    }();
    if (r.successes == 0) throw NoSolutionError("no correct episode; mean solution length undefined");
    return {static_cast<double>(r.length_correct) / static_cast<double>(r.successes), r.successes, episodes};
}

inline double simulate_length(const theory::SimplifiedParams& params, std::size_t n, std::size_t episodes,
                              std::uint64_t seed, const SimOptions& options = {}) {
    return estimate_length(params, n, episodes, seed, options).mean;
}

struct CrossoverReport {
    std::optional<std::size_t> n_star;  // smallest n with rho~_m(n) > rho~(n)
    std::optional<SimResult> rtbs_check;  // MC at n* + 5, when requested
    std::optional<SimResult> rmtp_check;
};

/// Finds the RTBS/RMTP crossover on theory values; with episodes > 0 also
/// estimates both accuracies by MC five scales past the crossover.
inline CrossoverReport crossover_scan(const theory::SimplifiedParams& params, std::size_t m, std::size_t n_max,
                                      std::size_t episodes, std::uint64_t seed, const SimOptions& options = {}) {
    if (n_max < 1) throw InputError("n_max must be >= 1");
    CrossoverReport report;
    report.n_star = theory::first_rtbs_crossover(params, m, n_max);
    if (report.n_star && episodes > 0) {
        const std::size_t n = *report.n_star + 5;
        report.rtbs_check = simulate_accuracy(params, n, ModeSpec::rtbs(m), episodes, seed, options);
        report.rmtp_check = simulate_accuracy(params, n, ModeSpec::rmtp(), episodes, seed, options);
    }
    return report;
}

inline constexpr std::string_view kCsvHeader = "n,mode,m,episodes,acc_hat,ci_lo,ci_hi,theory,zscore";

/// One CSV line (no newline) in kCsvHeader layout.
inline std::string csv_row(std::size_t n, ModeSpec mode, const SimResult& r, double theory_value) {
    std::ostringstream os;
    os << n << ',' << to_string(mode.mode) << ',' << mode.width << ',' << r.episodes << ','
       << format_double(r.accuracy_hat) << ',' << format_double(r.wilson_ci.lo) << ','
       << format_double(r.wilson_ci.hi) << ',' << format_double(theory_value) << ','
       << format_double(stats::zscore(r.accuracy_hat, theory_value, r.episodes));
    return os.str();
}

}  // namespace reflab::sim
