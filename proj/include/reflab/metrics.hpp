#pragma once

// Evaluation measures over episode logs: first-attempt verification error
// rates, reflection frequency, accuracy by tier, and the theory-vs-simulation
// table.

#include <cstddef>
#include <map>
#include <optional>
#include <sstream>
#include <string>
#include <utility>
#include <vector>

#include "reflab/format.hpp"
#include "reflab/mtp.hpp"
#include "reflab/sim.hpp"
#include "reflab/stats.hpp"
#include "reflab/tasks.hpp"

namespace reflab::metrics {

/// Rates are nullopt when their denominator is 0.
struct ErrorEstimate {
    std::optional<double> e_plus_hat;   // accepted among oracle-negative first attempts
    std::optional<double> e_minus_hat;  // rejected among oracle-positive first attempts
    std::size_t n_first_attempts = 0;
    std::size_t oracle_positive = 0;
    std::size_t oracle_negative = 0;
    std::size_t rejected_positive = 0;
    std::size_t accepted_negative = 0;

    ErrorEstimate& operator+=(const ErrorEstimate& o) {
        n_first_attempts += o.n_first_attempts;
        oracle_positive += o.oracle_positive;
        oracle_negative += o.oracle_negative;
        rejected_positive += o.rejected_positive;
        accepted_negative += o.accepted_negative;
        finalize();
        return *this;
    }

    void finalize() {
        e_plus_hat.reset();
        e_minus_hat.reset();
        if (oracle_negative) e_plus_hat = static_cast<double>(accepted_negative) / static_cast<double>(oracle_negative);
        if (oracle_positive) e_minus_hat = static_cast<double>(rejected_positive) / static_cast<double>(oracle_positive);
    }
};

/// Counts the first proposal made at each state of the accepted chain: the
/// query state and every state entered through an accepted step. States
/// restored by traceback are revisits and contribute nothing; proposals
/// without verification are skipped. `oracle.correct(state, step)` gives the
/// ground truth.
template <TaskTraits T, class Oracle>
ErrorEstimate estimate_verification_errors(const std::vector<EpisodeRecord<T>>& records, const Oracle& oracle) {
    ErrorEstimate est;
    for (const auto& rec : records) {
        bool fresh = true;
        for (const auto& e : rec.events) {
            if (e.disposition == Disposition::traceback) {
                fresh = false;
                continue;
            }
            if (fresh && !e.verified.verification.empty()) {
                ++est.n_first_attempts;
                const bool rejected = e.disposition == Disposition::rejected;
                if (oracle.correct(e.state, e.verified.step)) {
                    ++est.oracle_positive;
                    est.rejected_positive += rejected;
                } else {
                    ++est.oracle_negative;
                    est.accepted_negative += !rejected;
                }
            }
            fresh = e.disposition == Disposition::accepted;
        }
    }
    est.finalize();
    return est;
}

inline std::string to_csv(const ErrorEstimate& e) {
    const auto cell = [](const std::optional<double>& v) { return v ? format_double(*v) : std::string(); };
    std::ostringstream os;
    os << "e_plus_hat,e_minus_hat,n_first_attempts,oracle_positive,oracle_negative,rejected_positive,accepted_negative\n"
       << cell(e.e_plus_hat) << ',' << cell(e.e_minus_hat) << ',' << e.n_first_attempts << ',' << e.oracle_positive
       << ',' << e.oracle_negative << ',' << e.rejected_positive << ',' << e.accepted_negative << '\n';
    return os.str();
}

struct FrequencyCell {
    std::size_t steps = 0;     // proposals (traceback events excluded)
    std::size_t verified = 0;  // proposals with non-empty verification

    /// Percentage in [0, 100]; nullopt for an empty cell.
    std::optional<double> percent() const {
        if (!steps) return std::nullopt;
        return 100.0 * static_cast<double>(verified) / static_cast<double>(steps);
    }
};

/// Cells keyed by `key(query)`: for Mult the pair (i, j) = (digits of y,
/// digits of x); for Sudoku the number of blanks.
template <class Key>
struct FrequencyGrid {
    std::map<Key, FrequencyCell> cells;
};

template <TaskTraits T, class KeyFn>
auto reflection_frequency(const std::vector<EpisodeRecord<T>>& records, KeyFn key) {
    FrequencyGrid<std::decay_t<decltype(key(records.front().query))>> grid;
    for (const auto& rec : records) {
        auto& cell = grid.cells[key(rec.query)];
        for (const auto& e : rec.events) {
            if (e.disposition == Disposition::traceback) continue;
            ++cell.steps;
            cell.verified += !e.verified.verification.empty();
        }
    }
    return grid;
}

inline std::pair<int, int> mult_frequency_key(const MultQuery& q) { return {digit_count(q.y), digit_count(q.x)}; }
inline int sudoku_frequency_key(const SudokuQuery& q) { return q.givens.blanks(); }

inline FrequencyGrid<std::pair<int, int>> reflection_frequency(const std::vector<EpisodeRecord<MultTask>>& records) {
    return reflection_frequency(records, mult_frequency_key);
}

inline FrequencyGrid<int> reflection_frequency(const std::vector<EpisodeRecord<SudokuTask>>& records) {
    return reflection_frequency(records, sudoku_frequency_key);
}

inline std::string to_csv(const FrequencyGrid<std::pair<int, int>>& grid) {
    std::ostringstream os;
    os << "i,j,steps,verified,frequency_pct,frequency\n";
    for (const auto& [k, c] : grid.cells) {
        const auto p = c.percent();
        os << k.first << ',' << k.second << ',' << c.steps << ',' << c.verified << ','
           << (p ? format_percent(*p / 100.0) : "") << ',' << (p ? format_double(*p / 100.0) : "") << '\n';
    }
    return os.str();
}

inline std::string to_csv(const FrequencyGrid<int>& grid) {
    std::ostringstream os;
    os << "blanks,steps,verified,frequency_pct,frequency\n";
    for (const auto& [k, c] : grid.cells) {
        const auto p = c.percent();
        os << k << ',' << c.steps << ',' << c.verified << ',' << (p ? format_percent(*p / 100.0) : "") << ','
           << (p ? format_double(*p / 100.0) : "") << '\n';
    }
    return os.str();
}

struct AccuracyRow {
    Tier tier = Tier::id_easy;
    std::size_t count = 0;
    std::size_t correct = 0;
    std::optional<double> accuracy;  // nullopt for an empty group
    stats::Interval ci;              // 99% Wilson
};

/// One row per tier in tier order; empty tiers keep a row with count 0.
inline std::vector<AccuracyRow> accuracy_table(const std::vector<std::pair<Tier, Outcome>>& outcomes) {
    std::vector<AccuracyRow> rows;
    for (Tier t : kAllTiers) rows.push_back({t, 0, 0, std::nullopt, {}});
    for (const auto& [tier, outcome] : outcomes) {
        auto& row = rows[static_cast<std::size_t>(tier)];
        ++row.count;
        row.correct += outcome == Outcome::correct;
    }
    for (auto& row : rows) {
        if (!row.count) continue;
        row.accuracy = static_cast<double>(row.correct) / static_cast<double>(row.count);
        row.ci = stats::wilson(row.correct, row.count);
    }
    return rows;
}

template <TaskTraits T>
std::vector<AccuracyRow> accuracy_table(const std::vector<EpisodeRecord<T>>& records) {
    std::vector<std::pair<Tier, Outcome>> outcomes;
    outcomes.reserve(records.size());
    for (const auto& r : records) outcomes.emplace_back(TaskOps<T>::tier_of(r.query), r.outcome);
    return accuracy_table(outcomes);
}

inline std::string to_csv(const std::vector<AccuracyRow>& rows) {
    std::ostringstream os;
    os << "tier,count,correct,accuracy_pct,accuracy,ci_lo,ci_hi\n";
    for (const auto& r : rows) {
        os << to_string(r.tier) << ',' << r.count << ',' << r.correct << ',';
        if (r.accuracy)
            os << format_percent(*r.accuracy) << ',' << format_double(*r.accuracy) << ',' << format_double(r.ci.lo)
               << ',' << format_double(r.ci.hi);
        else
            os << ",,,";
        os << '\n';
    }
    return os.str();
}

struct ReportRow {
    std::size_t n = 0;
    sim::ModeSpec mode;
    sim::SimResult result;
    double theory = 0.0;
};

/// One row per (n, mode) and, for RTBS, per width m. Every point uses the
/// same `seed`; streams are separated by (mode, m, n).
inline std::vector<ReportRow> theory_vs_sim(const theory::SimplifiedParams& params,
                                            const std::vector<sim::Mode>& modes, const std::vector<std::size_t>& ns,
                                            const std::vector<std::size_t>& m_list, std::size_t episodes,
                                            std::uint64_t seed, const sim::SimOptions& options = {}) {
    std::vector<sim::ModeSpec> specs;
    for (sim::Mode mode : modes) {
        if (mode != sim::Mode::rtbs) {
            specs.push_back({mode, 0});
            continue;
        }
        for (std::size_t m : m_list) specs.push_back(sim::ModeSpec::rtbs(m));
    }
    std::vector<ReportRow> rows;
    for (std::size_t n : ns)
        for (const auto& spec : specs)
            rows.push_back({n, spec, sim::simulate_accuracy(params, n, spec, episodes, seed, options),
                            sim::theory_accuracy(params, n, spec)});
    return rows;
}

inline std::string to_csv(const std::vector<ReportRow>& rows) {
    std::ostringstream os;
    os << sim::kCsvHeader << '\n';
    for (const auto& r : rows) os << sim::csv_row(r.n, r.mode, r.result, r.theory) << '\n';
    return os.str();
}

/// theory_vs_sim rendered as CSV.
inline std::string theory_vs_sim_report(const theory::SimplifiedParams& params, const std::vector<sim::Mode>& modes,
                                        const std::vector<std::size_t>& ns, const std::vector<std::size_t>& m_list,
                                        std::size_t episodes, std::uint64_t seed,
                                        const sim::SimOptions& options = {}) {
    return to_csv(theory_vs_sim(params, modes, ns, m_list, episodes, seed, options));
}

}  // namespace reflab::metrics
