#pragma once

// Reward and advantage arithmetic of group-relative policy optimization, plus
// the two reflective-RL adjustments: masking rejected steps and truncating
// episodes at their first clear error. No optimizer or model is involved.

#include <cmath>
#include <cstddef>
#include <sstream>
#include <string>
#include <vector>

#include "reflab/error.hpp"
#include "reflab/format.hpp"
#include "reflab/mtp.hpp"
#include "reflab/stats.hpp"

namespace reflab::rl {

/// G episodes for one query with their outcome rewards and, optionally,
/// per-event process rewards (empty means none, as under verifiable rewards).
template <TaskTraits T>
struct TrajectoryGroup {
    std::vector<EpisodeRecord<T>> trajectories;
    std::vector<double> outcome_rewards;
    std::vector<std::vector<double>> process_rewards;
};

struct AdvantageRow {
    double advantage = 0.0;
    bool step_masked = false;  // the step's own tokens get no advantage
    bool labels_live = false;  // verification-label positions keep the advantage

    double step_advantage() const { return step_masked ? 0.0 : advantage; }
    double label_advantage() const { return labels_live ? advantage : 0.0; }

    friend bool operator==(const AdvantageRow&, const AdvantageRow&) = default;
};

/// rows[g][t] for trajectory g, event t.
struct AdvantageTable {
    std::vector<std::vector<AdvantageRow>> rows;

    friend bool operator==(const AdvantageTable&, const AdvantageTable&) = default;
};

namespace detail {

/// (r - mean) / population sd; all zeros when the sd is 0.
inline std::vector<double> normalize(const std::vector<double>& r) {
    const double sd = stats::population_sd(r);
    std::vector<double> out(r.size(), 0.0);
    if (!(sd > 0.0)) return out;
    const double m = stats::mean(r);
    for (std::size_t i = 0; i < r.size(); ++i) out[i] = (r[i] - m) / sd;
    return out;
}

}  // namespace detail

/// A(g, t) = normalized outcome reward of g plus the sum of normalized process
/// rewards of events t.. of g. Process rewards are normalized over all events
/// of the group. labels_live marks events that carry verification labels.
template <TaskTraits T>
AdvantageTable grpo_group_advantages(const TrajectoryGroup<T>& group) {
    const std::size_t G = group.trajectories.size();
    if (G < 2) throw InputError("group normalization needs at least 2 trajectories");
    if (group.outcome_rewards.size() != G) throw InputError("one outcome reward per trajectory is required");
    const bool has_process = !group.process_rewards.empty();
    if (has_process && group.process_rewards.size() != G) throw InputError("process rewards must cover every trajectory");
    for (std::size_t g = 0; has_process && g < G; ++g)
        if (group.process_rewards[g].size() != group.trajectories[g].events.size())
            throw InputError("process rewards must align with events");

    for (std::size_t g = 1; g < G; ++g)
        if (!(group.trajectories[g].query == group.trajectories[0].query))
            throw InputError("all trajectories of a group must share the query");

    const auto outcome = detail::normalize(group.outcome_rewards);
    std::vector<std::vector<double>> process(G);
    if (has_process) {
        std::vector<double> flat;
        for (const auto& p : group.process_rewards) flat.insert(flat.end(), p.begin(), p.end());
        const auto norm = detail::normalize(flat);
        std::size_t k = 0;
        for (std::size_t g = 0; g < G; ++g)
            for (std::size_t t = 0; t < group.process_rewards[g].size(); ++t) process[g].push_back(norm[k++]);
    }

    AdvantageTable table;
    table.rows.resize(G);
    for (std::size_t g = 0; g < G; ++g) {
        const auto& events = group.trajectories[g].events;
        auto& row = table.rows[g];
        row.resize(events.size());
        double tail = 0.0;
        for (std::size_t t = events.size(); t-- > 0;) {
            if (has_process) tail += process[g][t];
            row[t] = {outcome[g] + tail, false, !events[t].verified.verification.empty()};
        }
    }
    return table;
}

/// Masks the step advantage of every rejected event; its labels stay live.
template <TaskTraits T>
std::vector<AdvantageRow> mask_rejected_advantages(const EpisodeRecord<T>& record, std::vector<AdvantageRow> row) {
    if (row.size() != record.events.size()) throw InputError("advantage row does not align with the record");
    for (std::size_t t = 0; t < row.size(); ++t) {
        if (record.events[t].disposition != Disposition::rejected) continue;
        row[t].step_masked = true;
        row[t].labels_live = !record.events[t].verified.verification.empty();
    }
    return row;
}

template <TaskTraits T>
AdvantageTable mask_rejected_advantages(const std::vector<EpisodeRecord<T>>& records, AdvantageTable table) {
    if (table.rows.size() != records.size()) throw InputError("advantage table does not align with the group");
    for (std::size_t g = 0; g < records.size(); ++g)
        table.rows[g] = mask_rejected_advantages(records[g], std::move(table.rows[g]));
    return table;
}

/// Cuts the record right after its first accepted event whose step the oracle
/// marks incorrect and marks the outcome incorrect. `oracle_prm(state, step)`
/// returns true for a correct step. Records without such an event are
/// returned unchanged.
template <TaskTraits T, class Oracle>
EpisodeRecord<T> early_truncate(EpisodeRecord<T> record, const Oracle& oracle_prm) {
    for (std::size_t t = 0; t < record.events.size(); ++t) {
        const auto& e = record.events[t];
        if (e.disposition != Disposition::accepted || oracle_prm(e.state, e.verified.step)) continue;
        const bool answer_event = T::is_answer(e.verified.step);
        record.events.resize(t + 1);
        if (!answer_event) record.answer.reset();
        record.steps_used = record.events.size();
        record.outcome = Outcome::incorrect;
        break;
    }
    return record;
}

inline constexpr std::string_view kAdvantageCsvHeader = "g,t,advantage,step_masked,labels_live";

inline std::string to_csv(const AdvantageTable& table) {
    std::ostringstream os;
    os << kAdvantageCsvHeader << '\n';
    for (std::size_t g = 0; g < table.rows.size(); ++g)
        for (std::size_t t = 0; t < table.rows[g].size(); ++t) {
            const auto& r = table.rows[g][t];
            os << g << ',' << t << ',' << format_double(r.advantage) << ',' << (r.step_masked ? 1 : 0) << ','
               << (r.labels_live ? 1 : 0) << '\n';
        }
    return os.str();
}

}  // namespace reflab::rl
