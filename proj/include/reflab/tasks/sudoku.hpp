#pragma once

// 9x9 Sudoku as an MTP. A step fills blank cells; the expert fills every
// naked single (recomputing candidates after each fill) or, when none
// exists, guesses one cell among those with the fewest candidates.

#include <algorithm>
#include <array>
#include <bit>
#include <cstdint>
#include <optional>
#include <string>
#include <string_view>
#include <vector>

#include "reflab/error.hpp"
#include "reflab/mtp.hpp"
#include "reflab/rng.hpp"
#include "reflab/tasks/tier.hpp"

namespace reflab {

struct SudokuBoard {
    std::array<std::uint8_t, 81> cells{};  // 0 = blank

    std::uint8_t at(int r, int c) const { return cells[static_cast<std::size_t>(r * 9 + c)]; }
    void set(int r, int c, int v) { cells[static_cast<std::size_t>(r * 9 + c)] = static_cast<std::uint8_t>(v); }

    int blanks() const { return static_cast<int>(std::count(cells.begin(), cells.end(), 0)); }
    bool complete() const { return blanks() == 0; }

    /// No value outside 0..9 and no repeated nonzero value in a row, column or box.
    bool consistent() const {
        for (auto v : cells)
            if (v > 9) return false;
        for (int unit = 0; unit < 27; ++unit) {
            unsigned seen = 0;
            for (int k = 0; k < 9; ++k) {
                const int idx = unit_cell(unit, k);
                const unsigned v = cells[static_cast<std::size_t>(idx)];
                if (v == 0) continue;
                if (seen & (1u << v)) return false;
                seen |= 1u << v;
            }
        }
        return true;
    }

    /// Cell index of member k of unit u: rows 0-8, columns 9-17, boxes 18-26.
    static int unit_cell(int u, int k) {
        if (u < 9) return u * 9 + k;
        if (u < 18) return k * 9 + (u - 9);
        const int b = u - 18;
        return ((b / 3) * 3 + k / 3) * 9 + (b % 3) * 3 + k % 3;
    }

    static bool peers(int a, int b) {
        if (a == b) return false;
        const int ra = a / 9, ca = a % 9, rb = b / 9, cb = b % 9;
        return ra == rb || ca == cb || (ra / 3 == rb / 3 && ca / 3 == cb / 3);
    }

    friend bool operator==(const SudokuBoard&, const SudokuBoard&) = default;
};

/// 9 lines of 9 digits, 0 for blanks, joined by '\n'.
inline std::string render(const SudokuBoard& b) {
    std::string s;
    s.reserve(89);
    for (int r = 0; r < 9; ++r) {
        if (r) s.push_back('\n');
        for (int c = 0; c < 9; ++c) s.push_back(static_cast<char>('0' + b.at(r, c)));
    }
    return s;
}

/// Reads 81 digits, ignoring whitespace.
inline SudokuBoard parse_sudoku_board(std::string_view text) {
    SudokuBoard b;
    std::size_t n = 0;
    for (char ch : text) {
        if (ch == '\n' || ch == ' ' || ch == '\r' || ch == '\t') continue;
        if (ch < '0' || ch > '9') throw InputError("Sudoku board may contain only digits");
        if (n >= 81) throw InputError("Sudoku board has more than 81 cells");
        b.cells[n++] = static_cast<std::uint8_t>(ch - '0');
    }
    if (n != 81) throw InputError("Sudoku board needs 81 cells, got " + std::to_string(n));
    return b;
}

/// Bit v (1..9) set iff v is not used by any peer of cell idx.
inline unsigned sudoku_candidates(const SudokuBoard& b, int idx) {
    unsigned used = 0;
    const int r = idx / 9, c = idx % 9;
    for (int k = 0; k < 9; ++k) {
        used |= 1u << b.at(r, k);
        used |= 1u << b.at(k, c);
        used |= 1u << b.at((r / 3) * 3 + k / 3, (c / 3) * 3 + k % 3);
    }
    return ~used & 0x3FEu;
}

struct SudokuFill {
    int row = 0;
    int col = 0;
    int value = 0;

    int index() const { return row * 9 + col; }
    friend bool operator==(const SudokuFill&, const SudokuFill&) = default;
};

struct SudokuTask;

struct SudokuQuery {
    using task = SudokuTask;
    SudokuBoard givens;

    friend bool operator==(const SudokuQuery&, const SudokuQuery&) = default;
};

/// Fills in row-major order, the resulting board, and whether a fill was a
/// guess. A step whose board is complete is the answer.
struct SudokuStep {
    std::vector<SudokuFill> fills;
    SudokuBoard next;
    bool guess = false;

    friend bool operator==(const SudokuStep&, const SudokuStep&) = default;
};

/// Complete, consistent, and agreeing with every given.
inline bool sudoku_solves(const SudokuBoard& givens, const SudokuBoard& board) {
    if (!board.complete() || !board.consistent()) return false;
    for (std::size_t i = 0; i < 81; ++i)
        if (givens.cells[i] != 0 && givens.cells[i] != board.cells[i]) return false;
    return true;
}

struct SudokuTask {
    using query_type = SudokuQuery;
    using state_type = SudokuBoard;
    using step_type = SudokuStep;

    static void validate(const SudokuQuery& q) {
        if (!q.givens.consistent()) throw InputError("Sudoku givens are inconsistent");
    }
    static SudokuBoard initial_state(const SudokuQuery& q) { return q.givens; }
    static bool is_answer(const SudokuStep& r) { return r.next.complete(); }
    static bool check_answer(const SudokuQuery& q, const SudokuStep& r) { return sudoku_solves(q.givens, r.next); }
};

inline std::string render(const SudokuQuery& q) { return render(q.givens); }

namespace detail {

inline void sort_fills(std::vector<SudokuFill>& fills) {
    std::sort(fills.begin(), fills.end(),
              [](const SudokuFill& a, const SudokuFill& b) { return a.index() < b.index(); });
}

/// First blank (row-major) without candidates, or -1.
inline int dead_cell(const SudokuBoard& b) {
    for (int i = 0; i < 81; ++i)
        if (b.cells[static_cast<std::size_t>(i)] == 0 && sudoku_candidates(b, i) == 0) return i;
    return -1;
}

}  // namespace detail

/// Expert step. Throws InputError on a complete board and DeadEndError when
/// some blank has no candidate.
inline SudokuStep sudoku_expert_step(const SudokuBoard& board, Rng& rng) {
    if (board.complete()) throw InputError("complete Sudoku board has no expert step");
    if (const int d = detail::dead_cell(board); d >= 0)
        throw DeadEndError("cell (" + std::to_string(d / 9) + "," + std::to_string(d % 9) + ") has no candidate");
    SudokuStep r;
    r.next = board;
    for (;;) {
        int forced = -1;
        for (int i = 0; i < 81 && forced < 0; ++i)
            if (r.next.cells[static_cast<std::size_t>(i)] == 0 && std::popcount(sudoku_candidates(r.next, i)) == 1)
                forced = i;
        if (forced < 0) break;
        const int v = std::countr_zero(sudoku_candidates(r.next, forced));
        r.next.cells[static_cast<std::size_t>(forced)] = static_cast<std::uint8_t>(v);
        r.fills.push_back({forced / 9, forced % 9, v});
    }
    if (!r.fills.empty()) {
        detail::sort_fills(r.fills);
        return r;
    }
    int fewest = 10;
    std::vector<int> cells;
    for (int i = 0; i < 81; ++i) {
        if (board.cells[static_cast<std::size_t>(i)] != 0) continue;
        const int n = std::popcount(sudoku_candidates(board, i));
        if (n < fewest) {
            fewest = n;
            cells.clear();
        }
        if (n == fewest) cells.push_back(i);
    }
    const int cell = cells[rng.below(cells.size())];
    const unsigned mask = sudoku_candidates(board, cell);
    auto pick = rng.below(static_cast<std::uint64_t>(std::popcount(mask)));
    int v = 1;
    for (; v <= 9; ++v)
        if ((mask >> v) & 1u) {
            if (pick == 0) break;
            --pick;
        }
    r.next.cells[static_cast<std::size_t>(cell)] = static_cast<std::uint8_t>(v);
    r.fills.push_back({cell / 9, cell % 9, v});
    r.guess = true;
    return r;
}

/// Builds a step from fills (sorted into row-major order) applied to `board`.
inline SudokuStep sudoku_step_from_fills(const SudokuBoard& board, std::vector<SudokuFill> fills, bool guess = false) {
    detail::sort_fills(fills);
    SudokuStep r{std::move(fills), board, guess};
    for (const auto& f : r.fills) r.next.set(f.row, f.col, f.value);
    return r;
}

/// Checks that step.next is the board with the fills written in; returns it.
/// Whether the fills are legal is the verifier's concern.
inline SudokuBoard sudoku_apply(const SudokuBoard& board, const SudokuStep& r) {
    SudokuBoard expect = board;
    for (const auto& f : r.fills) {
        if (f.row < 0 || f.row > 8 || f.col < 0 || f.col > 8 || f.value < 0 || f.value > 9)
            throw TransitionError("Sudoku fill out of range");
        expect.set(f.row, f.col, f.value);
    }
    if (expect != r.next) throw TransitionError("Sudoku step board does not match its fills");
    return r.next;
}

struct SudokuTransition {
    SudokuBoard apply(const SudokuBoard& b, const SudokuStep& r) const { return sudoku_apply(b, r); }
};

/// Expert as an execution policy: on a complete board it proposes the empty
/// answer step; on a dead end it writes a random digit into the first blank
/// without candidates, which necessarily conflicts and gets rejected.
struct SudokuExpertPolicy {
    SudokuStep sample(const SudokuBoard& b, Rng& rng) const {
        if (b.complete()) return {{}, b, false};
        if (const int d = detail::dead_cell(b); d >= 0)
            return sudoku_step_from_fills(b, {{d / 9, d % 9, static_cast<int>(1 + rng.below(9))}}, true);
        return sudoku_expert_step(b, rng);
    }
};

// --- verification --------------------------------------------------------------

namespace detail {

/// step.next equals the board with the fills written in, and the fills are
/// in strictly increasing row-major order.
inline bool sudoku_well_formed(const SudokuBoard& b, const SudokuStep& r) {
    for (std::size_t k = 1; k < r.fills.size(); ++k)
        if (r.fills[k].index() <= r.fills[k - 1].index()) return false;
    try {
        sudoku_apply(b, r);
    } catch (const TransitionError&) {
        return false;
    }
    return true;
}

}  // namespace detail

/// One label: the step is well formed, writes digits 1..9 into blank cells
/// only, and leaves a consistent board.
inline Verification sudoku_verify_binary(const SudokuBoard& b, const SudokuStep& r) {
    bool ok = detail::sudoku_well_formed(b, r) && b.consistent() && r.next.consistent();
    for (const auto& f : r.fills)
        ok = ok && f.value >= 1 && f.value <= 9 && b.cells[static_cast<std::size_t>(f.index())] == 0;
    return Verification::from_verdict(ok);
}

/// One label per fill in row-major order. A fill is negative when its cell
/// was not blank, its value is not 1..9, or it repeats the value of a peer in
/// the next board other than a later fill (so of two clashing fills only the
/// later one is blamed). A step with no fills gets the binary label. A
/// malformed step, or one applied to an inconsistent board, gets all
/// negatives. The result has a negative label iff the binary check fails.
inline Verification sudoku_verify_detailed(const SudokuBoard& b, const SudokuStep& r) {
    if (r.fills.empty()) return sudoku_verify_binary(b, r);
    Verification v;
    if (!detail::sudoku_well_formed(b, r) || !b.consistent()) {
        for (std::size_t k = 0; k < r.fills.size(); ++k) v.push_back(Label::negative);
        return v;
    }
    std::array<int, 81> order{};
    order.fill(-1);
    for (std::size_t k = 0; k < r.fills.size(); ++k)
        order[static_cast<std::size_t>(r.fills[k].index())] = static_cast<int>(k);
    for (std::size_t k = 0; k < r.fills.size(); ++k) {
        const auto& f = r.fills[k];
        const int idx = f.index();
        bool ok = b.cells[static_cast<std::size_t>(idx)] == 0 && f.value >= 1 && f.value <= 9;
        for (int p = 0; ok && p < 81; ++p) {
            if (!SudokuBoard::peers(idx, p) || order[static_cast<std::size_t>(p)] > static_cast<int>(k)) continue;
            if (r.next.cells[static_cast<std::size_t>(p)] == f.value) ok = false;
        }
        v.push_back(label_of(ok));
    }
    return v;
}

// --- corruption --------------------------------------------------------------

/// Value for cell idx that clashes with an unchanged peer but with no other
/// fill of the step; 0 when none exists.
inline int sudoku_clashing_value(const SudokuBoard& b, const SudokuStep& r, int idx, Rng& rng) {
    unsigned clash = 0;
    for (int p = 0; p < 81; ++p)
        if (SudokuBoard::peers(idx, p) && b.cells[static_cast<std::size_t>(p)] != 0)
            clash |= 1u << b.cells[static_cast<std::size_t>(p)];
    for (const auto& f : r.fills)
        if (f.index() != idx && SudokuBoard::peers(idx, f.index())) clash &= ~(1u << f.value);
    clash &= 0x3FEu;
    if (clash == 0) return 0;
    auto pick = rng.below(static_cast<std::uint64_t>(std::popcount(clash)));
    for (int v = 1; v <= 9; ++v)
        if ((clash >> v) & 1u) {
            if (pick == 0) return v;
            --pick;
        }
    return 0;
}

struct SudokuCorruption {
    SudokuStep step;
    std::size_t label = 0;  // index of the corrupted fill in the detailed layout
};

/// Single-fill corruption: one uniformly chosen fill takes a value clashing
/// with the unchanged board. When that is impossible (or the step has no
/// fills) a given cell is overwritten instead.
inline SudokuCorruption corrupt_sudoku_step(const SudokuBoard& b, const SudokuStep& r, Rng& rng) {
    if (!r.fills.empty()) {
        const auto k = static_cast<std::size_t>(rng.below(r.fills.size()));
        if (const int v = sudoku_clashing_value(b, r, r.fills[k].index(), rng); v != 0) {
            auto fills = r.fills;
            fills[k].value = v;
            return {sudoku_step_from_fills(b, std::move(fills), r.guess), k};
        }
    }
    std::vector<int> givens;
    for (int i = 0; i < 81; ++i)
        if (b.cells[static_cast<std::size_t>(i)] != 0) givens.push_back(i);
    if (givens.empty()) throw InputError("nothing to corrupt on an empty board without fills");
    const int idx = givens[rng.below(givens.size())];
    const int old = b.cells[static_cast<std::size_t>(idx)];
    int v = static_cast<int>(1 + rng.below(8));
    if (v >= old) ++v;
    auto fills = r.fills;
    fills.push_back({idx / 9, idx % 9, v});
    auto step = sudoku_step_from_fills(b, std::move(fills), r.guess);
    const auto pos = std::find_if(step.fills.begin(), step.fills.end(), [&](const auto& f) { return f.index() == idx; });
    const auto label = static_cast<std::size_t>(pos - step.fills.begin());
    return {std::move(step), label};
}

/// Expert policy whose step is replaced, with some probability, by a
/// single-fill corruption (a wrong value clashing with the board).
class SudokuNoisyPolicy {
public:
    explicit SudokuNoisyPolicy(double error, std::optional<double> revision_error = std::nullopt)
        : first_(error), revision_(revision_error.value_or(error)) {
        if (!(first_ >= 0.0 && first_ <= 1.0) || !(revision_ >= 0.0 && revision_ <= 1.0))
            throw InputError("policy error probabilities must lie in [0, 1]");
    }

    SudokuStep sample(const SudokuBoard& b, std::size_t attempt, Rng& rng) const {
        SudokuStep r = SudokuExpertPolicy{}.sample(b, rng);
        if (!rng.bernoulli(attempt <= 1 ? first_ : revision_)) return r;
        return corrupt_sudoku_step(b, r, rng).step;
    }

private:
    double first_;
    double revision_;
};

// --- queries -----------------------------------------------------------------

namespace detail {

inline bool fill_random(SudokuBoard& b, int idx, Rng& rng) {
    if (idx == 81) return true;
    std::array<int, 9> digits{1, 2, 3, 4, 5, 6, 7, 8, 9};
    for (std::size_t i = 8; i > 0; --i) std::swap(digits[i], digits[rng.below(i + 1)]);
    const unsigned mask = sudoku_candidates(b, idx);
    for (int v : digits) {
        if (!((mask >> v) & 1u)) continue;
        b.cells[static_cast<std::size_t>(idx)] = static_cast<std::uint8_t>(v);
        if (fill_random(b, idx + 1, rng)) return true;
    }
    b.cells[static_cast<std::size_t>(idx)] = 0;
    return false;
}

}  // namespace detail

struct SudokuPuzzle {
    SudokuQuery query;
    SudokuBoard solution;  // the full board the puzzle was cut from
};

/// Random complete board by randomized backtracking, then b uniformly chosen
/// cells blanked, b uniform in the tier range. Uniqueness is not enforced.
inline SudokuPuzzle gen_sudoku_puzzle(Tier tier, Rng& rng) {
    SudokuPuzzle p;
    detail::fill_random(p.solution, 0, rng);
    const auto range = sudoku_blank_range(tier);
    const auto blanks = static_cast<std::size_t>(rng.between(range.lo, range.hi));
    std::array<int, 81> idx{};
    for (int i = 0; i < 81; ++i) idx[static_cast<std::size_t>(i)] = i;
    for (std::size_t i = 0; i < blanks; ++i) std::swap(idx[i], idx[i + rng.below(81 - i)]);
    p.query.givens = p.solution;
    for (std::size_t i = 0; i < blanks; ++i) p.query.givens.cells[static_cast<std::size_t>(idx[i])] = 0;
    return p;
}

inline SudokuQuery gen_sudoku_query(Tier tier, Rng& rng) { return gen_sudoku_puzzle(tier, rng).query; }

inline Tier sudoku_tier_of(const SudokuQuery& q) {
    const int b = q.givens.blanks();
    for (Tier t : kAllTiers)
        if (sudoku_blank_range(t).contains(b)) return t;
    throw InputError("Sudoku blank count outside every tier");
}

}  // namespace reflab
