#pragma once

// Reference computations written without the library's code paths: exact
// probabilities of the search processes, schoolbook decimal arithmetic, and
// an independent Sudoku checker and solver.

#include <algorithm>
#include <array>
#include <cstddef>
#include <set>
#include <string>
#include <vector>

namespace oracle {

// --- simplified task --------------------------------------------------------

struct Rates {
    double alpha, beta, gamma;
};

inline Rates rates(double mu, double em, double ep) {
    return {mu * em + (1 - mu) * (1 - ep), mu * (1 - em), (1 - mu) * ep};
}

/// Outcome distribution of a width-limited search started at one state:
/// reach a correct answer, reach a wrong answer, or exhaust all attempts and
/// hand a rejection back to the parent.
struct Outcomes {
    double correct = 0, wrong = 0, fail = 0;
};

/// Exact outcome probabilities of the trace-back search below a positive
/// (and a negative) state of scale n, with m attempts per state, tracked as
/// three-way distributions level by level.
struct SearchDp {
    std::vector<Outcomes> pos, neg;

    SearchDp(double mu, double em, double ep, double f, std::size_t m, std::size_t n_max) {
        const auto r = rates(mu, em, ep);
        pos.resize(n_max + 1);
        neg.resize(n_max + 1);
        for (std::size_t n = 1; n <= n_max; ++n) {
            // One attempt at a positive state.
            Outcomes a;
            double again = r.alpha;
            if (n == 1) {
                a.correct = r.beta;
                a.wrong = r.gamma;
            } else {
                a.correct = r.beta * pos[n - 1].correct + r.gamma * neg[n - 1].correct;
                a.wrong = r.beta * pos[n - 1].wrong + r.gamma * neg[n - 1].wrong;
                again += r.beta * pos[n - 1].fail + r.gamma * neg[n - 1].fail;
            }
            pos[n] = repeat(a, again, m);
            Outcomes b;
            double again_neg = f;
            if (n == 1) {
                b.wrong = 1 - f;
            } else {
                b.wrong = (1 - f) * neg[n - 1].wrong;
                again_neg += (1 - f) * neg[n - 1].fail;
            }
            neg[n] = repeat(b, again_neg, m);
        }
    }

    static Outcomes repeat(const Outcomes& once, double again, std::size_t m) {
        Outcomes o;
        double reach = 1;
        for (std::size_t i = 0; i < m; ++i) {
            o.correct += reach * once.correct;
            o.wrong += reach * once.wrong;
            reach *= again;
        }
        o.fail = reach;
        return o;
    }
};

/// RMTP as an absorbing chain: each level is left with probability beta +
/// gamma, and only the beta exit stays on the correct path.
inline double rmtp_accuracy(double mu, double em, double ep, std::size_t n) {
    const auto r = rates(mu, em, ep);
    double acc = 1;
    for (std::size_t k = 0; k < n; ++k) acc *= r.beta / (r.beta + r.gamma);
    return acc;
}

/// Mean number of proposals per correct RMTP episode: the attempts per level
/// are geometric with success probability beta + gamma.
inline double rmtp_mean_proposals(double mu, double em, double ep, std::size_t n) {
    const auto r = rates(mu, em, ep);
    return static_cast<double>(n) / (r.beta + r.gamma);
}

// --- decimal arithmetic -------------------------------------------------------

inline std::string strip(std::string s) {
    const auto p = s.find_first_not_of('0');
    return p == std::string::npos ? "0" : s.substr(p);
}

inline std::string add(const std::string& a, const std::string& b) {
    std::string out;
    int carry = 0;
    for (std::size_t i = 0; i < std::max(a.size(), b.size()) || carry; ++i) {
        int d = carry;
        if (i < a.size()) d += a[a.size() - 1 - i] - '0';
        if (i < b.size()) d += b[b.size() - 1 - i] - '0';
        out.push_back(static_cast<char>('0' + d % 10));
        carry = d / 10;
    }
    std::reverse(out.begin(), out.end());
    return strip(out);
}

/// Long multiplication of decimal strings.
inline std::string multiply(const std::string& a, const std::string& b) {
    std::vector<int> acc(a.size() + b.size(), 0);
    for (std::size_t i = 0; i < a.size(); ++i)
        for (std::size_t j = 0; j < b.size(); ++j)
            acc[i + j + 1] += (a[i] - '0') * (b[j] - '0');
    for (std::size_t k = acc.size(); k-- > 1;) {
        acc[k - 1] += acc[k] / 10;
        acc[k] %= 10;
    }
    std::string out;
    for (int d : acc) out.push_back(static_cast<char>('0' + d));
    return strip(out);
}

/// x*y+z from "x*y+z".
inline std::string expression_value(const std::string& text) {
    const auto star = text.find('*');
    const auto plus = text.find('+');
    return add(multiply(text.substr(0, star), text.substr(star + 1, plus - star - 1)), text.substr(plus + 1));
}

// --- Sudoku -------------------------------------------------------------------

using Grid = std::array<std::array<int, 9>, 9>;

inline Grid grid_from(const std::string& rendered) {
    Grid g{};
    std::size_t k = 0;
    for (char c : rendered) {
        if (c < '0' || c > '9') continue;
        g[k / 9][k % 9] = c - '0';
        ++k;
    }
    return g;
}

/// Every row, column and box holds distinct nonzero values.
inline bool no_conflicts(const Grid& g) {
    for (int i = 0; i < 9; ++i) {
        std::set<int> row, col, box;
        for (int j = 0; j < 9; ++j) {
            const int a = g[i][j], b = g[j][i], c = g[3 * (i / 3) + j / 3][3 * (i % 3) + j % 3];
            if (a && !row.insert(a).second) return false;
            if (b && !col.insert(b).second) return false;
            if (c && !box.insert(c).second) return false;
        }
    }
    return true;
}

/// A full board that agrees with every given and breaks no rule.
inline bool valid_solution(const Grid& givens, const Grid& board) {
    for (int r = 0; r < 9; ++r)
        for (int c = 0; c < 9; ++c) {
            if (board[r][c] < 1 || board[r][c] > 9) return false;
            if (givens[r][c] && givens[r][c] != board[r][c]) return false;
        }
    return no_conflicts(board);
}

inline bool fits(const Grid& g, int r, int c, int v) {
    for (int k = 0; k < 9; ++k) {
        if (g[r][k] == v || g[k][c] == v) return false;
        if (g[3 * (r / 3) + k / 3][3 * (c / 3) + k % 3] == v) return false;
    }
    return true;
}

/// Plain cell-by-cell backtracking; returns false when no completion exists.
/// The givens must not conflict.
inline bool solve(Grid& g, int from = 0) {
    for (int k = from; k < 81; ++k) {
        const int r = k / 9, c = k % 9;
        if (g[r][c]) continue;
        for (int v = 1; v <= 9; ++v) {
            if (!fits(g, r, c, v)) continue;
            g[r][c] = v;
            if (solve(g, k + 1)) return true;
        }
        g[r][c] = 0;
        return false;
    }
    return true;
}

}  // namespace oracle
