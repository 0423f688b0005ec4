#pragma once

// Accuracy theory of the simplified reasoning task: per-step rates, the
// non-reflective / RMTP / RTBS accuracies, validity predicates, expected
// solution length, fixed points, and the attempt-dependent (posterior risk)
// extension.

#include <algorithm>
#include <cmath>
#include <cstddef>
#include <limits>
#include <optional>
#include <string>
#include <vector>

#include "reflab/error.hpp"

namespace reflab::theory {

namespace detail {

inline void check_probability(double p, const char* name) {
    if (std::isnan(p)) throw InputError(std::string(name) + " is NaN");
    if (p < 0.0 || p > 1.0) throw InputError(std::string(name) + " must lie in [0, 1]");
}

/// sum_{i<m} d^i, exact at d = 1 (value m).
inline double geometric_sum(double d, std::size_t m) {
    if (d >= 1.0) return static_cast<double>(m);
    if (d <= 0.0) return 1.0;
    const double one_minus = 1.0 - d;
    return -std::expm1(static_cast<double>(m) * std::log1p(-one_minus)) / one_minus;
}

inline double ipow(double x, std::size_t m) { return std::pow(x, static_cast<double>(m)); }

}  // namespace detail

/// The (mu, e-, e+, f) factors of a self-verifying policy.
struct SimplifiedParams {
    double mu = 1.0;       // P(step leads to a positive state | positive state)
    double e_minus = 0.0;  // P(reject | step leads positive), on positive states
    double e_plus = 0.0;   // P(accept | step leads negative), on positive states
    double f = 0.0;        // P(reject any step | negative state)

    void validate() const {
        detail::check_probability(mu, "mu");
        detail::check_probability(e_minus, "e_minus");
        detail::check_probability(e_plus, "e_plus");
        detail::check_probability(f, "f");
    }

    friend bool operator==(const SimplifiedParams&, const SimplifiedParams&) = default;
};

struct DerivedRates {
    double alpha = 0.0;  // instantly rejected
    double beta = 0.0;   // correct and accepted
    double gamma = 0.0;  // incorrect but accepted
};

inline DerivedRates derived_rates(const SimplifiedParams& p) {
    p.validate();
    return {p.mu * p.e_minus + (1.0 - p.mu) * (1.0 - p.e_plus), p.mu * (1.0 - p.e_minus),
            (1.0 - p.mu) * p.e_plus};
}

/// rho(n) = mu^n.
inline double rho_nonreflective(double mu, std::size_t n) {
    detail::check_probability(mu, "mu");
    return detail::ipow(mu, n);
}

/// rho~(n) = (beta / (1 - alpha))^n. Returns 0 for n >= 1 when alpha = 1.
inline double rho_rmtp(const SimplifiedParams& p, std::size_t n) {
    const auto r = derived_rates(p);
    if (n == 0) return 1.0;
    if (r.alpha >= 1.0) return 0.0;
    return detail::ipow(r.beta / (1.0 - r.alpha), n);
}

/// True when RMTP can never produce an answer (alpha = 1).
inline bool rmtp_degenerate(const SimplifiedParams& p) { return derived_rates(p).alpha >= 1.0; }

/// Rejection (delta, epsilon), failure (phi, psi) and per-level success factor
/// (sigma) of RTBS with width m, indexed by scale 0..n_max.
struct RtbsRecursionTable {
    std::size_t width = 0;
    std::vector<double> delta;
    std::vector<double> epsilon;
    std::vector<double> sigma;
    std::vector<double> phi;  // delta^m
    std::vector<double> psi;  // epsilon^m

    std::size_t n_max() const { return delta.empty() ? 0 : delta.size() - 1; }
};

inline RtbsRecursionTable rtbs_table(const SimplifiedParams& p, std::size_t m, std::size_t n_max) {
    if (m < 1) throw InputError("RTBS width must be >= 1");
    const auto r = derived_rates(p);
    RtbsRecursionTable t;
    t.width = m;
    t.delta.assign(n_max + 1, 0.0);
    t.epsilon.assign(n_max + 1, 0.0);
    t.sigma.assign(n_max + 1, 0.0);
    t.phi.assign(n_max + 1, 0.0);
    t.psi.assign(n_max + 1, 0.0);
    t.sigma[0] = r.beta;
    for (std::size_t n = 1; n <= n_max; ++n) {
        t.delta[n] = std::min(1.0, r.alpha + r.beta * t.phi[n - 1] + r.gamma * t.psi[n - 1]);
        t.epsilon[n] = std::min(1.0, p.f + (1.0 - p.f) * t.psi[n - 1]);
        t.phi[n] = detail::ipow(t.delta[n], m);
        t.psi[n] = detail::ipow(t.epsilon[n], m);
        t.sigma[n] = std::min(1.0, detail::geometric_sum(t.delta[n], m) * r.beta);
    }
    return t;
}

/// log rho~_m(n); -inf when the accuracy is exactly 0.
inline double log_rho_rtbs(const SimplifiedParams& p, std::size_t m, std::size_t n) {
    const auto t = rtbs_table(p, m, n);
    double acc = 0.0;
    for (std::size_t k = 1; k <= n; ++k) acc += std::log(t.sigma[k]);
    return acc;
}

/// rho~_m(n) = prod_{t=1..n} sigma_m(t).
inline double rho_rtbs(const SimplifiedParams& p, std::size_t m, std::size_t n) {
    const auto t = rtbs_table(p, m, n);
    double acc = 1.0;
    for (std::size_t k = 1; k <= n; ++k) acc *= t.sigma[k];
    return acc;
}

inline double log_rho_rmtp(const SimplifiedParams& p, std::size_t n) {
    const auto r = derived_rates(p);
    if (n == 0) return 0.0;
    if (r.alpha >= 1.0 || r.beta <= 0.0) return -std::numeric_limits<double>::infinity();
    return static_cast<double>(n) * (std::log(r.beta) - std::log1p(-r.alpha));
}

/// RMTP does at least as well as no reflection iff e- + e+ <= 1.
inline bool rmtp_improves(const SimplifiedParams& p) {
    p.validate();
    return p.e_minus + p.e_plus <= 1.0;
}

/// For large enough n, RTBS beats RMTP iff f > alpha and m > 1/(1 - alpha).
inline bool rtbs_asymptotically_beats_rmtp(const SimplifiedParams& p, std::size_t m) {
    const auto r = derived_rates(p);
    if (r.alpha >= 1.0) return false;
    return p.f > r.alpha && static_cast<double>(m) > 1.0 / (1.0 - r.alpha);
}

/// Expected number of proposals to reach a correct answer under RMTP:
/// n / ((1 - mu) e+ + mu (1 - e-)).
inline double expected_solution_length(const SimplifiedParams& p, std::size_t n) {
    p.validate();
    const double denom = (1.0 - p.mu) * p.e_plus + p.mu * (1.0 - p.e_minus);
    if (denom <= 0.0) throw NoSolutionError("a correct answer is never found: (1-mu)e+ + mu(1-e-) = 0");
    return static_cast<double>(n) / denom;
}

struct WidthBand {
    double lo = 0.0;
    double hi = 0.0;  // +inf when f = 1

    bool contains(double m) const { return lo <= m && m <= hi; }
};

/// Widths m in [1/(mu(1-e-)), 1/(1-f)] make sigma_m(n) -> 1, i.e. the RTBS
/// accuracy stops dropping with scale.
inline WidthBand sigma_stability_band(const SimplifiedParams& p) {
    p.validate();
    const double b = p.mu * (1.0 - p.e_minus);
    if (b <= 0.0) throw InputError("stability band needs mu(1-e-) > 0");
    const double lo = 1.0 / b;
    const double hi = p.f >= 1.0 ? std::numeric_limits<double>::infinity() : 1.0 / (1.0 - p.f);
    if (lo > hi) throw InputError("stability band is empty: 1/(mu(1-e-)) > 1/(1-f)");
    return {lo, hi};
}

/// Smallest solution in [0, 1] of x = f + (1 - f) x^m. Equals 1 iff f >= (m-1)/m.
inline double epsilon_fixed_point(double f, std::size_t m) {
    detail::check_probability(f, "f");
    if (m < 1) throw InputError("width must be >= 1");
    if (f <= 0.0) return 0.0;
    const double md = static_cast<double>(m);
    if (f >= (md - 1.0) / md) return 1.0;
    // F(x) = f + (1-f)x^m - x is positive at x = f and negative just left of
    // its minimiser xi = (m(1-f))^{-1/(m-1)}; the root sits in [f, xi).
    const auto F = [&](double x) { return f + (1.0 - f) * detail::ipow(x, m) - x; };
    double lo = f;
    double hi = std::pow(md * (1.0 - f), -1.0 / (md - 1.0));
    for (int it = 0; it < 200 && hi - lo > 1e-15; ++it) {
        const double mid = 0.5 * (lo + hi);
        (F(mid) > 0.0 ? lo : hi) = mid;
    }
    return 0.5 * (lo + hi);
}

/// Smallest n <= n_cap with rho~_m(n) > rho~(n), compared in log space.
inline std::optional<std::size_t> first_rtbs_crossover(const SimplifiedParams& p, std::size_t m,
                                                       std::size_t n_cap) {
    const auto t = rtbs_table(p, m, n_cap);
    const auto r = derived_rates(p);
    if (r.alpha >= 1.0 || r.beta <= 0.0) return std::nullopt;
    const double step_rmtp = std::log(r.beta) - std::log1p(-r.alpha);
    double diff = 0.0;
    for (std::size_t n = 1; n <= n_cap; ++n) {
        diff += std::log(t.sigma[n]) - step_rmtp;
        if (diff > 1e-12) return n;
    }
    return std::nullopt;
}

// --- posterior-risk extension -------------------------------------------------

/// Attempt-indexed factors. Sequences are 1-based in the math and 0-based
/// here; attempts beyond a sequence's length reuse its last entry.
struct PosteriorParams {
    std::vector<double> mu;
    std::vector<double> e_minus;
    std::vector<double> e_plus;
    double f = 0.0;
    double k = 1.0;  // lower bound on beta_{i+1} / beta_i

    std::size_t length() const { return std::max({mu.size(), e_minus.size(), e_plus.size()}); }

    static double at(const std::vector<double>& v, std::size_t i) { return v[std::min(i, v.size() - 1)]; }

    double mu_at(std::size_t i) const { return at(mu, i); }
    double e_minus_at(std::size_t i) const { return at(e_minus, i); }
    double e_plus_at(std::size_t i) const { return at(e_plus, i); }

    double alpha(std::size_t i) const {
        return mu_at(i) * e_minus_at(i) + (1.0 - mu_at(i)) * (1.0 - e_plus_at(i));
    }
    double beta(std::size_t i) const { return mu_at(i) * (1.0 - e_minus_at(i)); }
    double gamma(std::size_t i) const { return (1.0 - mu_at(i)) * e_plus_at(i); }

    /// Same factors at every attempt.
    static PosteriorParams constant(const SimplifiedParams& p) { return {{p.mu}, {p.e_minus}, {p.e_plus}, p.f, 1.0}; }

    /// Probability ranges, non-empty sequences, and the monotone-risk shape
    /// (beta nonincreasing, gamma nondecreasing, k <= min beta ratio).
    void validate() const {
        if (mu.empty() || e_minus.empty() || e_plus.empty()) throw InputError("posterior sequences must be non-empty");
        for (double x : mu) detail::check_probability(x, "mu_i");
        for (double x : e_minus) detail::check_probability(x, "e_minus_i");
        for (double x : e_plus) detail::check_probability(x, "e_plus_i");
        detail::check_probability(f, "f");
        if (std::isnan(k)) throw InputError("k is NaN");
        const std::size_t L = length();
        constexpr double tol = 1e-12;
        for (std::size_t i = 0; i + 1 < L; ++i) {
            if (beta(i + 1) > beta(i) + tol) throw InputError("beta_i must be nonincreasing");
            if (gamma(i + 1) + tol < gamma(i)) throw InputError("gamma_i must be nondecreasing");
            if (beta(i) > 0.0 && k > beta(i + 1) / beta(i) + tol) throw InputError("k exceeds min beta_{i+1}/beta_i");
        }
    }
};

/// Posterior RMTP accuracy: (beta_1 + sum_{i>=2} beta_i prod_{j<i} alpha_j)^n.
/// The series stops once prod alpha_j (a bound on the tail) drops below 1e-15
/// or after 10^6 terms.
inline double posterior_rho_rmtp(const PosteriorParams& pp, std::size_t n) {
    pp.validate();
    if (n == 0) return 1.0;
    double sum = 0.0;
    double reach = 1.0;  // prod_{j<i} alpha_j
    for (std::size_t i = 0; i < 1'000'000; ++i) {
        sum += pp.beta(i) * reach;
        reach *= pp.alpha(i);
        if (reach < 1e-15) break;
    }
    return detail::ipow(std::min(1.0, sum), n);
}

struct PosteriorRtbsTable {
    std::size_t width = 0;
    std::vector<std::vector<double>> delta;  // delta[n][i], attempt i (0-based)
    std::vector<double> epsilon;
    std::vector<double> sigma;
};

inline PosteriorRtbsTable posterior_rtbs_table(const PosteriorParams& pp, std::size_t m, std::size_t n_max) {
    pp.validate();
    if (m < 1) throw InputError("RTBS width must be >= 1");
    PosteriorRtbsTable t;
    t.width = m;
    t.delta.assign(n_max + 1, std::vector<double>(m, 0.0));
    t.epsilon.assign(n_max + 1, 0.0);
    t.sigma.assign(n_max + 1, 0.0);
    const auto sigma_of = [&](const std::vector<double>& d) {
        double s = 0.0;
        double reach = 1.0;
        for (std::size_t j = 0; j < m; ++j) {
            s += pp.beta(j) * reach;
            reach *= d[j];
        }
        return std::min(1.0, s);
    };
    t.sigma[0] = sigma_of(t.delta[0]);
    for (std::size_t n = 1; n <= n_max; ++n) {
        double child_fail = 1.0;
        for (double d : t.delta[n - 1]) child_fail *= d;
        const double psi = detail::ipow(t.epsilon[n - 1], m);
        for (std::size_t i = 0; i < m; ++i)
            t.delta[n][i] = std::min(1.0, pp.alpha(i) + pp.beta(i) * child_fail + pp.gamma(i) * psi);
        t.epsilon[n] = std::min(1.0, pp.f + (1.0 - pp.f) * psi);
        t.sigma[n] = sigma_of(t.delta[n]);
    }
    return t;
}

inline double posterior_rho_rtbs(const PosteriorParams& pp, std::size_t m, std::size_t n) {
    const auto t = posterior_rtbs_table(pp, m, n);
    double acc = 1.0;
    for (std::size_t k = 1; k <= n; ++k) acc *= t.sigma[k];
    return acc;
}

/// Sufficient condition for posterior RMTP to beat no reflection:
/// e1- / (k (1 - mu_1)) + sup_i e_i+ < 1.
inline bool posterior_sufficient_condition(const PosteriorParams& pp) {
    pp.validate();
    const double mu1 = pp.mu_at(0);
    if (mu1 >= 1.0) throw InputError("posterior condition undefined for mu_1 = 1");
    if (pp.k <= 0.0) throw InputError("posterior condition needs k > 0");
    const double sup_plus = *std::max_element(pp.e_plus.begin(), pp.e_plus.end());
    return pp.e_minus_at(0) / (pp.k * (1.0 - mu1)) + sup_plus < 1.0;
}

}  // namespace reflab::theory
