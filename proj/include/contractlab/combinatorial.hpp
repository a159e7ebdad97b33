#pragma once

#include <cstdint>
#include <functional>
#include <utility>
#include <vector>

#include "contractlab/linear.hpp"
#include "contractlab/model.hpp"

namespace contractlab {

// ─── combinatorial agent types ──────────────────────────────────────────

// The agent picks a subset of ground items instead of a single action.
// Success and cost are set functions, supplied as evaluators so families
// beyond the built-ins can be plugged in. Subsets are bitmasks over the
// ground set; the ground size is capped so exhaustive demand stays finite.
struct CombinatorialType {
    enum class Family { additive, coverage_submodular, supermodular_cost, custom };

    int ground = 0;
    Rewards rewards;
    Family family = Family::custom;
    std::function<std::vector<Rat>(std::uint32_t)> outcome_dist;  // f(S), row-stochastic
    std::function<Rat(std::uint32_t)> cost;                       // c(S) >= 0, c(0) == 0
};

// Lexicographic order on subsets viewed as sorted index lists: the lowest
// differing element decides, i.e. the lowest set bit of a XOR b.
inline bool subset_lex_less(std::uint32_t a, std::uint32_t b) {
    const std::uint32_t x = a ^ b;
    if (x == 0) return false;
    const std::uint32_t low = x & (~x + 1);
    return (a & low) != 0;
}

namespace detail {

inline void check_comb(const CombinatorialType& theta) {
    if (theta.ground < 1 || theta.ground > 20)
        throw ValidationError("ground set size must be in 1..20");
    if (!theta.outcome_dist || !theta.cost)
        throw ValidationError("combinatorial type needs both evaluators");
}

struct CombLine {
    Rat reward;  // r . f(S): both the slope of the agent's utility in alpha
                 // and the principal's reward from S
    Rat cost;

    friend bool operator==(const CombLine& a, const CombLine& b) {
        return a.reward == b.reward && a.cost == b.cost;
    }
};

inline CombLine comb_line(const CombinatorialType& theta, std::uint32_t s) {
    const std::vector<Rat> dist = theta.outcome_dist(s);
    if (static_cast<int>(dist.size()) != theta.rewards.m())
        throw ValidationError("outcome evaluator dimension mismatch");
    Rat sum = 0, reward = 0;
    for (std::size_t j = 0; j < dist.size(); ++j) {
        if (sgn(dist[j]) < 0) throw ValidationError("negative outcome probability");
        sum += dist[j];
        reward += dist[j] * theta.rewards.values[j];
    }
    if (sum != 1) throw ValidationError("outcome evaluator row does not sum to 1");
    Rat c = theta.cost(s);
    if (sgn(c) < 0) throw ValidationError("negative subset cost");
    return CombLine{std::move(reward), std::move(c)};
}

}  // namespace detail

// The agent's demand at a linear contract alpha*r: the subset maximizing
// alpha * (r . f(S)) - c(S). Ties prefer the higher principal reward, then
// the lexicographically smallest subset. Stateless and safe to call
// concurrently.
inline std::uint32_t demand(const CombinatorialType& theta, const Rat& alpha) {
    detail::check_comb(theta);
    const std::uint32_t total = std::uint32_t{1} << theta.ground;
    std::uint32_t best = 0;
    detail::CombLine best_line = detail::comb_line(theta, 0);
    Rat best_u = alpha * best_line.reward - best_line.cost;
    for (std::uint32_t s = 1; s < total; ++s) {
        detail::CombLine line = detail::comb_line(theta, s);
        Rat u = alpha * line.reward - line.cost;
        const int cu = cmp(u, best_u);
        if (cu < 0) continue;
        if (cu == 0) {
            const int cr = cmp(line.reward, best_line.reward);
            if (cr < 0) continue;
            if (cr == 0 && !subset_lex_less(s, best)) continue;
        }
        best = s;
        best_line = std::move(line);
        best_u = std::move(u);
    }
    return best;
}

using DemandOracle = std::function<std::uint32_t(const CombinatorialType&, const Rat&)>;

// ─── critical values via demand queries ─────────────────────────────────

namespace detail {

struct CombEnvelope {
    const CombinatorialType& theta;
    const DemandOracle& oracle;
    std::size_t queries = 0;
    std::vector<Rat> breakpoints;

    std::pair<std::uint32_t, CombLine> query(const Rat& alpha) {
        ++queries;
        const std::uint32_t s = oracle(theta, alpha);
        return {s, comb_line(theta, s)};
    }

    // Invariant: lo_line and hi_line are the demanded utility lines at the
    // interval's endpoints and they differ. Between two adjacent envelope
    // pieces no third line can interfere below the crossing point, so a
    // crossing whose demanded line matches an endpoint is a breakpoint.
    void recurse(const Rat& lo, const CombLine& lo_line, const Rat& hi,
                 const CombLine& hi_line) {
        if (hi_line.reward <= lo_line.reward)
            throw ValidationError("demand oracle violated the envelope order");
        Rat x = (hi_line.cost - lo_line.cost) / (hi_line.reward - lo_line.reward);
        if (x <= lo || x > hi)
            throw ValidationError("demand oracle produced an out-of-range crossing");
        auto [s_x, x_line] = query(x);
        (void)s_x;
        if (x_line == lo_line || x_line == hi_line) {
            breakpoints.push_back(std::move(x));
            return;
        }
        recurse(lo, lo_line, x, x_line);
        recurse(x, x_line, hi, hi_line);
    }
};

}  // namespace detail

// All breakpoints of alpha -> r . f(demand(alpha)) on [0,1], found with
// O(#breakpoints) demand queries (at most 4*#breakpoints + 2). Exact: the
// crossing of two known utility lines is a rational.
inline std::vector<Rat> critical_values_comb(const CombinatorialType& theta,
                                             const DemandOracle& oracle,
                                             std::size_t* query_count = nullptr) {
    detail::CombEnvelope env{theta, oracle, 0, {}};
    auto [s0, line0] = env.query(Rat(0));
    auto [s1, line1] = env.query(Rat(1));
    (void)s0;
    (void)s1;
    if (!(line0 == line1)) env.recurse(Rat(0), line0, Rat(1), line1);
    if (query_count) *query_count = env.queries;
    std::sort(env.breakpoints.begin(), env.breakpoints.end());
    env.breakpoints.erase(std::unique(env.breakpoints.begin(), env.breakpoints.end()),
                          env.breakpoints.end());
    return env.breakpoints;
}

// ERM over linear contracts for combinatorial samples: candidates are 0 and
// every sample's critical values; the empirical objective at alpha is the
// sample mean of (1 - alpha) * (r . f(demand(alpha))). Ties to smallest
// alpha.
inline std::pair<LinearContract, Rat> erm_linear_comb(
    const std::vector<CombinatorialType>& samples, const Rewards& r,
    const DemandOracle& oracle) {
    if (samples.empty()) throw ValidationError("empty sample multiset");
    for (const CombinatorialType& s : samples)
        if (s.rewards.values != r.values)
            throw ValidationError("sample rewards disagree with r");

    std::vector<Rat> candidates{Rat(0)};
    for (const CombinatorialType& s : samples) {
        std::vector<Rat> cv = critical_values_comb(s, oracle);
        candidates.insert(candidates.end(), cv.begin(), cv.end());
    }
    std::sort(candidates.begin(), candidates.end());
    candidates.erase(std::unique(candidates.begin(), candidates.end()), candidates.end());

    const Rat n(static_cast<long>(samples.size()));
    Rat best_alpha = candidates.front();
    Rat best_value;
    bool have = false;
    for (const Rat& alpha : candidates) {
        Rat mean = 0;
        for (const CombinatorialType& s : samples) {
            const std::uint32_t d = oracle(s, alpha);
            mean += detail::comb_line(s, d).reward;
        }
        Rat value = (1 - alpha) * mean / n;
        if (!have || value > best_value) {
            best_alpha = alpha;
            best_value = std::move(value);
            have = true;
        }
    }
    return {LinearContract(std::move(best_alpha)), std::move(best_value)};
}

// ─── built-in families ──────────────────────────────────────────────────

enum class SuccessKind { additive, coverage };
enum class CostKind { additive, supermodular };

// Binary-outcome type over rewards (0, r1): the success probability of S is
//   additive:  min(1, sum q_i)          coverage:  1 - prod (1 - q_i)
// and its cost is sum w_i (additive) or (sum w_i)^2 (supermodular).
inline CombinatorialType make_comb_type(SuccessKind success, const std::vector<Rat>& q,
                                        CostKind cost, const std::vector<Rat>& w,
                                        const Rewards& r) {
    const int n = static_cast<int>(q.size());
    if (n < 1 || n > 20) throw ValidationError("ground set size must be in 1..20");
    if (w.size() != q.size()) throw ValidationError("q/w size mismatch");
    if (r.m() != 2) throw ValidationError("built-in families are binary outcome");
    for (const Rat& qi : q)
        if (sgn(qi) < 0 || qi > 1) throw ValidationError("q_i must lie in [0,1]");
    for (const Rat& wi : w)
        if (sgn(wi) < 0) throw ValidationError("w_i must be nonnegative");

    CombinatorialType type{n, r, CombinatorialType::Family::custom, nullptr, nullptr};
    if (success == SuccessKind::additive && cost == CostKind::additive)
        type.family = CombinatorialType::Family::additive;
    else if (success == SuccessKind::coverage && cost == CostKind::additive)
        type.family = CombinatorialType::Family::coverage_submodular;
    else if (success == SuccessKind::additive && cost == CostKind::supermodular)
        type.family = CombinatorialType::Family::supermodular_cost;

    type.outcome_dist = [success, q, n](std::uint32_t s) {
        Rat p;
        if (success == SuccessKind::additive) {
            p = 0;
            for (int i = 0; i < n; ++i)
                if (s & (std::uint32_t{1} << i)) p += q[i];
            if (p > 1) p = 1;
        } else {
            Rat miss = 1;
            for (int i = 0; i < n; ++i)
                if (s & (std::uint32_t{1} << i)) miss *= 1 - q[i];
            p = 1 - miss;
        }
        return std::vector<Rat>{1 - p, p};
    };
    type.cost = [cost, w, n](std::uint32_t s) {
        Rat total = 0;
        for (int i = 0; i < n; ++i)
            if (s & (std::uint32_t{1} << i)) total += w[i];
        if (cost == CostKind::supermodular) total *= total;
        return total;
    };
    return type;
}

// Family-tag front end over make_comb_type.
inline CombinatorialType make_type(CombinatorialType::Family family,
                                   const std::vector<Rat>& q, const std::vector<Rat>& w,
                                   const Rewards& r) {
    switch (family) {
        case CombinatorialType::Family::additive:
            return make_comb_type(SuccessKind::additive, q, CostKind::additive, w, r);
        case CombinatorialType::Family::coverage_submodular:
            return make_comb_type(SuccessKind::coverage, q, CostKind::additive, w, r);
        case CombinatorialType::Family::supermodular_cost:
            return make_comb_type(SuccessKind::additive, q, CostKind::supermodular, w, r);
        default:
            throw ValidationError("custom family needs explicit evaluators");
    }
}

}  // namespace contractlab
