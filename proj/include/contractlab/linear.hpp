#pragma once

#include <algorithm>
#include <map>
#include <utility>
#include <vector>

#include "contractlab/model.hpp"

namespace contractlab {

// ─── reward step decomposition ──────────────────────────────────────────

// On linear contracts alpha*r the agent's utility for action i is the line
// slope_i * alpha - c_i with slope_i = f_i . r, and the principal's reward
// under action i is that same slope. The best response therefore traces the
// upper envelope of n lines, and the principal's reward is a nondecreasing
// step function of alpha whose breakpoints are the critical values.

struct RewardStep {
    Rat lo;          // piece is [lo, hi) ...
    Rat hi;          // ... or [lo, hi] when hi_closed (final piece only)
    bool hi_closed;
    Rat reward;      // principal_reward anywhere on the piece
    int action;      // the agent's best response on the piece
};

struct CriticalValueProfile {
    std::vector<Rat> breakpoints;    // strictly inside (0, 1], sorted
    std::vector<Rat> reward_levels;  // one per piece, strictly increasing
};

namespace detail {

struct EnvLine {
    Rat slope;
    Rat cost;
    int index;
};

// Upper envelope of the available actions' utility lines, clipped to [0,1).
// Returns segments in increasing alpha order; consecutive segments have
// strictly increasing slopes.
inline std::vector<RewardStep> envelope_pieces(const Rewards& r, const AgentType& theta) {
    // One line per slope: lower cost dominates, equal cost keeps the
    // smallest index (identical lines are the same action for our purposes).
    std::map<Rat, EnvLine> by_slope;
    for (int i = 0; i < theta.actions(); ++i) {
        if (theta.c[i].is_inf()) continue;
        Rat slope = dot(theta.f[i], r.values);
        const Rat& cost = theta.c[i].value();
        auto it = by_slope.find(slope);
        if (it == by_slope.end())
            by_slope.emplace(slope, EnvLine{slope, cost, i});
        else if (cost < it->second.cost)
            it->second = EnvLine{slope, cost, i};
    }
    if (by_slope.empty()) throw ValidationError("type has no available action");

    struct Seg {
        bool from_left;  // active since alpha = -infinity
        Rat start;
        EnvLine line;
    };
    std::vector<Seg> stack;
    for (auto& [slope, line] : by_slope) {
        Rat start;
        bool from_left = true;
        while (!stack.empty()) {
            const Seg& top = stack.back();
            // u_a equality: slope*a - cost = top.slope*a - top.cost
            Rat x = (line.cost - top.line.cost) / (line.slope - top.line.slope);
            if (!top.from_left && x <= top.start) {
                stack.pop_back();
                continue;
            }
            start = std::move(x);
            from_left = false;
            break;
        }
        stack.push_back(Seg{from_left, std::move(start), line});
    }

    std::vector<RewardStep> pieces;
    for (std::size_t k = 0; k < stack.size(); ++k) {
        Rat lo = stack[k].from_left ? Rat(0) : stack[k].start;
        if (lo < 0) lo = 0;
        Rat hi = (k + 1 < stack.size()) ? stack[k + 1].start : Rat(1);
        if (hi > 1) hi = 1;
        if (lo >= hi) continue;
        pieces.push_back(RewardStep{std::move(lo), std::move(hi), false,
                                    stack[k].line.slope, stack[k].line.index});
    }
    return pieces;
}

}  // namespace detail

// Partition of [0,1] into maximal intervals of constant principal reward
// under alpha*r. The point alpha = 1 is degenerate (every payment equals
// every reward, so the principal is indifferent and the tie-break chain may
// land on a higher-reward action); it gets its own closed piece if needed.
inline std::vector<RewardStep> reward_steps(const Rewards& r, const AgentType& theta) {
    if (theta.outcomes() != r.m()) throw ValidationError("type/reward outcome mismatch");
    std::vector<RewardStep> steps = detail::envelope_pieces(r, theta);

    const Contract full = linear_payments(LinearContract(Rat(1)), r);
    const int i1 = best_response(r, theta, full);
    Rat rew1 = detail::dot(theta.f[i1], r.values);
    RewardStep& last = steps.back();
    if (rew1 == last.reward) {
        last.hi_closed = true;
    } else {
        steps.push_back(RewardStep{Rat(1), Rat(1), true, std::move(rew1), i1});
    }
    return steps;
}

// Reward lookup for an alpha in [0,1].
inline const RewardStep& step_at(const std::vector<RewardStep>& steps, const Rat& alpha) {
    std::size_t lo = 0, hi = steps.size() - 1;
    while (lo < hi) {
        const std::size_t mid = (lo + hi + 1) / 2;
        if (steps[mid].lo <= alpha)
            lo = mid;
        else
            hi = mid - 1;
    }
    return steps[lo];
}

// Breakpoints of alpha -> principal_reward(theta, alpha*r), with the reward
// level on each side. At most n-1 breakpoints for n actions.
inline CriticalValueProfile critical_values(const Rewards& r, const AgentType& theta) {
    const std::vector<RewardStep> steps = reward_steps(r, theta);
    CriticalValueProfile out;
    out.reward_levels.reserve(steps.size());
    for (std::size_t k = 0; k < steps.size(); ++k) {
        if (k > 0) out.breakpoints.push_back(steps[k].lo);
        out.reward_levels.push_back(steps[k].reward);
    }
    return out;
}

// ─── epsilon grid ───────────────────────────────────────────────────────

struct EpsGrid {
    Rat eps;
    std::vector<Rat> points;  // {0, eps, 2 eps, ...} plus 1
};

inline EpsGrid eps_grid(const Rat& eps) {
    if (sgn(eps) <= 0 || eps >= 1) throw ValidationError("grid spacing must be in (0,1)");
    EpsGrid g;
    g.eps = eps;
    const Int kmax = rat_floor(1 / eps);
    for (Int k = 0; k <= kmax; ++k) g.points.push_back(Rat(k) * eps);
    if (g.points.back() != 1) g.points.push_back(Rat(1));
    return g;
}

// ─── optimization over linear contracts ─────────────────────────────────

namespace detail {

// Weighted collection of reward-step tables: evaluates the expected
// principal utility of alpha*r in O(support * log n) exact operations.
struct LinearObjective {
    std::vector<std::vector<RewardStep>> steps;
    std::vector<Rat> weights;

    Rat value(const Rat& alpha) const {
        Rat expected_reward = 0;
        for (std::size_t k = 0; k < steps.size(); ++k)
            expected_reward += weights[k] * step_at(steps[k], alpha).reward;
        return (1 - alpha) * expected_reward;
    }
};

inline LinearObjective make_objective(const Rewards& r, const TypeDistribution& d,
                                      bool skip_zero_weight) {
    LinearObjective obj;
    for (std::size_t k = 0; k < d.support.size(); ++k) {
        if (skip_zero_weight && sgn(d.weights[k]) == 0) continue;
        obj.steps.push_back(reward_steps(r, d.support[k]));
        obj.weights.push_back(d.weights[k]);
    }
    return obj;
}

// Smallest maximizer over an ascending candidate list.
inline std::pair<LinearContract, Rat> argmax_over(const LinearObjective& obj,
                                                  const std::vector<Rat>& candidates) {
    Rat best_alpha = candidates.front();
    Rat best_value = obj.value(best_alpha);
    for (std::size_t i = 1; i < candidates.size(); ++i) {
        Rat v = obj.value(candidates[i]);
        if (v > best_value) {
            best_value = std::move(v);
            best_alpha = candidates[i];
        }
    }
    return {LinearContract(std::move(best_alpha)), std::move(best_value)};
}

}  // namespace detail

// Exact optimum over all linear contracts. The objective is
// (1-alpha) * sum_k w_k R_k(alpha) with each R_k a nondecreasing step
// function, so on each piece of the merged step function the objective
// decreases in alpha; the left endpoints {0} + merged breakpoints form a
// complete candidate set.
inline std::pair<LinearContract, Rat> opt_linear(const Rewards& r, const TypeDistribution& d) {
    detail::LinearObjective obj = detail::make_objective(r, d, /*skip_zero_weight=*/true);
    std::vector<Rat> candidates{Rat(0)};
    for (const auto& st : obj.steps)
        for (std::size_t k = 1; k < st.size(); ++k) candidates.push_back(st[k].lo);
    std::sort(candidates.begin(), candidates.end());
    candidates.erase(std::unique(candidates.begin(), candidates.end()), candidates.end());
    return detail::argmax_over(obj, candidates);
}

// Exact optimum over the multiples of eps (plus 1). Within eps of the full
// linear optimum whenever rewards stay in [0, 1].
inline std::pair<LinearContract, Rat> opt_linear_grid(const Rewards& r,
                                                      const TypeDistribution& d,
                                                      const Rat& eps) {
    detail::LinearObjective obj = detail::make_objective(r, d, /*skip_zero_weight=*/true);
    return detail::argmax_over(obj, eps_grid(eps).points);
}

// Search mode for the linear learner: the exact critical-value candidate
// set, or a fixed epsilon grid.
struct LinearSearchMode {
    enum class Kind { critical, grid } kind;
    Rat eps;  // grid spacing, used by Kind::grid only

    static LinearSearchMode critical() { return {Kind::critical, Rat(0)}; }
    static LinearSearchMode grid(Rat eps) { return {Kind::grid, std::move(eps)}; }
};

// Deduplicate a sample multiset into an exact empirical distribution.
inline TypeDistribution empirical_distribution(const std::vector<AgentType>& samples) {
    if (samples.empty()) throw ValidationError("empty sample multiset");
    std::map<AgentType, long, TypeLess> counts;
    for (const AgentType& s : samples) ++counts[s];
    std::vector<AgentType> support;
    std::vector<Rat> weights;
    const long n = static_cast<long>(samples.size());
    for (auto& [type, count] : counts) {
        support.push_back(type);
        weights.push_back(rat(count, n));
    }
    return TypeDistribution(std::move(support), std::move(weights));
}

// Empirical risk minimization over linear contracts: maximizes the sample
// average of the principal's utility; ties go to the smallest alpha.
inline std::pair<LinearContract, Rat> erm_linear(const std::vector<AgentType>& samples,
                                                 const Rewards& r,
                                                 const LinearSearchMode& mode) {
    const TypeDistribution emp = empirical_distribution(samples);
    detail::LinearObjective obj = detail::make_objective(r, emp, /*skip_zero_weight=*/false);
    std::vector<Rat> candidates;
    if (mode.kind == LinearSearchMode::Kind::critical) {
        candidates.push_back(Rat(0));
        for (const auto& st : obj.steps)
            for (std::size_t k = 1; k < st.size(); ++k) candidates.push_back(st[k].lo);
        std::sort(candidates.begin(), candidates.end());
        candidates.erase(std::unique(candidates.begin(), candidates.end()), candidates.end());
    } else {
        candidates = eps_grid(mode.eps).points;
    }
    return detail::argmax_over(obj, candidates);
}

}  // namespace contractlab
