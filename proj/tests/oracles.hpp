#pragma once

// Reference implementations used only by the test suite. Everything here is
// written as a direct transcription of the definitions — exhaustive scans,
// pairwise crossings, three separate tie passes — sharing no code path with
// the library's optimized versions, so agreement is meaningful evidence.

#include <algorithm>
#include <cstdint>
#include <limits>
#include <optional>
#include <utility>
#include <vector>

#include "contractlab/contractlab.hpp"

namespace oracles {

using namespace contractlab;

// Best response in three explicit passes: max agent utility, then max
// principal utility among the agent's argmax, then the smallest index.
inline int naive_best_response(const Rewards& r, const AgentType& theta, const Contract& t) {
    std::vector<std::optional<Rat>> ua(theta.actions());
    for (int i = 0; i < theta.actions(); ++i) ua[i] = agent_utility(theta, t, i);

    std::optional<Rat> best_ua;
    for (const auto& u : ua)
        if (u && (!best_ua || *u > *best_ua)) best_ua = *u;
    if (!best_ua) throw ValidationError("type has no available action");

    std::vector<int> argmax;
    for (int i = 0; i < theta.actions(); ++i)
        if (ua[i] && *ua[i] == *best_ua) argmax.push_back(i);

    Rat best_up = principal_action_utility(r, theta, t, argmax.front());
    for (std::size_t k = 1; k < argmax.size(); ++k) {
        const Rat up = principal_action_utility(r, theta, t, argmax[k]);
        if (up > best_up) best_up = up;
    }
    for (int i : argmax)
        if (principal_action_utility(r, theta, t, i) == best_up) return i;
    return argmax.front();
}

inline Rat naive_expected_utility(const Rewards& r, const TypeDistribution& d,
                                  const Contract& t) {
    Rat total = 0;
    for (std::size_t k = 0; k < d.support.size(); ++k) {
        const int i = naive_best_response(r, d.support[k], t);
        total += d.weights[k] * principal_action_utility(r, d.support[k], t, i);
    }
    return total;
}

// Exhaustive exact scan over a contract set, lexicographic tie-break.
inline std::pair<Contract, Rat> naive_opt_over_set(const Rewards& r,
                                                   const TypeDistribution& d,
                                                   const ContractSearchSpace& space) {
    Contract best = space.contract_at(0);
    Rat best_value = naive_expected_utility(r, d, best);
    for (std::size_t i = 1; i < space.size(); ++i) {
        Contract c = space.contract_at(i);
        Rat v = naive_expected_utility(r, d, c);
        if (v > best_value || (v == best_value && payments_less(c.t, best.t))) {
            best = std::move(c);
            best_value = std::move(v);
        }
    }
    return {std::move(best), std::move(best_value)};
}

// Critical values from pairwise line crossings: every breakpoint of the
// principal-reward step function must be a crossing of two action lines (or
// the endpoint 1), so it suffices to test, at each candidate, whether the
// reward sampled between consecutive candidates changes.
inline std::vector<Rat> naive_critical_values(const Rewards& r, const AgentType& theta) {
    std::vector<std::pair<Rat, Rat>> lines;  // (slope, cost) of available actions
    for (int i = 0; i < theta.actions(); ++i) {
        if (theta.c[i].is_inf()) continue;
        Rat slope = 0;
        for (int j = 0; j < r.m(); ++j) slope += theta.f[i][j] * r.values[j];
        lines.emplace_back(std::move(slope), theta.c[i].value());
    }

    std::vector<Rat> cands{Rat(0), Rat(1)};
    for (std::size_t a = 0; a < lines.size(); ++a)
        for (std::size_t b = a + 1; b < lines.size(); ++b) {
            if (lines[a].first == lines[b].first) continue;
            Rat x = (lines[b].second - lines[a].second) / (lines[b].first - lines[a].first);
            if (sgn(x) > 0 && x < 1) cands.push_back(std::move(x));
        }
    std::sort(cands.begin(), cands.end());
    cands.erase(std::unique(cands.begin(), cands.end()), cands.end());

    const auto reward_at = [&](const Rat& alpha) {
        const Contract t = linear_payments(LinearContract(alpha), r);
        const int i = naive_best_response(r, theta, t);
        Rat rew = 0;
        for (int j = 0; j < r.m(); ++j) rew += theta.f[i][j] * r.values[j];
        return rew;
    };

    std::vector<Rat> breakpoints;
    Rat prev = reward_at(cands[0] / 2 + cands[1] / 2);
    for (std::size_t k = 1; k + 1 < cands.size(); ++k) {
        Rat here = reward_at(cands[k] / 2 + cands[k + 1] / 2);
        if (here != prev) breakpoints.push_back(cands[k]);
        prev = std::move(here);
    }
    if (reward_at(Rat(1)) != prev) breakpoints.push_back(Rat(1));
    return breakpoints;
}

// The documented subset order, spelled out bit by bit: the lowest element
// on which the sets differ decides, and the set containing it comes first.
inline bool naive_subset_less(std::uint32_t a, std::uint32_t b) {
    for (int bit = 0; bit < 32; ++bit) {
        const std::uint32_t mask = std::uint32_t{1} << bit;
        if ((a & mask) != (b & mask)) return (a & mask) != 0;
    }
    return false;
}

// Demand by exhaustive scan with the three-pass tie chain.
inline std::uint32_t naive_demand(const CombinatorialType& theta, const Rat& alpha) {
    const std::uint32_t total = std::uint32_t{1} << theta.ground;
    std::vector<Rat> reward(total), utility(total);
    for (std::uint32_t s = 0; s < total; ++s) {
        const std::vector<Rat> dist = theta.outcome_dist(s);
        Rat rew = 0;
        for (std::size_t j = 0; j < dist.size(); ++j)
            rew += dist[j] * theta.rewards.values[j];
        utility[s] = alpha * rew - theta.cost(s);
        reward[s] = std::move(rew);
    }
    Rat best_u = utility[0];
    for (std::uint32_t s = 1; s < total; ++s)
        if (utility[s] > best_u) best_u = utility[s];
    Rat best_r(-1);
    for (std::uint32_t s = 0; s < total; ++s)
        if (utility[s] == best_u && reward[s] > best_r) best_r = reward[s];
    std::uint32_t best_s = 0;
    bool have = false;
    for (std::uint32_t s = 0; s < total; ++s) {
        if (utility[s] != best_u || reward[s] != best_r) continue;
        if (!have || naive_subset_less(s, best_s)) {
            best_s = s;
            have = true;
        }
    }
    return best_s;
}

// Breakpoints of alpha -> r . f(demand(alpha)) from pairwise subset-line
// crossings, reward sampled between candidates. Exponential in the ground
// size; fine for the small instances the unit tests draw.
inline std::vector<Rat> naive_comb_breakpoints(const CombinatorialType& theta) {
    const std::uint32_t total = std::uint32_t{1} << theta.ground;
    std::vector<Rat> reward(total), cost(total);
    for (std::uint32_t s = 0; s < total; ++s) {
        const std::vector<Rat> dist = theta.outcome_dist(s);
        Rat rew = 0;
        for (std::size_t j = 0; j < dist.size(); ++j)
            rew += dist[j] * theta.rewards.values[j];
        reward[s] = std::move(rew);
        cost[s] = theta.cost(s);
    }

    std::vector<Rat> cands{Rat(0), Rat(1)};
    for (std::uint32_t a = 0; a < total; ++a)
        for (std::uint32_t b = a + 1; b < total; ++b) {
            if (reward[a] == reward[b]) continue;
            Rat x = (cost[b] - cost[a]) / (reward[b] - reward[a]);
            if (sgn(x) > 0 && x < 1) cands.push_back(std::move(x));
        }
    std::sort(cands.begin(), cands.end());
    cands.erase(std::unique(cands.begin(), cands.end()), cands.end());

    std::vector<Rat> breakpoints;
    Rat prev = reward[naive_demand(theta, cands[0] / 2 + cands[1] / 2)];
    for (std::size_t k = 1; k + 1 < cands.size(); ++k) {
        Rat here = reward[naive_demand(theta, cands[k] / 2 + cands[k + 1] / 2)];
        if (here != prev) breakpoints.push_back(cands[k]);
        prev = std::move(here);
    }
    // Ties break toward the higher-reward subset, so a steeper line that
    // catches up exactly at alpha = 1 takes over in that single point — a
    // final breakpoint at 1, just like the matrix setting.
    if (reward[naive_demand(theta, Rat(1))] != prev) breakpoints.push_back(Rat(1));
    return breakpoints;
}

// Exact upper envelope of subset utility lines via a slope-sorted stack —
// independent of the query recursion, cheap enough for larger ground sets.
inline std::vector<Rat> envelope_comb_breakpoints(const CombinatorialType& theta) {
    const std::uint32_t total = std::uint32_t{1} << theta.ground;
    // Dedup by slope, keep min cost.
    std::vector<std::pair<Rat, Rat>> lines;  // (reward slope, cost), sorted
    for (std::uint32_t s = 0; s < total; ++s) {
        const std::vector<Rat> dist = theta.outcome_dist(s);
        Rat rew = 0;
        for (std::size_t j = 0; j < dist.size(); ++j)
            rew += dist[j] * theta.rewards.values[j];
        lines.emplace_back(std::move(rew), theta.cost(s));
    }
    std::sort(lines.begin(), lines.end(), [](const auto& a, const auto& b) {
        if (a.first != b.first) return a.first < b.first;
        return a.second < b.second;
    });
    std::vector<std::pair<Rat, Rat>> dedup;
    for (auto& l : lines)
        if (dedup.empty() || dedup.back().first != l.first) dedup.push_back(std::move(l));

    struct Seg {
        Rat start;
        bool from_left;
        std::pair<Rat, Rat> line;
    };
    std::vector<Seg> stack;
    for (auto& line : dedup) {
        Rat start;
        bool from_left = true;
        while (!stack.empty()) {
            const Seg& top = stack.back();
            Rat x = (line.second - top.line.second) / (line.first - top.line.first);
            if (!top.from_left && x <= top.start) {
                stack.pop_back();
                continue;
            }
            start = std::move(x);
            from_left = false;
            break;
        }
        stack.push_back(Seg{std::move(start), from_left, std::move(line)});
    }

    std::vector<Rat> breakpoints;
    for (const Seg& seg : stack)
        if (!seg.from_left && sgn(seg.start) > 0 && seg.start <= 1)
            breakpoints.push_back(seg.start);
    std::sort(breakpoints.begin(), breakpoints.end());
    return breakpoints;
}

}  // namespace oracles
