#pragma once

#include <algorithm>
#include <cmath>
#include <cstdint>
#include <set>
#include <utility>
#include <vector>

#include "contractlab/bounded.hpp"
#include "contractlab/linear.hpp"
#include "contractlab/model.hpp"
#include "contractlab/rng.hpp"

namespace contractlab {

// Follow-the-leader against an i.i.d. type stream: each round plays the ERM
// contract of the observed prefix. Round 1 has no data and plays the zero
// contract.
struct FtlLearner {
    enum class Kind { critical_linear, grid } kind = Kind::critical_linear;
    const ContractSearchSpace* space = nullptr;  // Kind::grid only

    static FtlLearner critical_linear() { return {Kind::critical_linear, nullptr}; }
    static FtlLearner grid(const ContractSearchSpace& s) { return {Kind::grid, &s}; }
};

struct OnlineRound {
    Contract contract;       // what the learner played
    std::size_t type_index;  // which support type was drawn
    Rat utility;             // realized principal utility
};

struct OnlineRun {
    std::size_t T = 0;
    std::vector<OnlineRound> per_round;
    Rat opt_value;  // exact OPT over the learner's contract class
    std::vector<Rat> cumulative_regret;
};

// One online run. Regret is measured against the exact optimum of the
// learner's own contract class on the true distribution: after round i the
// cumulative regret is (i+1) * opt_value - sum of realized utilities. All
// bookkeeping is exact; only the type draws use the pseudo-random stream.
inline OnlineRun ftl_run(const Rewards& r, const TypeDistribution& d,
                         const FtlLearner& learner, std::size_t T, std::uint64_t seed) {
    if (T < 1) throw ValidationError("online run needs T >= 1");
    if (learner.kind == FtlLearner::Kind::grid) {
        if (learner.space == nullptr) throw ValidationError("grid learner needs a space");
        if (learner.space->m() != r.m())
            throw ValidationError("search space/reward outcome mismatch");
    }

    OnlineRun run;
    run.T = T;
    run.per_round.reserve(T);
    run.cumulative_regret.reserve(T);
    run.opt_value = learner.kind == FtlLearner::Kind::critical_linear
                        ? opt_linear(r, d).second
                        : opt_over_set(r, d, *learner.space, Rat(0)).second;

    // Prefix state: per-support-type draw counts plus, for the linear
    // learner, each seen type's reward steps and critical values.
    std::vector<long> counts(d.support.size(), 0);
    std::vector<std::vector<RewardStep>> steps(d.support.size());
    std::vector<Rat> candidates{Rat(0)};

    const auto erm_on_prefix = [&]() -> Contract {
        if (learner.kind == FtlLearner::Kind::critical_linear) {
            Rat best_alpha, best_objective;
            bool have = false;
            for (const Rat& alpha : candidates) {
                Rat expected_reward = 0;
                for (std::size_t k = 0; k < counts.size(); ++k) {
                    if (counts[k] == 0) continue;
                    expected_reward += Rat(counts[k]) * step_at(steps[k], alpha).reward;
                }
                Rat objective = (1 - alpha) * expected_reward;
                if (!have || objective > best_objective) {
                    best_alpha = alpha;
                    best_objective = std::move(objective);
                    have = true;
                }
            }
            return linear_payments(LinearContract(best_alpha), r);
        }
        std::vector<AgentType> support;
        std::vector<Rat> weights;
        long total = 0;
        for (long c : counts) total += c;
        for (std::size_t k = 0; k < counts.size(); ++k) {
            if (counts[k] == 0) continue;
            support.push_back(d.support[k]);
            weights.push_back(rat(counts[k], total));
        }
        return opt_over_set(r, TypeDistribution(std::move(support), std::move(weights)),
                            *learner.space, Rat(0))
            .first;
    };

    Rng rng(seed);
    WeightedSampler sampler(d.weights);
    Rat realized_total = 0;
    for (std::size_t round = 0; round < T; ++round) {
        Contract play = round == 0 ? zero_contract(r.m()) : erm_on_prefix();
        const std::size_t drawn = sampler.draw(rng);
        Rat utility = principal_utility(r, d.support[drawn], play);
        realized_total += utility;
        run.cumulative_regret.push_back(Rat(static_cast<long>(round + 1)) * run.opt_value -
                                        realized_total);
        run.per_round.push_back(OnlineRound{std::move(play), drawn, std::move(utility)});

        if (counts[drawn] == 0 && learner.kind == FtlLearner::Kind::critical_linear) {
            steps[drawn] = reward_steps(r, d.support[drawn]);
            for (std::size_t p = 1; p < steps[drawn].size(); ++p) {
                const Rat& b = steps[drawn][p].lo;
                auto it = std::lower_bound(candidates.begin(), candidates.end(), b);
                if (it == candidates.end() || *it != b) candidates.insert(it, b);
            }
        }
        ++counts[drawn];
    }
    return run;
}

// ─── aggregation across seeds ───────────────────────────────────────────

struct RegretSummary {
    std::vector<std::size_t> checkpoints;
    std::vector<Rat> mean_regret;  // exact mean of cumulative regret
    double slope = 0;              // least-squares slope of log mean vs log T
};

// Mean cumulative regret at each checkpoint plus the fitted growth
// exponent. Checkpoints with zero (or negative) mean regret cannot enter a
// log-log fit and are skipped; fewer than two usable points yield slope 0.
inline RegretSummary regret_summary(const std::vector<OnlineRun>& runs,
                                    const std::vector<std::size_t>& checkpoints) {
    if (runs.empty()) throw ValidationError("no runs to summarize");
    for (const std::size_t cp : checkpoints) {
        if (cp < 1) throw ValidationError("checkpoints are 1-based round counts");
        for (const OnlineRun& run : runs)
            if (cp > run.T) throw ValidationError("checkpoint beyond run horizon");
    }

    RegretSummary out;
    out.checkpoints = checkpoints;
    const Rat n(static_cast<long>(runs.size()));
    for (const std::size_t cp : checkpoints) {
        Rat total = 0;
        for (const OnlineRun& run : runs) total += run.cumulative_regret[cp - 1];
        out.mean_regret.push_back(total / n);
    }

    double sx = 0, sy = 0, sxx = 0, sxy = 0;
    int pts = 0;
    for (std::size_t i = 0; i < checkpoints.size(); ++i) {
        if (sgn(out.mean_regret[i]) <= 0) continue;
        const double x = std::log(static_cast<double>(checkpoints[i]));
        const double y = std::log(rat_d(out.mean_regret[i]));
        sx += x;
        sy += y;
        sxx += x * x;
        sxy += x * y;
        ++pts;
    }
    if (pts >= 2 && sxx * pts - sx * sx > 0)
        out.slope = (sxy * pts - sx * sy) / (sxx * pts - sx * sx);
    return out;
}

}  // namespace contractlab
