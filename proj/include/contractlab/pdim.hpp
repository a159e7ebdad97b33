#pragma once

#include <algorithm>
#include <cstdint>
#include <map>
#include <utility>
#include <vector>

#include "contractlab/bounded.hpp"
#include "contractlab/model.hpp"
#include "contractlab/parallel.hpp"

namespace contractlab {

// ─── ladder types ───────────────────────────────────────────────────────

// A ladder type concentrates all structure on one outcome j: action i mixes
// outcome 0 and outcome j so that, as the payment gap t_j - t_0 climbs the
// rungs alpha_1 < alpha_2 < ..., the agent walks up exactly the actions the
// membership set S keeps affordable. The principal's utility then encodes
// membership of S — the gadget behind the shattering lower bounds.
struct LadderParams {
    std::vector<Rat> alphas;   // alpha_0 = 0 < alpha_1 < ... < alpha_ell
    int outcome = 1;           // the paying outcome j
    std::vector<int> members;  // S, a sorted subset of {1..ell}
};

namespace detail {

inline void check_ladder(const LadderParams& p, const Rewards& r, int n) {
    if (p.outcome < 1 || p.outcome >= r.m())
        throw ValidationError("ladder outcome out of range");
    if (r.values[p.outcome] < 1)
        throw ValidationError("ladder requires reward >= 1 on its outcome");
    if (p.alphas.size() < 2 || p.alphas[0] != 0)
        throw ValidationError("ladder needs alphas (0, a_1, ...) starting at 0");
    const int ell = static_cast<int>(p.alphas.size()) - 1;
    if (ell >= n) throw ValidationError("ladder needs more actions than rungs");
    for (int i = 1; i <= ell; ++i)
        if (p.alphas[i] <= p.alphas[i - 1])
            throw ValidationError("ladder alphas must increase strictly");
    if (p.alphas[ell] >= r.values[p.outcome])
        throw ValidationError("ladder alphas must stay below the outcome reward");
    for (std::size_t s = 0; s < p.members.size(); ++s) {
        if (p.members[s] < 1 || p.members[s] > ell)
            throw ValidationError("ladder member outside {1..ell}");
        if (s > 0 && p.members[s] <= p.members[s - 1])
            throw ValidationError("ladder members must be sorted and distinct");
    }
}

}  // namespace detail

// Window width used by the membership gadget: a third of the smallest rung
// gap (the segment up to the outcome reward counts as a gap), scaled by the
// headroom above the top rung. Recomputed, never stored.
inline Rat ladder_rho(const LadderParams& p, const Rewards& r) {
    if (p.alphas.size() < 2) throw ValidationError("ladder needs at least one rung");
    const int ell = static_cast<int>(p.alphas.size()) - 1;
    const Rat& rj = r.values[p.outcome];
    Rat min_gap = p.alphas[1] - p.alphas[0];
    for (int i = 2; i <= ell; ++i) {
        const Rat gap = p.alphas[i] - p.alphas[i - 1];
        if (gap < min_gap) min_gap = gap;
    }
    Rat headroom = rj - p.alphas[ell];
    if (headroom > 1) headroom = 1;
    return headroom * min_gap / 3;
}

// The ladder type itself: n actions over r.m() outcomes. Actions above the
// top rung and actions priced out of S are unavailable.
inline AgentType ladder_type(const LadderParams& p, const Rewards& r, int n) {
    detail::check_ladder(p, r, n);
    const int ell = static_cast<int>(p.alphas.size()) - 1;
    const int m = r.m();
    const int j = p.outcome;
    const Rat& rj = r.values[j];
    const Rat top = rj - p.alphas[ell];

    std::vector<std::vector<Rat>> f(n, std::vector<Rat>(m, Rat(0)));
    std::vector<Cost> c(n, Cost::inf());
    f[0][0] = 1;
    c[0] = Cost(Rat(0));

    for (int i = 1; i <= ell; ++i) {
        const Rat denom = rj - p.alphas[i];
        f[i][0] = (p.alphas[ell] - p.alphas[i]) / denom;
        f[i][j] = top / denom;
    }
    for (int i = ell + 1; i < n; ++i) f[i][0] = 1;

    // Costs telescope along the AVAILABLE actions only, anchored at the
    // idle action's true success probability (zero): consecutive available
    // actions are indifferent exactly at the higher one's alpha, so the
    // best response at payment gap t_j - t_0 is the largest member below
    // it. Anchoring at a fictitious idle output, or pricing along skipped
    // rungs, leaves members above a gap too cheap and the agent jumps up
    // to them early.
    Rat cost_acc = 0;
    Rat q_prev = 0;
    for (int s : p.members) {
        const Rat q_here = top / (rj - p.alphas[s]);
        cost_acc += p.alphas[s] * (q_here - q_prev);
        q_prev = q_here;
        c[s] = Cost(cost_acc);
    }
    return AgentType(std::move(f), std::move(c));
}

// ─── grid forcing ───────────────────────────────────────────────────────

// Uniform mixture of m single-minded types: theta^(0) can only idle, and
// theta^(j) will produce outcome j for a payment of alpha_j. An optimal
// contract must pay each outcome j exactly alpha_j and outcome 0 nothing,
// which pins the optimum to a known grid point — handy both as a worked
// optimum and as a trap for approximation schemes.
inline TypeDistribution grid_forcing_distribution(const std::vector<Rat>& alphas,
                                                  const Rewards& r, int n = 2) {
    const int m = r.m();
    if (static_cast<int>(alphas.size()) != m - 1)
        throw ValidationError("need one alpha per paying outcome");
    if (n < 2) throw ValidationError("grid forcing needs at least two actions");
    for (int j = 1; j < m; ++j) {
        if (sgn(alphas[j - 1]) < 0 || alphas[j - 1] >= r.values[j])
            throw ValidationError("alpha_j must lie in [0, r_j)");
    }

    std::vector<AgentType> support;
    {
        std::vector<std::vector<Rat>> f(n, std::vector<Rat>(m, Rat(0)));
        std::vector<Cost> c(n, Cost::inf());
        for (int i = 0; i < n; ++i) f[i][0] = 1;
        c[0] = Cost(Rat(0));
        support.push_back(AgentType(std::move(f), std::move(c)));
    }
    for (int j = 1; j < m; ++j) {
        std::vector<std::vector<Rat>> f(n, std::vector<Rat>(m, Rat(0)));
        std::vector<Cost> c(n, Cost::inf());
        f[0][0] = 1;
        c[0] = Cost(Rat(0));
        f[1][j] = 1;
        c[1] = Cost(alphas[j - 1]);
        for (int i = 2; i < n; ++i) f[i][0] = 1;
        support.push_back(AgentType(std::move(f), std::move(c)));
    }
    return TypeDistribution(std::move(support), std::vector<Rat>(m, rat(1, m)));
}

// ─── shattering instances ───────────────────────────────────────────────

struct ShatterInstance {
    Rewards rewards;
    std::vector<AgentType> types;
    std::vector<Rat> thresholds;  // one per type
    ContractSearchSpace space;    // candidate witnesses
};

// The bitmask family: (m-1) * log2(n) ladder types whose membership sets
// are the bit slices of {0..n-1}. Payments t_j = k_j/(2n) + 1/(24n) select
// rung k_j on outcome j, and the b-th bit of k_j decides whether type (j,b)
// clears its threshold — so the small witness grid shatters all the types.
inline ShatterInstance bitmask_shatter_instance(int n, int m, const Rewards& r) {
    if (n < 2 || (n & (n - 1)) != 0)
        throw ValidationError("bitmask instance needs n a power of two");
    if (r.m() != m || m < 2) throw ValidationError("bitmask instance reward mismatch");
    int bits = 0;
    while ((1 << (bits + 1)) <= n) ++bits;

    std::vector<Rat> alphas;
    for (int i = 0; i < n; ++i) alphas.push_back(rat(i, 2L * n));

    std::vector<AgentType> types;
    std::vector<Rat> thresholds;
    for (int j = 1; j < m; ++j) {
        for (int b = 1; b <= bits; ++b) {
            LadderParams p;
            p.alphas = alphas;
            p.outcome = j;
            for (int i = 1; i < n; ++i)
                if ((i >> (b - 1)) & 1) p.members.push_back(i);
            types.push_back(ladder_type(p, r, n));
            const Rat rho = ladder_rho(p, r);
            thresholds.push_back((r.values[j] - alphas[n - 1]) - rat(5, 2) * rho);
        }
    }

    // Witness grid: rung midpoints on each paying outcome, nothing on 0.
    std::vector<Contract> witnesses;
    std::vector<int> k(m - 1, 0);
    const Rat offset = rat(1, 24L * n);
    while (true) {
        std::vector<Rat> t(m, Rat(0));
        for (int j = 1; j < m; ++j) t[j] = rat(k[j - 1], 2L * n) + offset;
        witnesses.push_back(Contract(std::move(t)));
        int j = m - 2;
        while (j >= 0 && k[j] == n - 1) {
            k[j] = 0;
            --j;
        }
        if (j < 0) break;
        ++k[j];
    }

    return ShatterInstance{Rewards(r), std::move(types), std::move(thresholds),
                           ContractSearchSpace::from_contracts(std::move(witnesses))};
}

// ─── shattering verification ────────────────────────────────────────────

struct ShatterCertificate {
    bool shattered = false;
    // subset bitmask over types -> first witness realizing it
    std::map<std::uint32_t, Contract> witnesses;
};

// Exhaustive check that the witness set realizes every above/below pattern
// of the thresholds. Exact arithmetic throughout; every utility comparison
// is a rational comparison.
inline ShatterCertificate verify_shattering(const ShatterInstance& inst,
                                            std::size_t subset_cap = std::size_t{1} << 20) {
    const std::size_t k = inst.types.size();
    if (k == 0 || k > 20)
        throw ValidationError("shattering verification supports 1..20 types");
    if (inst.thresholds.size() != k)
        throw ValidationError("one threshold per type required");
    const std::size_t subsets = std::size_t{1} << k;
    if (subsets > subset_cap)
        throw ResourceCapError("subset count exceeds the configured cap");

    const std::size_t w = inst.space.size();
    std::vector<std::uint32_t> pattern(w, 0);
    parallel_for(w, [&](std::size_t c) {
        const Contract t = inst.space.contract_at(c);
        std::uint32_t bits = 0;
        for (std::size_t i = 0; i < k; ++i) {
            const Rat up = principal_utility(inst.rewards, inst.types[i], t);
            if (up >= inst.thresholds[i]) bits |= (std::uint32_t{1} << i);
        }
        pattern[c] = bits;
    });

    std::vector<std::int64_t> first(subsets, -1);
    for (std::size_t c = 0; c < w; ++c)
        if (first[pattern[c]] < 0) first[pattern[c]] = static_cast<std::int64_t>(c);

    ShatterCertificate cert;
    cert.shattered = true;
    for (std::size_t x = 0; x < subsets; ++x) {
        if (first[x] < 0) {
            cert.shattered = false;
            continue;
        }
        cert.witnesses.emplace(static_cast<std::uint32_t>(x),
                               inst.space.contract_at(static_cast<std::size_t>(first[x])));
    }
    return cert;
}

}  // namespace contractlab
