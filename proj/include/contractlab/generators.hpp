#pragma once

#include <cmath>
#include <utility>
#include <vector>

#include "contractlab/io.hpp"
#include "contractlab/pdim.hpp"
#include "contractlab/rng.hpp"

namespace contractlab {

// ─── hard linear pairs ──────────────────────────────────────────────────
//
// Two binary-outcome types that agree everywhere except on the zero-cost
// action. Shifting 4*eps of mass between them moves the optimum from the
// interior critical value to 0, yet any single sample set looks nearly
// identical — the workhorse for sample-complexity floors.

namespace detail {

inline std::pair<AgentType, AgentType> hard_pair() {
    const Rat half = rat(1, 2);
    AgentType theta1({{half, half}, {half, half}}, {Cost(Rat(0)), Cost(rat(1, 4))});
    AgentType theta2({{Rat(1), Rat(0)}, {half, half}}, {Cost(Rat(0)), Cost(rat(1, 4))});
    return {std::move(theta1), std::move(theta2)};
}

}  // namespace detail

inline Instance gen_d1_linear(const Rat& eps) {
    if (sgn(eps) <= 0 || eps > rat(1, 8))
        throw ValidationError("hard pair needs eps in (0, 1/8]");
    auto [theta1, theta2] = detail::hard_pair();
    Instance inst{Rewards({Rat(0), Rat(1)}), {std::move(theta1), std::move(theta2)},
                  std::nullopt, std::nullopt, std::nullopt, {}};
    inst.weights = {rat(1, 2) - 4 * eps, rat(1, 2) + 4 * eps};
    return inst;
}

// Same support, the 4*eps tilt flipped toward the first type.
inline Instance gen_d2_linear(const Rat& eps) {
    Instance inst = gen_d1_linear(eps);
    std::swap((*inst.weights)[0], (*inst.weights)[1]);
    return inst;
}

// One hard pair per paying outcome, tilt direction chosen by z in {-1,+1}^(m-1).
// The optimal bounded contract must get every coordinate right, which is what
// drives the m/eps^2 floor.
inline Instance gen_dz_bounded(int m, const Rat& eps, const std::vector<int>& z) {
    if (m < 2) throw ValidationError("need at least two outcomes");
    if (static_cast<int>(z.size()) != m - 1)
        throw ValidationError("need one sign per paying outcome");
    if (sgn(eps) <= 0 || eps > rat(1, 16))
        throw ValidationError("tilted family needs eps in (0, 1/16]");
    for (int s : z)
        if (s != 1 && s != -1) throw ValidationError("signs must be +1 or -1");

    std::vector<Rat> rewards(m, Rat(1));
    rewards[0] = 0;
    Instance inst{Rewards(std::move(rewards)), {}, std::vector<Rat>{}, std::nullopt,
                  std::nullopt, {}};

    const Rat half = rat(1, 2);
    const Rat block = rat(1, 2L * (m - 1));
    for (int j = 1; j < m; ++j) {
        std::vector<Rat> split(m, Rat(0)), idle(m, Rat(0));
        split[0] = half;
        split[j] = half;
        idle[0] = 1;
        // theta1: both actions split mass; theta2: the free action idles.
        inst.types.push_back(
            AgentType({split, split}, {Cost(Rat(0)), Cost(rat(1, 4))}));
        inst.types.push_back(
            AgentType({idle, split}, {Cost(Rat(0)), Cost(rat(1, 4))}));
        const Rat tilt = 16 * eps * z[j - 1];
        inst.weights->push_back(block * (1 - tilt));
        inst.weights->push_back(block * (1 + tilt));
    }
    return inst;
}

// ─── unbounded-payment separation ───────────────────────────────────────
//
// A two-type, three-outcome family where one contract with a payment of
// 1/(4*eta) > 1 earns 3/4 - eta from the likely type, while every contract
// capped at 1 loses the expensive action entirely. Sampling misses the
// rare second type with probability q^K, so K samples cannot tell the
// distributions apart.

struct ImpossibilityInstance {
    Instance instance;
    Rat q;            // per-sample miss probability, q^K = delta
    Rat eta;          // success probability of the expensive action
    Contract t_star;  // the unbounded witness contract
};

inline ImpossibilityInstance gen_impossibility(const Rat& eps, const Rat& delta,
                                               long K) {
    if (sgn(eps) <= 0 || eps >= rat(1, 4))
        throw ValidationError("needs eps in (0, 1/4)");
    if (sgn(delta) <= 0 || delta >= 1)
        throw ValidationError("needs delta in (0, 1)");
    if (K < 1) throw ValidationError("needs K >= 1");

    // q = delta^(1/K), exactly when delta is a perfect K-th power and
    // otherwise as the (dyadic) double approximation. The downstream
    // utility statements hold for any q in (0,1), so the approximation
    // only perturbs the reported margins.
    Rat q;
    if (K == 1) {
        q = delta;
    } else {
        Int num_root, den_root;
        const auto uk = static_cast<unsigned long>(K);
        if (exact_kth_root(delta.get_num(), uk, num_root) &&
            exact_kth_root(delta.get_den(), uk, den_root)) {
            q = Rat(num_root, den_root);
            q.canonicalize();
        } else {
            q = rat_from_double(std::pow(rat_d(delta), 1.0 / static_cast<double>(K)));
        }
    }
    if (sgn(q) <= 0 || q >= 1)
        throw ValidationError("delta^(1/K) left the open unit interval");

    const Rat eta = (rat(1, 4) - eps) * (1 - q);
    const Rat half = rat(1, 2);
    AgentType likely({{Rat(0), half, half}, {eta, Rat(0), 1 - eta}},
                     {Cost(Rat(0)), Cost(rat(1, 4))});
    AgentType rare({{Rat(1), Rat(0), Rat(0)}, {Rat(1), Rat(0), Rat(0)}},
                   {Cost(Rat(0)), Cost(Rat(0))});

    Instance inst{Rewards({Rat(0), Rat(0), Rat(1)}),
                  {std::move(likely), std::move(rare)},
                  std::vector<Rat>{q, 1 - q},
                  std::nullopt,
                  std::nullopt,
                  {}};
    Contract t_star(std::vector<Rat>{1 / (4 * eta), Rat(0), Rat(0)});
    return ImpossibilityInstance{std::move(inst), std::move(q), eta, std::move(t_star)};
}

// ─── structured instances from the representation lab ───────────────────

inline Instance gen_grid_forcing(const std::vector<Rat>& alphas, const Rewards& r,
                                 int n = 2) {
    TypeDistribution d = grid_forcing_distribution(alphas, r, n);
    return Instance{Rewards(r), std::move(d.support), std::move(d.weights),
                    std::nullopt, std::nullopt, {}};
}

inline Instance gen_bitmask_shatter(int n, int m) {
    std::vector<Rat> rewards(m, Rat(1));
    rewards[0] = 0;
    ShatterInstance si = bitmask_shatter_instance(n, m, Rewards(std::move(rewards)));
    std::vector<Contract> witnesses;
    witnesses.reserve(si.space.size());
    for (std::size_t i = 0; i < si.space.size(); ++i)
        witnesses.push_back(si.space.contract_at(i));
    return Instance{std::move(si.rewards), std::move(si.types), std::nullopt,
                    std::move(si.thresholds), std::move(witnesses), {}};
}

inline ShatterInstance shatter_instance_of(const Instance& inst) {
    if (!inst.thresholds || !inst.witness_space)
        throw ValidationError("instance carries no shattering data");
    return ShatterInstance{Rewards(inst.rewards), inst.types, *inst.thresholds,
                           ContractSearchSpace::from_contracts(*inst.witness_space)};
}

// ─── random instances for stress tests ──────────────────────────────────
//
// Everything is drawn on small exact grids (tenths, sixteenths) so that the
// instances exercise tie handling instead of hiding it behind generic-position
// randomness.

inline Rewards random_rewards(int m, Rng& rng) {
    std::vector<Rat> r(m, Rat(0));
    const int forced = 1 + static_cast<int>(rng.next_below(static_cast<std::uint64_t>(m - 1)));
    for (int j = 1; j < m; ++j)
        r[j] = (j == forced) ? Rat(1) : rat(rng.next_in(0, 10), 10);
    return Rewards(std::move(r));
}

inline AgentType random_type(int n, int m, Rng& rng) {
    std::vector<std::vector<Rat>> f;
    f.reserve(n);
    for (int i = 0; i < n; ++i) {
        std::vector<long> raw(m, 0);
        long sum = 0;
        while (sum == 0) {
            sum = 0;
            for (int j = 0; j < m; ++j) {
                raw[j] = rng.next_in(0, 9);
                sum += raw[j];
            }
        }
        std::vector<Rat> row(m);
        for (int j = 0; j < m; ++j) row[j] = rat(raw[j], sum);
        f.push_back(std::move(row));
    }
    std::vector<Cost> c;
    c.reserve(n);
    c.push_back(Cost(Rat(0)));
    for (int i = 1; i < n; ++i) {
        if (rng.next_below(8) == 0)
            c.push_back(Cost::inf());
        else
            c.push_back(Cost(rat(rng.next_in(0, 12), 16)));
    }
    return AgentType(std::move(f), std::move(c));
}

inline TypeDistribution random_distribution(std::vector<AgentType> types, Rng& rng) {
    std::vector<long> raw(types.size());
    long sum = 0;
    for (long& v : raw) {
        v = rng.next_in(1, 9);
        sum += v;
    }
    std::vector<Rat> w(types.size());
    for (std::size_t k = 0; k < raw.size(); ++k) w[k] = rat(raw[k], sum);
    return TypeDistribution(std::move(types), std::move(w));
}

}  // namespace contractlab
