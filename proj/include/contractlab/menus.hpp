#pragma once

#include <algorithm>
#include <utility>
#include <vector>

#include "contractlab/bounded.hpp"
#include "contractlab/linear.hpp"
#include "contractlab/model.hpp"

namespace contractlab {

// A menu offers K contracts; the agent picks the (contract, action) pair it
// likes best and the principal pays accordingly. Menus are unordered: the
// canonical form sorts contracts lexicographically by payments.
struct Menu {
    std::vector<Contract> contracts;

    explicit Menu(std::vector<Contract> cs) : contracts(std::move(cs)) {
        if (contracts.empty()) throw ValidationError("empty menu");
        const int m = contracts[0].m();
        for (const Contract& c : contracts)
            if (c.m() != m) throw ValidationError("mixed contract dimensions in menu");
    }

    int k() const { return static_cast<int>(contracts.size()); }
    int m() const { return contracts[0].m(); }
};

inline Menu canonical_menu(Menu menu) {
    std::sort(menu.contracts.begin(), menu.contracts.end(),
              [](const Contract& a, const Contract& b) { return payments_less(a.t, b.t); });
    return menu;
}

inline bool menu_less(const Menu& a, const Menu& b) {
    const int n = std::min(a.k(), b.k());
    for (int i = 0; i < n; ++i) {
        if (payments_less(a.contracts[i].t, b.contracts[i].t)) return true;
        if (payments_less(b.contracts[i].t, a.contracts[i].t)) return false;
    }
    return a.k() < b.k();
}

// The agent's pick among all K*n (contract, action) pairs: maximal agent
// utility, ties toward the principal, then the smallest (contract, action)
// pair. Returns (contract index, action index).
inline std::pair<int, int> menu_choice(const Rewards& r, const AgentType& theta,
                                       const Menu& menu) {
    int best_k = -1, best_i = -1;
    Rat best_ua, best_up;
    for (int k = 0; k < menu.k(); ++k) {
        const Contract& t = menu.contracts[k];
        for (int i = 0; i < theta.actions(); ++i) {
            if (theta.c[i].is_inf()) continue;
            Rat ua = detail::dot(theta.f[i], t.t) - theta.c[i].value();
            if (best_k >= 0) {
                const int s = cmp(ua, best_ua);
                if (s < 0) continue;
                if (s == 0) {
                    Rat up = principal_action_utility(r, theta, t, i);
                    if (up <= best_up) continue;
                    best_ua = std::move(ua);
                    best_up = std::move(up);
                    best_k = k;
                    best_i = i;
                    continue;
                }
            }
            best_ua = std::move(ua);
            best_up = principal_action_utility(r, theta, t, i);
            best_k = k;
            best_i = i;
        }
    }
    if (best_k < 0) throw ValidationError("type has no available action");
    return {best_k, best_i};
}

inline Rat menu_utility(const Rewards& r, const AgentType& theta, const Menu& menu) {
    const auto [k, i] = menu_choice(r, theta, menu);
    return principal_action_utility(r, theta, menu.contracts[k], i);
}

// ERM over unordered K-tuples drawn from a finite contract set: exact
// argmax of the sample average, ties to the lexicographically smallest
// canonical menu. The number of candidate menus is C(|S|+K-1, K); the cap
// guards against accidental blowups.
inline std::pair<Menu, Rat> opt_menu(const Rewards& r, const TypeDistribution& emp,
                                     int K, const ContractSearchSpace& space,
                                     const Rat& slack, std::size_t cap = 10'000'000) {
    if (sgn(slack) < 0) throw ValidationError("negative optimization slack");
    if (K < 1 || K > 3) throw ValidationError("menu size must be 1..3");
    if (space.size() == 0) throw ValidationError("empty contract search space");

    // Candidate count C(s+K-1, K) against the cap, in floating point (the
    // cap itself is approximate protection, the enumeration is exact).
    const double s = static_cast<double>(space.size());
    double combos = 1;
    for (int i = 0; i < K; ++i) combos = combos * (s + K - 1 - i) / (i + 1);
    if (combos > static_cast<double>(cap))
        throw ResourceCapError("menu enumeration exceeds the configured cap");

    // Sort the base set lexicographically so that nondecreasing index
    // tuples enumerate canonical menus in lexicographic order.
    std::vector<std::size_t> order(space.size());
    for (std::size_t i = 0; i < order.size(); ++i) order[i] = i;
    std::vector<Contract> base;
    base.reserve(space.size());
    for (std::size_t i = 0; i < space.size(); ++i) base.push_back(space.contract_at(i));
    std::sort(order.begin(), order.end(), [&](std::size_t a, std::size_t b) {
        return payments_less(base[a].t, base[b].t);
    });

    std::vector<int> idx(K, 0);  // nondecreasing positions into `order`
    bool have = false;
    Menu best = Menu({base[order[0]]});
    Rat best_value;
    while (true) {
        std::vector<Contract> pick;
        pick.reserve(K);
        for (int i = 0; i < K; ++i) pick.push_back(base[order[idx[i]]]);
        Menu menu(std::move(pick));
        Rat value = 0;
        for (std::size_t t = 0; t < emp.support.size(); ++t)
            value += emp.weights[t] * menu_utility(r, emp.support[t], menu);
        if (!have || value > best_value) {
            best = std::move(menu);
            best_value = std::move(value);
            have = true;
        }
        int i = K - 1;
        while (i >= 0 && idx[i] + 1 == static_cast<int>(space.size())) --i;
        if (i < 0) break;
        const int next = idx[i] + 1;
        for (int j = i; j < K; ++j) idx[j] = next;
    }
    return {std::move(best), std::move(best_value)};
}

inline std::pair<Menu, Rat> erm_menu(const std::vector<AgentType>& samples,
                                     const Rewards& r, int K,
                                     const ContractSearchSpace& space, const Rat& slack,
                                     std::size_t cap = 10'000'000) {
    return opt_menu(r, empirical_distribution(samples), K, space, slack, cap);
}

}  // namespace contractlab
