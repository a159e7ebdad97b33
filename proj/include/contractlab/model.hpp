#pragma once

#include <optional>
#include <string>
#include <utility>
#include <vector>

#include "contractlab/errors.hpp"
#include "contractlab/rational.hpp"

namespace contractlab {

// ─── value types ────────────────────────────────────────────────────────

// Action cost: a nonnegative rational, or +infinity for an action the agent
// cannot take at all. Infinite-cost actions never win the agent's argmax but
// keep their row in the production matrix so indices stay stable.
class Cost {
  public:
    Cost() : value_(0) {}
    Cost(Rat v) : value_(std::move(v)) {
        if (!infinite_ && sgn(value_) < 0) throw ValidationError("negative action cost");
    }
    static Cost inf() {
        Cost c;
        c.infinite_ = true;
        return c;
    }
    bool is_inf() const { return infinite_; }
    const Rat& value() const { return value_; }

    friend bool operator==(const Cost& a, const Cost& b) {
        if (a.infinite_ != b.infinite_) return false;
        return a.infinite_ || a.value_ == b.value_;
    }
    // Total order with +inf greater than every finite cost.
    friend bool operator<(const Cost& a, const Cost& b) {
        if (a.infinite_) return false;
        if (b.infinite_) return true;
        return a.value_ < b.value_;
    }

  private:
    bool infinite_ = false;
    Rat value_;
};

// Outcome rewards. values[0] must be 0 (the "nothing happened" outcome) and
// at least one later outcome must pay.
struct Rewards {
    std::vector<Rat> values;

    explicit Rewards(std::vector<Rat> v) : values(std::move(v)) { validate(); }

    int m() const { return static_cast<int>(values.size()); }

    void validate() const {
        if (values.size() < 2) throw ValidationError("need at least two outcomes");
        if (values[0] != 0) throw ValidationError("reward of outcome 0 must be 0");
        bool positive = false;
        for (const Rat& r : values) {
            if (sgn(r) < 0) throw ValidationError("negative reward");
            if (sgn(r) > 0) positive = true;
        }
        if (!positive) throw ValidationError("all rewards are zero");
    }
};

// One agent type: a row-stochastic production matrix (n actions over m
// outcomes) and per-action costs. Action 0 is the free opt-out: cost 0.
struct AgentType {
    std::vector<std::vector<Rat>> f;
    std::vector<Cost> c;

    AgentType(std::vector<std::vector<Rat>> f_, std::vector<Cost> c_)
        : f(std::move(f_)), c(std::move(c_)) {
        validate();
    }

    int actions() const { return static_cast<int>(f.size()); }
    int outcomes() const { return f.empty() ? 0 : static_cast<int>(f[0].size()); }

    void validate() const {
        if (f.empty()) throw ValidationError("type has no actions");
        if (c.size() != f.size()) throw ValidationError("cost/action count mismatch");
        const std::size_t m = f[0].size();
        if (m < 2) throw ValidationError("type needs at least two outcomes");
        for (const auto& row : f) {
            if (row.size() != m) throw ValidationError("ragged production matrix");
            Rat sum = 0;
            for (const Rat& p : row) {
                if (sgn(p) < 0) throw ValidationError("negative production probability");
                sum += p;
            }
            if (sum != 1) throw ValidationError("production row does not sum to 1");
        }
        if (c[0].is_inf() || c[0].value() != 0)
            throw ValidationError("action 0 must have cost 0");
    }

    friend bool operator==(const AgentType& a, const AgentType& b) {
        return a.f == b.f && a.c == b.c;
    }
};

// Strict weak order over types, used to deduplicate sample multisets.
struct TypeLess {
    bool operator()(const AgentType& a, const AgentType& b) const {
        if (a.actions() != b.actions()) return a.actions() < b.actions();
        if (a.outcomes() != b.outcomes()) return a.outcomes() < b.outcomes();
        for (int i = 0; i < a.actions(); ++i)
            for (int j = 0; j < a.outcomes(); ++j) {
                const int s = cmp(a.f[i][j], b.f[i][j]);
                if (s != 0) return s < 0;
            }
        for (int i = 0; i < a.actions(); ++i) {
            if (a.c[i].is_inf() != b.c[i].is_inf()) return b.c[i].is_inf();
            if (!a.c[i].is_inf()) {
                const int s = cmp(a.c[i].value(), b.c[i].value());
                if (s != 0) return s < 0;
            }
        }
        return false;
    }
};

// Payment vector, one nonnegative entry per outcome. Not restricted to
// [0,1]: the lower-bound constructions pay more than the top reward.
struct Contract {
    std::vector<Rat> t;

    explicit Contract(std::vector<Rat> t_) : t(std::move(t_)) {
        for (const Rat& p : t)
            if (sgn(p) < 0) throw ValidationError("negative payment");
    }

    int m() const { return static_cast<int>(t.size()); }

    friend bool operator==(const Contract& a, const Contract& b) { return a.t == b.t; }
};

// Lexicographic order on payment vectors; the deterministic tie-break used
// by every optimizer in the library.
inline bool payments_less(const std::vector<Rat>& a, const std::vector<Rat>& b) {
    const std::size_t n = std::min(a.size(), b.size());
    for (std::size_t j = 0; j < n; ++j) {
        const int s = cmp(a[j], b[j]);
        if (s != 0) return s < 0;
    }
    return a.size() < b.size();
}

// A contract of the form alpha * rewards, alpha in [0,1].
struct LinearContract {
    Rat alpha;

    explicit LinearContract(Rat a) : alpha(std::move(a)) {
        if (sgn(alpha) < 0 || alpha > 1) throw ValidationError("alpha outside [0,1]");
    }
};

inline Contract linear_payments(const LinearContract& lc, const Rewards& r) {
    std::vector<Rat> t;
    t.reserve(r.values.size());
    for (const Rat& rj : r.values) t.push_back(lc.alpha * rj);
    return Contract(std::move(t));
}

inline Contract zero_contract(int m) { return Contract(std::vector<Rat>(m, Rat(0))); }

// Finite-support distribution over agent types. Weights are exact and must
// sum to exactly 1; zero weights are allowed.
struct TypeDistribution {
    std::vector<AgentType> support;
    std::vector<Rat> weights;

    TypeDistribution(std::vector<AgentType> types, std::vector<Rat> w)
        : support(std::move(types)), weights(std::move(w)) {
        validate();
    }

    void validate() const {
        if (support.empty()) throw ValidationError("empty type distribution");
        if (support.size() != weights.size())
            throw ValidationError("support/weight count mismatch");
        const int m = support[0].outcomes();
        for (const AgentType& th : support)
            if (th.outcomes() != m)
                throw ValidationError("mixed outcome counts in distribution");
        Rat sum = 0;
        for (const Rat& w : weights) {
            if (sgn(w) < 0) throw ValidationError("negative weight");
            sum += w;
        }
        if (sum != 1) throw ValidationError("weights do not sum to 1");
    }
};

// ─── core evaluation ────────────────────────────────────────────────────

namespace detail {

inline void check_dims(const Rewards& r, const AgentType& theta, const Contract& t) {
    if (theta.outcomes() != r.m()) throw ValidationError("type/reward outcome mismatch");
    if (t.m() != r.m()) throw ValidationError("contract/reward outcome mismatch");
}

inline Rat dot(const std::vector<Rat>& a, const std::vector<Rat>& b) {
    Rat s = 0;
    for (std::size_t j = 0; j < a.size(); ++j) s += a[j] * b[j];
    return s;
}

}  // namespace detail

// Agent's utility for playing action i: expected payment minus cost.
// nullopt encodes -infinity (unavailable action).
inline std::optional<Rat> agent_utility(const AgentType& theta, const Contract& t, int i) {
    if (i < 0 || i >= theta.actions()) throw ValidationError("action index out of range");
    if (static_cast<int>(t.t.size()) != theta.outcomes())
        throw ValidationError("contract/type outcome mismatch");
    if (theta.c[i].is_inf()) return std::nullopt;
    return detail::dot(theta.f[i], t.t) - theta.c[i].value();
}

// Principal's utility if the agent were to play action i (defined for
// unavailable actions too; the cost is the agent's, not the principal's).
inline Rat principal_action_utility(const Rewards& r, const AgentType& theta,
                                    const Contract& t, int i) {
    if (i < 0 || i >= theta.actions()) throw ValidationError("action index out of range");
    detail::check_dims(r, theta, t);
    Rat s = 0;
    for (int j = 0; j < r.m(); ++j) s += theta.f[i][j] * (r.values[j] - t.t[j]);
    return s;
}

// The agent's chosen action: maximal utility, ties resolved in the
// principal's favor, remaining ties to the smallest index.
inline int best_response(const Rewards& r, const AgentType& theta, const Contract& t) {
    detail::check_dims(r, theta, t);
    int best = -1;
    Rat best_ua, best_up;
    for (int i = 0; i < theta.actions(); ++i) {
        if (theta.c[i].is_inf()) continue;
        Rat ua = detail::dot(theta.f[i], t.t) - theta.c[i].value();
        if (best >= 0) {
            const int s = cmp(ua, best_ua);
            if (s < 0) continue;
            if (s == 0) {
                Rat up = principal_action_utility(r, theta, t, i);
                if (up <= best_up) continue;
                best_ua = std::move(ua);
                best_up = std::move(up);
                best = i;
                continue;
            }
        }
        best_ua = std::move(ua);
        best_up = principal_action_utility(r, theta, t, i);
        best = i;
    }
    if (best < 0) throw ValidationError("type has no available action");
    return best;
}

inline Rat principal_utility(const Rewards& r, const AgentType& theta, const Contract& t) {
    return principal_action_utility(r, theta, t, best_response(r, theta, t));
}

// Expected reward (not net of payments) under the agent's best response.
inline Rat principal_reward(const Rewards& r, const AgentType& theta, const Contract& t) {
    const int i = best_response(r, theta, t);
    return detail::dot(theta.f[i], r.values);
}

inline Rat expected_principal_utility(const Rewards& r, const TypeDistribution& d,
                                      const Contract& t) {
    Rat total = 0;
    for (std::size_t k = 0; k < d.support.size(); ++k) {
        if (sgn(d.weights[k]) == 0) continue;
        total += d.weights[k] * principal_utility(r, d.support[k], t);
    }
    return total;
}

// ─── binary-outcome reduction ───────────────────────────────────────────

// Collapse outcomes to {nothing, success}: success probability is the
// expected reward scaled by the top reward R. Linear contracts commute with
// the reduction, which is what makes single-parameter search sound.
inline Rewards binary_rewards(const Rewards& r) {
    Rat top = 0;
    for (const Rat& v : r.values)
        if (v > top) top = v;
    if (sgn(top) == 0) throw ValidationError("cannot binarize all-zero rewards");
    return Rewards({Rat(0), top});
}

inline AgentType to_binary(const AgentType& theta, const Rewards& r) {
    if (theta.outcomes() != r.m()) throw ValidationError("type/reward outcome mismatch");
    Rat top = 0;
    for (const Rat& v : r.values)
        if (v > top) top = v;
    if (sgn(top) == 0) throw ValidationError("cannot binarize all-zero rewards");
    std::vector<std::vector<Rat>> f;
    f.reserve(theta.f.size());
    for (const auto& row : theta.f) {
        Rat p = detail::dot(row, r.values) / top;
        f.push_back({1 - p, p});
    }
    return AgentType(std::move(f), theta.c);
}

}  // namespace contractlab
