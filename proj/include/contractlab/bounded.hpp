#pragma once

#include <algorithm>
#include <cmath>
#include <cstdint>
#include <limits>
#include <numeric>
#include <utility>
#include <vector>

#include "contractlab/linear.hpp"
#include "contractlab/model.hpp"
#include "contractlab/parallel.hpp"

namespace contractlab {

// ─── direction nets ─────────────────────────────────────────────────────

// Angular eps-net on the unit sphere: every unit vector is within angle eps
// of some net vector. Geometry is double precision by design; nothing
// downstream trusts these vectors beyond the verified net property, because
// candidate payments are snapped to an exact rational grid before any
// utility is computed.
struct DirectionNet {
    Rat eps;                      // requested angular resolution (radians)
    int m = 0;
    std::vector<double> vectors;  // flat, m doubles per unit vector

    std::size_t size() const { return m == 0 ? 0 : vectors.size() / m; }
    const double* at(std::size_t i) const { return vectors.data() + i * m; }
};

namespace detail {

// Enumerate primitive integer vectors (gcd of coordinates == 1) of the grid
// {-M..M}^m, restricted per coordinate by sign (-1: nonpositive, +1:
// nonnegative, 0: both). Each distinct direction appears exactly once, in a
// deterministic odometer order. visit(z) is called with the raw vector.
template <class Visit>
void scan_primitive_grid(int m, long M, const std::vector<int>& sign, Visit&& visit) {
    std::vector<long> lo(m), hi(m), z(m);
    for (int j = 0; j < m; ++j) {
        lo[j] = sign[j] > 0 ? 0 : -M;
        hi[j] = sign[j] < 0 ? 0 : M;
        z[j] = lo[j];
    }
    while (true) {
        long g = 0;
        for (int j = 0; j < m; ++j) g = std::gcd(g, std::abs(z[j]));
        if (g == 1) visit(z);
        int j = m - 1;
        while (j >= 0 && z[j] == hi[j]) {
            z[j] = lo[j];
            --j;
        }
        if (j < 0) break;
        ++z[j];
    }
}

inline double grid_point_count(int m, long M, const std::vector<int>& sign) {
    double total = 1;
    for (int j = 0; j < m; ++j) total *= sign[j] == 0 ? (2.0 * M + 1.0) : (M + 1.0);
    return total;
}

}  // namespace detail

// Net from normalized integer grid points with spacing eps/(2 sqrt(m)):
// rounding any unit vector to the grid moves it by at most eps/4 in L2,
// hence by less than eps in angle.
inline DirectionNet direction_net(int m, const Rat& eps) {
    if (m < 1) throw ValidationError("direction net needs m >= 1");
    const double e = rat_d(eps);
    if (!(e > 0) || !(e < 1.5707963267948966))
        throw ValidationError("angular resolution must be in (0, pi/2)");
    const double h = e / (2.0 * std::sqrt(static_cast<double>(m)));
    const long M = static_cast<long>(std::ceil(1.0 / h));
    const std::vector<int> sign(m, 0);
    if (detail::grid_point_count(m, M, sign) > 2e7)
        throw ResourceCapError("direction net resolution too fine to enumerate");
    DirectionNet net;
    net.eps = eps;
    net.m = m;
    detail::scan_primitive_grid(m, M, sign, [&](const std::vector<long>& z) {
        double norm = 0;
        for (int j = 0; j < m; ++j) norm += static_cast<double>(z[j]) * static_cast<double>(z[j]);
        norm = std::sqrt(norm);
        for (int j = 0; j < m; ++j) net.vectors.push_back(static_cast<double>(z[j]) / norm);
    });
    return net;
}

// ─── polar payment grid for the bounded setting ─────────────────────────

// Payments k / 10^9: fine enough that snapping moves any utility by less
// than 10^-8, coarse enough that exact rationals stay small.
inline constexpr std::int64_t kSnapDenominator = 1'000'000'000;

// Candidate payments r + sqrt(m) * beta * gamma intersected with [0,1]^m,
// beta on an exact radial ladder {eps_bar, 2 eps_bar, ..., 1} and gamma from
// a direction net around the reward vector. The angular resolution adapts:
// the finest eta = eps_bar * 2^k whose contract count fits the cap. Snapped
// payments are exact rationals; all utilities are evaluated exactly.
struct BoundedGrid {
    Rat eps;
    Rat eps_bar;       // radial step; 1/eps_bar is an integer
    double eta = 0;    // realized angular resolution (radians)
    int m = 0;
    std::vector<std::int64_t> payments;  // flat, m entries per contract, units of 1e-9

    std::size_t size() const { return m == 0 ? 0 : payments.size() / m; }
};

inline BoundedGrid bounded_grid(const Rewards& r, const Rat& eps,
                                std::size_t cap = 10'000'000) {
    if (sgn(eps) <= 0 || eps >= 1) throw ValidationError("eps must be in (0,1)");
    for (const Rat& v : r.values)
        if (v > 1) throw ValidationError("bounded setting requires rewards in [0,1]");
    const int m = r.m();
    const double sqrtm = std::sqrt(static_cast<double>(m));

    // 1/eps_bar = ceil(20 sqrt(m) / eps) keeps the ladder exact.
    const long shells = static_cast<long>(std::ceil(20.0 * sqrtm / rat_d(eps)));
    BoundedGrid grid;
    grid.eps = eps;
    grid.eps_bar = rat(1, shells);
    grid.m = m;

    // Directions that point from r into the box: coordinates at the box
    // boundary admit one sign only. Rounding a unit vector preserves
    // coordinate signs, so the restricted net still covers every direction
    // t - r with t in the box.
    std::vector<int> sign(m, 0);
    std::vector<double> rd(m);
    for (int j = 0; j < m; ++j) {
        rd[j] = rat_d(r.values[j]);
        if (sgn(r.values[j]) == 0) sign[j] = +1;
        if (r.values[j] == 1) sign[j] = -1;
    }

    const std::size_t budget = std::min<std::size_t>(cap, 8'000'000);
    const double eps_bar_d = 1.0 / static_cast<double>(shells);

    // Upper bound on beta for direction gamma: stay inside [0,1]^m.
    const auto beta_max = [&](const std::vector<double>& gamma) {
        double bmax = 1.0;
        for (int j = 0; j < m; ++j) {
            if (gamma[j] > 0)
                bmax = std::min(bmax, (1.0 - rd[j]) / (sqrtm * gamma[j]));
            else if (gamma[j] < 0)
                bmax = std::min(bmax, rd[j] / (sqrtm * -gamma[j]));
        }
        return bmax;
    };

    for (int level = 0;; ++level) {
        const double eta = eps_bar_d * std::ldexp(1.0, level);
        if (eta > 1.0471975511965976)  // pi/3: nothing coarser is a usable net
            throw ResourceCapError("bounded grid exceeds the cardinality cap");
        const double h = eta / (2.0 * sqrtm);
        const long M = static_cast<long>(std::ceil(1.0 / h));
        if (detail::grid_point_count(m, M, sign) > 8e6) continue;

        // Counting pass: exact number of (direction, shell) candidates.
        std::size_t count = 0;
        std::vector<double> gamma(m);
        detail::scan_primitive_grid(m, M, sign, [&](const std::vector<long>& z) {
            double norm = 0;
            for (int j = 0; j < m; ++j)
                norm += static_cast<double>(z[j]) * static_cast<double>(z[j]);
            norm = std::sqrt(norm);
            for (int j = 0; j < m; ++j) gamma[j] = static_cast<double>(z[j]) / norm;
            const double bmax = beta_max(gamma) + 1e-12;
            const long kmax = std::min<long>(shells, static_cast<long>(std::floor(bmax * shells)));
            if (kmax > 0) count += static_cast<std::size_t>(kmax);
        });
        if (count > budget) continue;

        grid.eta = eta;
        grid.payments.reserve(count * m);
        detail::scan_primitive_grid(m, M, sign, [&](const std::vector<long>& z) {
            double norm = 0;
            for (int j = 0; j < m; ++j)
                norm += static_cast<double>(z[j]) * static_cast<double>(z[j]);
            norm = std::sqrt(norm);
            for (int j = 0; j < m; ++j) gamma[j] = static_cast<double>(z[j]) / norm;
            const double bmax = beta_max(gamma) + 1e-12;
            const long kmax = std::min<long>(shells, static_cast<long>(std::floor(bmax * shells)));
            for (long k = 1; k <= kmax; ++k) {
                const double beta = static_cast<double>(k) * eps_bar_d;
                for (int j = 0; j < m; ++j) {
                    const double t = rd[j] + sqrtm * beta * gamma[j];
                    std::int64_t snapped = std::llround(t * static_cast<double>(kSnapDenominator));
                    snapped = std::clamp<std::int64_t>(snapped, 0, kSnapDenominator);
                    grid.payments.push_back(snapped);
                }
            }
        });
        return grid;
    }
}

// ─── contract search spaces ─────────────────────────────────────────────

// A finite enumerable set of contracts, stored either exactly or in the
// snapped fixed-point representation of a BoundedGrid. contract_at is exact
// in both cases.
class ContractSearchSpace {
  public:
    static ContractSearchSpace from_contracts(std::vector<Contract> list) {
        if (list.empty()) throw ValidationError("empty contract search space");
        ContractSearchSpace s;
        s.m_ = list[0].m();
        for (const Contract& c : list)
            if (c.m() != s.m_) throw ValidationError("mixed contract dimensions");
        s.list_ = std::move(list);
        return s;
    }

    // Linear contracts alpha * r for every alpha in the grid.
    static ContractSearchSpace from_linear_grid(const EpsGrid& grid, const Rewards& r) {
        std::vector<Contract> list;
        list.reserve(grid.points.size());
        for (const Rat& a : grid.points)
            list.push_back(linear_payments(LinearContract(a), r));
        return from_contracts(std::move(list));
    }

    static ContractSearchSpace from_bounded(BoundedGrid grid) {
        if (grid.size() == 0) throw ValidationError("empty bounded grid");
        ContractSearchSpace s;
        s.m_ = grid.m;
        s.fixed_ = std::move(grid.payments);
        return s;
    }

    // The full box {0, step, 2 step, ...}^m, enumerated lexicographically.
    static ContractSearchSpace box_grid(int m, const Rat& step,
                                        std::size_t cap = 10'000'000) {
        if (m < 1) throw ValidationError("box grid needs m >= 1");
        if (sgn(step) <= 0 || step > 1) throw ValidationError("step must be in (0,1]");
        const long kmax = static_cast<long>(rat_floor(1 / step).get_si());
        double total = 1;
        for (int j = 0; j < m; ++j) total *= static_cast<double>(kmax + 1);
        if (total > static_cast<double>(cap))
            throw ResourceCapError("box grid exceeds the cardinality cap");
        std::vector<Rat> axis;
        for (long k = 0; k <= kmax; ++k) axis.push_back(Rat(k) * step);
        std::vector<Contract> list;
        std::vector<std::size_t> idx(m, 0);
        while (true) {
            std::vector<Rat> t(m);
            for (int j = 0; j < m; ++j) t[j] = axis[idx[j]];
            list.push_back(Contract(std::move(t)));
            int j = m - 1;
            while (j >= 0 && idx[j] + 1 == axis.size()) {
                idx[j] = 0;
                --j;
            }
            if (j < 0) break;
            ++idx[j];
        }
        return from_contracts(std::move(list));
    }

    std::size_t size() const {
        return fixed_.empty() ? list_.size() : fixed_.size() / m_;
    }
    int m() const { return m_; }

    Contract contract_at(std::size_t i) const {
        if (fixed_.empty()) return list_[i];
        std::vector<Rat> t(m_);
        for (int j = 0; j < m_; ++j) {
            t[j] = rat(fixed_[i * m_ + j], kSnapDenominator);
        }
        return Contract(std::move(t));
    }

    void payments_f(std::size_t i, double* out) const {
        if (fixed_.empty()) {
            for (int j = 0; j < m_; ++j) out[j] = rat_d(list_[i].t[j]);
        } else {
            for (int j = 0; j < m_; ++j)
                out[j] = static_cast<double>(fixed_[i * m_ + j]) /
                         static_cast<double>(kSnapDenominator);
        }
    }

  private:
    int m_ = 0;
    std::vector<Contract> list_;
    std::vector<std::int64_t> fixed_;
};

// ─── exact optimization over a contract set ─────────────────────────────

namespace detail {

// Per-type data for the double-precision prefilter.
struct TypeSheet {
    int n = 0;
    int m = 0;
    double weight = 0;
    std::vector<double> f;       // n*m
    std::vector<double> cost;    // +inf marks unavailable actions
    std::vector<double> reward;  // f_i . r
};

inline std::vector<TypeSheet> make_sheets(const Rewards& r, const TypeDistribution& d) {
    std::vector<TypeSheet> sheets;
    sheets.reserve(d.support.size());
    for (std::size_t k = 0; k < d.support.size(); ++k) {
        const AgentType& th = d.support[k];
        TypeSheet s;
        s.n = th.actions();
        s.m = th.outcomes();
        s.weight = rat_d(d.weights[k]);
        s.f.reserve(s.n * s.m);
        for (const auto& row : th.f)
            for (const Rat& p : row) s.f.push_back(rat_d(p));
        for (const Cost& c : th.c)
            s.cost.push_back(c.is_inf() ? std::numeric_limits<double>::infinity()
                                        : rat_d(c.value()));
        for (int i = 0; i < s.n; ++i) {
            double acc = 0;
            for (int j = 0; j < s.m; ++j) acc += s.f[i * s.m + j] * rat_d(r.values[j]);
            s.reward.push_back(acc);
        }
        sheets.push_back(std::move(s));
    }
    return sheets;
}

// Optimistic/pessimistic expected principal utility of payments t. Within
// the near-tie window the exact tie-break (max principal utility among the
// agent's argmax) could land anywhere, so the bracket takes max/min over
// every action whose agent utility is within kTieWindow of the float best.
inline void bracket_value(const std::vector<TypeSheet>& sheets, const double* t,
                          double& lo, double& hi) {
    constexpr double kTieWindow = 1e-9;
    lo = 0;
    hi = 0;
    for (const TypeSheet& s : sheets) {
        double best_ua = -std::numeric_limits<double>::infinity();
        for (int i = 0; i < s.n; ++i) {
            if (s.cost[i] == std::numeric_limits<double>::infinity()) continue;
            double dot = 0;
            for (int j = 0; j < s.m; ++j) dot += s.f[i * s.m + j] * t[j];
            const double ua = dot - s.cost[i];
            if (ua > best_ua) best_ua = ua;
        }
        double up_lo = std::numeric_limits<double>::infinity();
        double up_hi = -std::numeric_limits<double>::infinity();
        for (int i = 0; i < s.n; ++i) {
            if (s.cost[i] == std::numeric_limits<double>::infinity()) continue;
            double dot = 0;
            for (int j = 0; j < s.m; ++j) dot += s.f[i * s.m + j] * t[j];
            if (dot - s.cost[i] >= best_ua - kTieWindow) {
                const double up = s.reward[i] - dot;
                up_lo = std::min(up_lo, up);
                up_hi = std::max(up_hi, up);
            }
        }
        lo += s.weight * up_lo;
        hi += s.weight * up_hi;
    }
}

}  // namespace detail

// Exact maximizer of the expected principal utility over a finite contract
// set. Ties break to the lexicographically smallest payment vector. The
// slack parameter widens what callers are entitled to (any contract within
// slack of the max); this implementation always returns the exact argmax,
// which satisfies every slack >= 0.
//
// Internally a double-precision bracket prunes the set first; any contract
// whose optimistic value reaches the best pessimistic value (minus a margin
// far above double error) is re-evaluated exactly, so the returned pair is
// identical to a full exact scan.
inline std::pair<Contract, Rat> opt_over_set(const Rewards& r, const TypeDistribution& d,
                                             const ContractSearchSpace& space,
                                             const Rat& slack) {
    if (sgn(slack) < 0) throw ValidationError("negative optimization slack");
    if (space.size() == 0) throw ValidationError("empty contract search space");
    if (space.m() != r.m()) throw ValidationError("search space/reward outcome mismatch");
    constexpr double kMargin = 1e-6;

    const std::vector<detail::TypeSheet> sheets = detail::make_sheets(r, d);
    const std::size_t n = space.size();
    std::vector<double> upper(n);
    const unsigned workers = worker_count();
    std::vector<double> best_lower(std::max<unsigned>(workers, 1),
                                   -std::numeric_limits<double>::infinity());

    parallel_blocks(n, [&](std::size_t w, std::size_t begin, std::size_t end) {
        std::vector<double> t(space.m());
        double lo, hi;
        for (std::size_t i = begin; i < end; ++i) {
            space.payments_f(i, t.data());
            detail::bracket_value(sheets, t.data(), lo, hi);
            upper[i] = hi;
            if (lo > best_lower[w]) best_lower[w] = lo;
        }
    });
    const double threshold =
        *std::max_element(best_lower.begin(), best_lower.end()) - kMargin;

    bool have = false;
    Contract best = zero_contract(space.m());
    Rat best_value;
    for (std::size_t i = 0; i < n; ++i) {
        if (upper[i] < threshold) continue;
        Contract c = space.contract_at(i);
        Rat v = expected_principal_utility(r, d, c);
        if (!have || v > best_value ||
            (v == best_value && payments_less(c.t, best.t))) {
            best = std::move(c);
            best_value = std::move(v);
            have = true;
        }
    }
    return {std::move(best), std::move(best_value)};
}

// ERM over an explicit contract set: exact argmax of the sample average.
inline Contract erm_bounded(const std::vector<AgentType>& samples, const Rewards& r,
                            const ContractSearchSpace& space, const Rat& slack) {
    return opt_over_set(r, empirical_distribution(samples), space, slack).first;
}

}  // namespace contractlab
