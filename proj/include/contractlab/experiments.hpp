#pragma once

#include <cmath>
#include <ostream>
#include <string>
#include <vector>

#include "contractlab/bounded.hpp"
#include "contractlab/generators.hpp"
#include "contractlab/io.hpp"
#include "contractlab/linear.hpp"
#include "contractlab/online.hpp"
#include "contractlab/parallel.hpp"
#include "contractlab/rng.hpp"

namespace contractlab {

// ─── sample complexity of the critical-value learner ────────────────────
//
// For each eps, draw samples from the tilted hard pair, run the ERM learner,
// and score a trial as a success when the learned contract is within eps of
// optimal on the true distribution (checked exactly). N*(eps) is the first
// rung of a sparse ladder whose empirical success rate reaches 1 - delta.

struct SampleComplexityConfig {
    std::vector<Rat> eps_values;
    Rat delta = rat(1, 10);
    int trials = 200;
    std::uint64_t seed = 1;
    std::vector<long> ladder;  // empty -> {2,3,4,6,8,...} up to ladder_cap
    long ladder_cap = 4096;
};

struct SampleComplexityRow {
    Rat eps;
    long n_star = -1;  // -1: no rung reached the target rate
    double success_rate = 0.0;
    int trials = 0;
};

inline std::vector<long> default_sample_ladder(long cap) {
    std::vector<long> ladder;
    for (long base = 1; 2 * base <= cap; base *= 2) {
        if (2 * base <= cap) ladder.push_back(2 * base);
        if (3 * base <= cap) ladder.push_back(3 * base);
    }
    return ladder;
}

inline std::vector<SampleComplexityRow> run_sample_complexity(
    const SampleComplexityConfig& cfg) {
    if (cfg.eps_values.empty()) throw ValidationError("no eps values given");
    if (cfg.trials < 1) throw ValidationError("needs at least one trial");
    const std::vector<long> ladder =
        cfg.ladder.empty() ? default_sample_ladder(cfg.ladder_cap) : cfg.ladder;
    if (ladder.empty()) throw ValidationError("empty sample ladder");

    const Rng base(cfg.seed);
    std::vector<SampleComplexityRow> rows;
    for (std::size_t ei = 0; ei < cfg.eps_values.size(); ++ei) {
        const Rat& eps = cfg.eps_values[ei];
        const Instance inst = gen_d1_linear(eps);
        const TypeDistribution d = inst.distribution();
        const Rat opt = opt_linear(inst.rewards, d).second;
        const WeightedSampler sampler(d.weights);
        const Rng eps_stream = base.substream(ei);

        SampleComplexityRow row{eps, -1, 0.0, cfg.trials};
        for (long n : ladder) {
            if (n < 1) throw ValidationError("ladder entries must be positive");
            const Rng n_stream = eps_stream.substream(static_cast<std::uint64_t>(n));
            int successes = 0;
            for (int trial = 0; trial < cfg.trials; ++trial) {
                Rng rng = n_stream.substream(static_cast<std::uint64_t>(trial));
                std::vector<AgentType> sample;
                sample.reserve(static_cast<std::size_t>(n));
                for (long i = 0; i < n; ++i)
                    sample.push_back(d.support[sampler.draw(rng)]);
                const LinearContract learned =
                    erm_linear(sample, inst.rewards, LinearSearchMode::critical()).first;
                const Rat achieved = expected_principal_utility(
                    inst.rewards, d, linear_payments(learned, inst.rewards));
                if (opt - achieved <= eps) ++successes;
            }
            row.success_rate =
                static_cast<double>(successes) / static_cast<double>(cfg.trials);
            if (rat(successes, cfg.trials) >= 1 - cfg.delta) {
                row.n_star = n;
                break;
            }
        }
        rows.push_back(std::move(row));
    }
    return rows;
}

// Least-squares slope of ln N* against ln(1/eps); rows without an N* are
// skipped, fewer than two usable rows give 0.
inline double sample_complexity_slope(const std::vector<SampleComplexityRow>& rows) {
    std::vector<double> xs, ys;
    for (const auto& row : rows) {
        if (row.n_star < 1) continue;
        xs.push_back(std::log(1.0 / rat_d(row.eps)));
        ys.push_back(std::log(static_cast<double>(row.n_star)));
    }
    if (xs.size() < 2) return 0.0;
    double mx = 0, my = 0;
    for (std::size_t i = 0; i < xs.size(); ++i) {
        mx += xs[i];
        my += ys[i];
    }
    mx /= static_cast<double>(xs.size());
    my /= static_cast<double>(xs.size());
    double sxx = 0, sxy = 0;
    for (std::size_t i = 0; i < xs.size(); ++i) {
        sxx += (xs[i] - mx) * (xs[i] - mx);
        sxy += (xs[i] - mx) * (ys[i] - my);
    }
    return sxx == 0 ? 0.0 : sxy / sxx;
}

inline void sample_complexity_csv(const std::vector<SampleComplexityRow>& rows,
                                  std::ostream& out) {
    CsvWriter csv(out, {"eps", "N_star", "success_rate", "trials"});
    for (const auto& row : rows)
        csv.write_row({CsvWriter::cell(row.eps), CsvWriter::cell(row.n_star),
                       CsvWriter::cell(row.success_rate), CsvWriter::cell(long(row.trials))});
}

// ─── representation error of the discretized classes ────────────────────
//
// Linear mode compares the best contract on the eps grid against a 1e-4
// reference grid; bounded mode compares the spherical-code grid against a
// dense box grid. Both comparisons are exact once the candidate sets are
// fixed, so `gap` is an exact rational.

struct RepErrorConfig {
    enum class Mode { linear, bounded } mode = Mode::linear;
    int instances = 20;
    std::vector<Rat> eps_values;
    int m = 2;              // outcomes
    int max_actions = 6;    // random instances draw n in [2, max_actions]
    int max_types = 4;      // ... and support size in [1, max_types]
    std::uint64_t seed = 1;
    std::size_t cap = 10'000'000;  // bounded-grid resource cap
    Rat ref_step = rat(1, 50);     // bounded reference box spacing
};

struct RepErrorRow {
    Rat eps;
    int instance = 0;
    Rat opt_class;  // best value over the discretized class
    Rat opt_ref;    // best value over the reference grid
    Rat gap;        // opt_ref - opt_class
    bool ok = false;
};

namespace detail {

inline TypeDistribution random_rep_instance(const RepErrorConfig& cfg, Rng& rng,
                                            Rewards& rewards_out) {
    rewards_out = random_rewards(cfg.m, rng);
    const int n_types = 1 + static_cast<int>(rng.next_below(
                                static_cast<std::uint64_t>(cfg.max_types)));
    std::vector<AgentType> types;
    types.reserve(static_cast<std::size_t>(n_types));
    for (int k = 0; k < n_types; ++k) {
        const int n = static_cast<int>(rng.next_in(2, cfg.max_actions));
        types.push_back(random_type(n, cfg.m, rng));
    }
    return random_distribution(std::move(types), rng);
}

}  // namespace detail

inline std::vector<RepErrorRow> run_rep_error(const RepErrorConfig& cfg) {
    if (cfg.eps_values.empty()) throw ValidationError("no eps values given");
    if (cfg.instances < 1) throw ValidationError("needs at least one instance");
    const Rng base(cfg.seed);
    const EpsGrid ref_grid = eps_grid(rat(1, 10'000));

    std::vector<RepErrorRow> rows;
    for (int inst_id = 0; inst_id < cfg.instances; ++inst_id) {
        Rng rng = base.substream(static_cast<std::uint64_t>(inst_id));
        Rewards rewards({Rat(0), Rat(1)});
        const TypeDistribution d = detail::random_rep_instance(cfg, rng, rewards);

        if (cfg.mode == RepErrorConfig::Mode::linear) {
            const detail::LinearObjective obj =
                detail::make_objective(rewards, d, /*skip_zero_weight=*/true);
            const Rat opt_ref = detail::argmax_over(obj, ref_grid.points).second;
            for (const Rat& eps : cfg.eps_values) {
                const Rat opt_class =
                    detail::argmax_over(obj, eps_grid(eps).points).second;
                RepErrorRow row{eps, inst_id, opt_class, opt_ref, opt_ref - opt_class,
                                false};
                row.ok = row.gap <= eps;
                rows.push_back(std::move(row));
            }
        } else {
            const ContractSearchSpace ref_space =
                ContractSearchSpace::box_grid(cfg.m, cfg.ref_step, cfg.cap);
            const Rat opt_ref = opt_over_set(rewards, d, ref_space, Rat(0)).second;
            for (const Rat& eps : cfg.eps_values) {
                const ContractSearchSpace space =
                    ContractSearchSpace::from_bounded(bounded_grid(rewards, eps, cfg.cap));
                const Rat opt_class = opt_over_set(rewards, d, space, Rat(0)).second;
                RepErrorRow row{eps, inst_id, opt_class, opt_ref, opt_ref - opt_class,
                                false};
                row.ok = row.gap <= eps;
                rows.push_back(std::move(row));
            }
        }
    }
    return rows;
}

inline void rep_error_csv(const std::vector<RepErrorRow>& rows, std::ostream& out) {
    CsvWriter csv(out, {"eps", "instance", "opt_class", "opt_ref", "gap", "ok"});
    for (const auto& row : rows)
        csv.write_row({CsvWriter::cell(row.eps), CsvWriter::cell(long(row.instance)),
                       CsvWriter::cell(row.opt_class), CsvWriter::cell(row.opt_ref),
                       CsvWriter::cell(row.gap), row.ok ? "1" : "0"});
}

// ─── online regret curves ───────────────────────────────────────────────

struct RegretConfig {
    Rat eps = rat(1, 10);
    int seeds = 50;
    std::size_t horizon = 4096;
    std::vector<std::size_t> checkpoints = {256, 512, 1024, 2048, 4096};
    std::uint64_t seed = 1;
};

inline RegretSummary run_regret(const RegretConfig& cfg) {
    if (cfg.seeds < 1) throw ValidationError("needs at least one seed");
    const Instance inst = gen_d1_linear(cfg.eps);
    const TypeDistribution d = inst.distribution();
    const Rng base(cfg.seed);

    std::vector<OnlineRun> runs(static_cast<std::size_t>(cfg.seeds),
                                OnlineRun{});
    parallel_for(static_cast<std::size_t>(cfg.seeds), [&](std::size_t s) {
        Rng stream = base.substream(s);
        runs[s] = ftl_run(inst.rewards, d, FtlLearner::critical_linear(), cfg.horizon,
                          stream.next_u64());
    });
    return regret_summary(runs, cfg.checkpoints);
}

inline void regret_csv(const RegretSummary& summary, std::ostream& out) {
    CsvWriter csv(out, {"T", "mean_regret"});
    for (std::size_t i = 0; i < summary.checkpoints.size(); ++i)
        csv.write_row({CsvWriter::cell(std::size_t(summary.checkpoints[i])),
                       CsvWriter::cell(summary.mean_regret[i])});
}

// ─── unbounded-payment demonstration ────────────────────────────────────
//
// Evaluates the witness contract and its clamped-to-[0,1] shadow exactly on
// the adversarial two-type distribution: the witness is strictly profitable
// on the likely type but catastrophic in expectation, while every bounded
// contract the clamp can reach stays nonnegative. B = 2/(1-q) is the payment
// bound the construction defeats.

struct ImpossibilityReport {
    Rat q;
    Rat eta;
    Contract t_star;
    Rat u_star;           // expected principal utility of t_star
    Rat u_clamped;        // same for min(t_star, 1) coordinatewise
    Rat bound_b;          // 2 / (1 - q)
    bool u_below_minus_one = false;
    bool clamped_nonneg = false;
};

inline ImpossibilityReport run_impossibility(const Rat& eps, const Rat& delta, long K) {
    ImpossibilityInstance gen = gen_impossibility(eps, delta, K);
    const TypeDistribution d = gen.instance.distribution();
    const Rewards& r = gen.instance.rewards;

    std::vector<Rat> clamped = gen.t_star.t;
    for (Rat& p : clamped)
        if (p > 1) p = 1;

    ImpossibilityReport report{gen.q,
                               gen.eta,
                               gen.t_star,
                               expected_principal_utility(r, d, gen.t_star),
                               expected_principal_utility(r, d, Contract(clamped)),
                               2 / (1 - gen.q),
                               false,
                               false};
    report.u_below_minus_one = report.u_star <= -1;
    report.clamped_nonneg = sgn(report.u_clamped) >= 0;
    return report;
}

inline void impossibility_csv(const ImpossibilityReport& rep, std::ostream& out) {
    CsvWriter csv(out, {"field", "value"});
    csv.write_row({"q", CsvWriter::cell(rep.q)});
    csv.write_row({"eta", CsvWriter::cell(rep.eta)});
    for (std::size_t j = 0; j < rep.t_star.t.size(); ++j)
        csv.write_row({"t_star_" + std::to_string(j), CsvWriter::cell(rep.t_star.t[j])});
    csv.write_row({"u_star", CsvWriter::cell(rep.u_star)});
    csv.write_row({"u_clamped", CsvWriter::cell(rep.u_clamped)});
    csv.write_row({"payment_bound", CsvWriter::cell(rep.bound_b)});
    csv.write_row({"u_below_minus_one", rep.u_below_minus_one ? "1" : "0"});
    csv.write_row({"clamped_nonneg", rep.clamped_nonneg ? "1" : "0"});
}

}  // namespace contractlab
