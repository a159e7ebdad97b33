#include <catch2/catch_amalgamated.hpp>

#include "contractlab/combinatorial.hpp"
#include "contractlab/rng.hpp"
#include "oracles.hpp"

using namespace contractlab;

namespace {

const Rewards r01() { return Rewards({Rat(0), Rat(1)}); }

// Ground set {0, 1} with q = (3/10, 2/5) and w = (3/50, 3/25): the demanded
// subset climbs {} -> {0} -> {0,1} with breakpoints at 1/5 and 3/10.
CombinatorialType worked_additive() {
    return make_comb_type(SuccessKind::additive, {rat(3, 10), rat(2, 5)},
                          CostKind::additive, {rat(3, 50), rat(3, 25)}, r01());
}

}  // namespace

TEST_CASE("subset order prefers the lowest element, then containment", "[comb]") {
    CHECK(subset_lex_less(0b01, 0b10));        // {0} before {1}
    CHECK_FALSE(subset_lex_less(0b10, 0b01));
    CHECK(subset_lex_less(0b11, 0b01));        // {0,1} before {0}
    CHECK(subset_lex_less(0b11, 0b10));
    CHECK_FALSE(subset_lex_less(0b101, 0b101));

    for (std::uint32_t a = 0; a < 64; ++a)
        for (std::uint32_t b = 0; b < 64; ++b)
            REQUIRE(subset_lex_less(a, b) == oracles::naive_subset_less(a, b));
}

TEST_CASE("built-in evaluators produce the pinned lines", "[comb]") {
    const CombinatorialType add = worked_additive();
    CHECK(add.family == CombinatorialType::Family::additive);
    CHECK(add.outcome_dist(0b11) == std::vector<Rat>{rat(3, 10), rat(7, 10)});
    CHECK(add.cost(0b11) == rat(9, 50));

    // Additive success saturates at probability one.
    const CombinatorialType capped =
        make_comb_type(SuccessKind::additive, {rat(3, 4), rat(1, 2)},
                       CostKind::additive, {Rat(0), Rat(0)}, r01());
    CHECK(capped.outcome_dist(0b11) == std::vector<Rat>{Rat(0), Rat(1)});

    const CombinatorialType cov =
        make_comb_type(SuccessKind::coverage, {rat(1, 2), rat(1, 2)},
                       CostKind::additive, {rat(3, 50), rat(3, 25)}, r01());
    CHECK(cov.family == CombinatorialType::Family::coverage_submodular);
    CHECK(cov.outcome_dist(0b11) == std::vector<Rat>{rat(1, 4), rat(3, 4)});

    const CombinatorialType super =
        make_comb_type(SuccessKind::additive, {rat(1, 4), rat(1, 4)},
                       CostKind::supermodular, {Rat(1), Rat(2)}, r01());
    CHECK(super.family == CombinatorialType::Family::supermodular_cost);
    CHECK(super.cost(0b01) == 1);
    CHECK(super.cost(0b10) == 4);
    CHECK(super.cost(0b11) == 9);
}

TEST_CASE("demand walks the worked instance", "[comb]") {
    const CombinatorialType theta = worked_additive();
    CHECK(demand(theta, rat(1, 10)) == 0b00);
    CHECK(demand(theta, rat(1, 4)) == 0b01);
    CHECK(demand(theta, rat(1, 2)) == 0b11);
    // Exact ties: the higher principal reward wins.
    CHECK(demand(theta, rat(1, 5)) == 0b01);
    CHECK(demand(theta, rat(3, 10)) == 0b11);
}

TEST_CASE("critical values need few demand queries", "[comb]") {
    const CombinatorialType theta = worked_additive();
    std::size_t queries = 0;
    const std::vector<Rat> cv = critical_values_comb(theta, demand, &queries);
    CHECK(cv == std::vector<Rat>{rat(1, 5), rat(3, 10)});
    CHECK(queries == 5);
    CHECK(queries <= 4 * cv.size() + 2);

    const CombinatorialType cov =
        make_comb_type(SuccessKind::coverage, {rat(1, 2), rat(1, 2)},
                       CostKind::additive, {rat(3, 50), rat(3, 25)}, r01());
    CHECK(critical_values_comb(cov, demand) ==
          std::vector<Rat>{rat(3, 25), rat(12, 25)});
}

TEST_CASE("sample minimization over combinatorial demand", "[comb]") {
    const auto [lc, value] = erm_linear_comb({worked_additive()}, r01(), demand);
    CHECK(lc.alpha == rat(3, 10));
    CHECK(value == rat(49, 100));

    CHECK_THROWS_AS(erm_linear_comb({}, r01(), demand), ValidationError);
    CHECK_THROWS_AS(
        erm_linear_comb({worked_additive()}, Rewards({Rat(0), Rat(2)}), demand),
        ValidationError);
}

TEST_CASE("construction rejects malformed families", "[comb]") {
    const Rewards r = r01();
    CHECK_THROWS_AS(make_comb_type(SuccessKind::additive, {}, CostKind::additive, {}, r),
                    ValidationError);
    CHECK_THROWS_AS(make_comb_type(SuccessKind::additive, std::vector<Rat>(21, rat(1, 2)),
                                   CostKind::additive, std::vector<Rat>(21, Rat(0)), r),
                    ValidationError);
    CHECK_THROWS_AS(make_comb_type(SuccessKind::additive, {rat(1, 2)}, CostKind::additive,
                                   {Rat(0), Rat(0)}, r),
                    ValidationError);
    CHECK_THROWS_AS(make_comb_type(SuccessKind::additive, {rat(3, 2)}, CostKind::additive,
                                   {Rat(0)}, r),
                    ValidationError);
    CHECK_THROWS_AS(make_comb_type(SuccessKind::additive, {rat(-1, 2)}, CostKind::additive,
                                   {Rat(0)}, r),
                    ValidationError);
    CHECK_THROWS_AS(make_comb_type(SuccessKind::additive, {rat(1, 2)}, CostKind::additive,
                                   {rat(-1, 10)}, r),
                    ValidationError);
    CHECK_THROWS_AS(make_comb_type(SuccessKind::additive, {rat(1, 2)}, CostKind::additive,
                                   {Rat(0)}, Rewards({Rat(0), rat(1, 2), Rat(1)})),
                    ValidationError);
    CHECK_THROWS_AS(make_type(CombinatorialType::Family::custom, {rat(1, 2)}, {Rat(0)}, r),
                    ValidationError);
}

TEST_CASE("broken custom evaluators are rejected at query time", "[comb]") {
    CombinatorialType theta{1, r01(), CombinatorialType::Family::custom, nullptr,
                            nullptr};
    CHECK_THROWS_AS(demand(theta, rat(1, 2)), ValidationError);  // no evaluators

    theta.cost = [](std::uint32_t) { return Rat(0); };
    theta.outcome_dist = [](std::uint32_t) {
        return std::vector<Rat>{rat(1, 2), rat(1, 4)};  // does not sum to 1
    };
    CHECK_THROWS_AS(demand(theta, rat(1, 2)), ValidationError);

    theta.outcome_dist = [](std::uint32_t) {
        return std::vector<Rat>{rat(1, 2)};  // wrong dimension
    };
    CHECK_THROWS_AS(demand(theta, rat(1, 2)), ValidationError);

    theta.outcome_dist = [](std::uint32_t) {
        return std::vector<Rat>{rat(3, 2), rat(-1, 2)};  // negative entry
    };
    CHECK_THROWS_AS(demand(theta, rat(1, 2)), ValidationError);

    theta.outcome_dist = [](std::uint32_t) {
        return std::vector<Rat>{rat(1, 2), rat(1, 2)};
    };
    theta.cost = [](std::uint32_t s) { return s ? rat(-1, 10) : Rat(0); };
    CHECK_THROWS_AS(demand(theta, rat(1, 2)), ValidationError);

    theta.ground = 0;
    CHECK_THROWS_AS(demand(theta, rat(1, 2)), ValidationError);
}

TEST_CASE("demand and critical values match the exhaustive oracle",
          "[comb][property]") {
    Rng rng(2471);
    const SuccessKind successes[] = {SuccessKind::additive, SuccessKind::coverage};
    const CostKind costs[] = {CostKind::additive, CostKind::supermodular};
    for (int trial = 0; trial < 200; ++trial) {
        const int ground = static_cast<int>(rng.next_in(2, 4));
        std::vector<Rat> q, w;
        for (int i = 0; i < ground; ++i) {
            q.push_back(rat(rng.next_in(0, 8), 8));
            w.push_back(rat(rng.next_in(0, 8), 16));
        }
        const SuccessKind success = successes[rng.next_below(2)];
        const CostKind cost = costs[rng.next_below(2)];
        const CombinatorialType theta = make_comb_type(success, q, cost, w, r01());

        std::size_t queries = 0;
        const std::vector<Rat> cv = critical_values_comb(theta, demand, &queries);
        REQUIRE(cv == oracles::naive_comb_breakpoints(theta));
        CHECK(queries <= 4 * cv.size() + 2);

        for (int k = 0; k < 4; ++k) {
            const Rat alpha = rat(rng.next_in(0, 64), 64);
            CHECK(demand(theta, alpha) == oracles::naive_demand(theta, alpha));
        }
    }
}
