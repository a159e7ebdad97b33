#include <catch2/catch_amalgamated.hpp>

#include "contractlab/generators.hpp"
#include "contractlab/model.hpp"
#include "oracles.hpp"

using namespace contractlab;

namespace {

AgentType hard_theta1() {
    const Rat h = rat(1, 2);
    return AgentType({{h, h}, {h, h}}, {Cost(Rat(0)), Cost(rat(1, 4))});
}

AgentType hard_theta2() {
    const Rat h = rat(1, 2);
    return AgentType({{Rat(1), Rat(0)}, {h, h}}, {Cost(Rat(0)), Cost(rat(1, 4))});
}

const Rewards r01() { return Rewards({Rat(0), Rat(1)}); }

}  // namespace

TEST_CASE("agent utility is expected payment minus cost", "[model]") {
    const AgentType theta = hard_theta2();
    const Contract t(std::vector<Rat>{Rat(0), rat(2, 5)});
    CHECK(*agent_utility(theta, t, 0) == 0);
    CHECK(*agent_utility(theta, t, 1) == rat(-1, 20));

    AgentType blocked({{Rat(1), Rat(0)}, {Rat(0), Rat(1)}}, {Cost(Rat(0)), Cost::inf()});
    CHECK_FALSE(agent_utility(blocked, t, 1).has_value());
    CHECK_THROWS_AS(agent_utility(theta, t, 2), ValidationError);
}

TEST_CASE("best response breaks agent ties in the principal's favor", "[model]") {
    const Rewards r = r01();
    const AgentType theta = hard_theta2();
    // At t = (0, 1/2) both actions give the agent exactly 0; the costly
    // action earns the principal 1/4 instead of 0 and must win.
    const Contract t(std::vector<Rat>{Rat(0), rat(1, 2)});
    CHECK(*agent_utility(theta, t, 0) == *agent_utility(theta, t, 1));
    CHECK(best_response(r, theta, t) == 1);
    CHECK(principal_action_utility(r, theta, t, 1) == rat(1, 4));
    CHECK(principal_utility(r, theta, t) == rat(1, 4));
    CHECK(principal_reward(r, theta, t) == rat(1, 2));
}

TEST_CASE("full ties fall back to the smallest action index", "[model]") {
    const Rewards r = r01();
    const Rat h = rat(1, 2);
    // Two identical actions: same utility for both sides.
    AgentType twin({{h, h}, {h, h}}, {Cost(Rat(0)), Cost(Rat(0))});
    CHECK(best_response(r, twin, zero_contract(2)) == 0);
}

TEST_CASE("unavailable actions never win the argmax", "[model]") {
    const Rewards r = r01();
    // The blocked action would dominate everything if it were available.
    AgentType theta({{Rat(1), Rat(0)}, {Rat(0), Rat(1)}}, {Cost(Rat(0)), Cost::inf()});
    const Contract generous(std::vector<Rat>{Rat(0), Rat(1)});
    CHECK(best_response(r, theta, generous) == 0);

    AgentType nothing({{Rat(1), Rat(0)}}, {Cost(Rat(0))});
    CHECK_NOTHROW(best_response(r, nothing, zero_contract(2)));
}

TEST_CASE("expected utility weighs types exactly", "[model]") {
    const Instance inst = gen_d1_linear(rat(1, 20));
    const TypeDistribution d = inst.distribution();
    // Under the zero contract only the all-split type produces: reward 1/2
    // with weight 3/10.
    CHECK(expected_principal_utility(inst.rewards, d, zero_contract(2)) == rat(3, 20));
}

TEST_CASE("input validation rejects malformed pieces", "[model]") {
    CHECK_THROWS_AS(Rewards({Rat(1), Rat(0)}), ValidationError);
    CHECK_THROWS_AS(Rewards({Rat(0), Rat(0)}), ValidationError);
    CHECK_THROWS_AS(Rewards({Rat(0)}), ValidationError);
    CHECK_THROWS_AS(Rewards({Rat(0), rat(-1, 2)}), ValidationError);

    const Rat h = rat(1, 2);
    CHECK_THROWS_AS(AgentType({{h, h, h}}, {Cost(Rat(0))}), ValidationError);
    CHECK_THROWS_AS(AgentType({{h, h}}, {Cost(rat(1, 4))}), ValidationError);
    CHECK_THROWS_AS(AgentType({{h, h}}, {Cost(Rat(0)), Cost(Rat(0))}), ValidationError);
    CHECK_THROWS_AS(Cost(rat(-1, 4)), ValidationError);

    CHECK_THROWS_AS(Contract(std::vector<Rat>{rat(-1, 10)}), ValidationError);

    CHECK_THROWS_AS(TypeDistribution({hard_theta1()}, {rat(1, 2)}), ValidationError);
    CHECK_THROWS_AS(TypeDistribution({hard_theta1()}, {rat(1, 2), rat(1, 2)}),
                    ValidationError);
    CHECK_NOTHROW(TypeDistribution({hard_theta1(), hard_theta2()}, {Rat(0), Rat(1)}));
}

TEST_CASE("payments may exceed every reward", "[model]") {
    // The unbounded constructions rely on payments above the top reward.
    CHECK_NOTHROW(Contract(std::vector<Rat>{rat(10, 3), Rat(0), Rat(0)}));
}

TEST_CASE("payment order is lexicographic", "[model]") {
    CHECK(payments_less({Rat(0), Rat(1)}, {Rat(1), Rat(0)}));
    CHECK_FALSE(payments_less({Rat(1), Rat(0)}, {Rat(0), Rat(1)}));
    CHECK(payments_less({Rat(0)}, {Rat(0), Rat(0)}));
    CHECK_FALSE(payments_less({Rat(0), Rat(1)}, {Rat(0), Rat(1)}));
}

TEST_CASE("linear payments scale the reward vector", "[model]") {
    const Rewards r({Rat(0), rat(1, 2), Rat(1)});
    const Contract t = linear_payments(LinearContract(rat(2, 3)), r);
    CHECK(t.t == std::vector<Rat>{Rat(0), rat(1, 3), rat(2, 3)});
    CHECK(zero_contract(3).t == std::vector<Rat>(3, Rat(0)));
    CHECK_THROWS_AS(LinearContract(rat(3, 2)), ValidationError);
    CHECK_THROWS_AS(LinearContract(rat(-1, 2)), ValidationError);
}

TEST_CASE("binary reduction preserves linear-contract behavior", "[model]") {
    const Rewards r({Rat(0), rat(1, 2), Rat(1)});
    AgentType theta({{rat(1, 2), rat(1, 4), rat(1, 4)},
                     {Rat(0), rat(1, 2), rat(1, 2)}},
                    {Cost(Rat(0)), Cost(rat(1, 4))});
    const AgentType bin = to_binary(theta, r);
    const Rewards br = binary_rewards(r);
    CHECK(br.values == std::vector<Rat>{Rat(0), Rat(1)});
    CHECK(bin.f[0] == std::vector<Rat>{rat(5, 8), rat(3, 8)});
    CHECK(bin.f[1] == std::vector<Rat>{rat(1, 4), rat(3, 4)});

    // Same agent utilities and the same principal reward at every alpha.
    for (long k = 0; k <= 8; ++k) {
        const Rat alpha = rat(k, 8);
        const Contract t = linear_payments(LinearContract(alpha), r);
        const Contract tb = linear_payments(LinearContract(alpha), br);
        for (int i = 0; i < theta.actions(); ++i)
            CHECK(*agent_utility(theta, t, i) == *agent_utility(bin, tb, i));
        CHECK(principal_reward(r, theta, t) == principal_reward(br, bin, tb));
    }
}

TEST_CASE("binary reduction is invariant under reward scaling", "[model]") {
    // Scaling all rewards by a positive factor scales the success
    // probabilities not at all: p = f.r / max r is scale-free.
    const Rewards r({Rat(0), rat(1, 2), Rat(1)});
    std::vector<Rat> scaled_values;
    for (const Rat& v : r.values) scaled_values.push_back(v * rat(3, 7));
    const Rewards scaled(std::move(scaled_values));
    AgentType theta({{rat(1, 2), rat(1, 4), rat(1, 4)},
                     {Rat(0), rat(1, 2), rat(1, 2)}},
                    {Cost(Rat(0)), Cost(rat(1, 4))});
    CHECK(to_binary(theta, r) == to_binary(theta, scaled));
}

TEST_CASE("best response agrees with the three-pass reference", "[model][property]") {
    Rng rng(2026'08'16);
    for (int trial = 0; trial < 300; ++trial) {
        const int m = static_cast<int>(rng.next_in(2, 4));
        const int n = static_cast<int>(rng.next_in(1, 6));
        const Rewards r = random_rewards(m, rng);
        const AgentType theta = random_type(n, m, rng);
        std::vector<Rat> pay(m);
        for (int j = 0; j < m; ++j) pay[j] = rat(rng.next_in(0, 10), 10);
        const Contract t(std::move(pay));

        const int got = best_response(r, theta, t);
        const int want = oracles::naive_best_response(r, theta, t);
        REQUIRE(got == want);
        CHECK(principal_utility(r, theta, t) ==
              principal_action_utility(r, theta, t, want));
    }
}
