#include <catch2/catch_amalgamated.hpp>

#include <cmath>
#include <cstdlib>

#include "contractlab/bounded.hpp"
#include "contractlab/generators.hpp"
#include "oracles.hpp"

using namespace contractlab;

namespace {

const Rewards r01() { return Rewards({Rat(0), Rat(1)}); }

double min_angle_to(const DirectionNet& net, const std::vector<double>& u) {
    double best = 4.0;  // anything above pi
    for (std::size_t i = 0; i < net.size(); ++i) {
        double dot = 0;
        for (int j = 0; j < net.m; ++j) dot += net.vectors[i * net.m + j] * u[j];
        dot = std::min(1.0, std::max(-1.0, dot));
        best = std::min(best, std::acos(dot));
    }
    return best;
}

}  // namespace

TEST_CASE("direction net vectors are unit length", "[bounded]") {
    const DirectionNet net = direction_net(2, rat(1, 2));
    CHECK(net.size() == 96);
    for (std::size_t i = 0; i < net.size(); ++i) {
        double norm = 0;
        for (int j = 0; j < net.m; ++j) {
            const double v = net.vectors[i * net.m + j];
            norm += v * v;
        }
        CHECK(std::abs(std::sqrt(norm) - 1.0) <= 1e-12);
    }
}

TEST_CASE("direction net covers the sphere at its resolution", "[bounded][property]") {
    Rng rng(771);
    {
        const DirectionNet net = direction_net(2, rat(1, 2));
        for (int k = 0; k < 200; ++k) {
            const double phi = rng.next_double() * 2.0 * 3.14159265358979323846;
            CHECK(min_angle_to(net, {std::cos(phi), std::sin(phi)}) <= 0.5);
        }
    }
    {
        const DirectionNet net = direction_net(3, rat(7, 10));
        for (int k = 0; k < 200; ++k) {
            std::vector<double> u(3);
            double norm = 0;
            do {
                norm = 0;
                for (double& v : u) {
                    v = 2.0 * rng.next_double() - 1.0;
                    norm += v * v;
                }
            } while (norm < 1e-2 || norm > 1.0);
            norm = std::sqrt(norm);
            for (double& v : u) v /= norm;
            CHECK(min_angle_to(net, u) <= 0.7);
        }
    }
}

TEST_CASE("direction net rejects bad resolutions", "[bounded]") {
    CHECK_THROWS_AS(direction_net(2, rat(8, 5)), ValidationError);
    CHECK_THROWS_AS(direction_net(2, Rat(0)), ValidationError);
    CHECK_THROWS_AS(direction_net(0, rat(1, 2)), ValidationError);
    CHECK_THROWS_AS(direction_net(3, rat(1, 1000)), ResourceCapError);
}

TEST_CASE("polar payment grid has the pinned shape", "[bounded]") {
    const BoundedGrid grid = bounded_grid(r01(), rat(1, 5));
    CHECK(grid.eps_bar == rat(1, 142));
    CHECK(grid.m == 2);
    CHECK(grid.size() == 2837372);
    for (const std::int64_t p : grid.payments) {
        CHECK(p >= 0);
        CHECK(p <= kSnapDenominator);
    }

    // Some grid point lands within 1/100 of the contract (0, 1/4) in L-inf.
    const std::int64_t target = kSnapDenominator / 4;
    std::int64_t best = kSnapDenominator;
    for (std::size_t i = 0; i < grid.size(); ++i) {
        const std::int64_t d0 = std::abs(grid.payments[2 * i]);
        const std::int64_t d1 = std::abs(grid.payments[2 * i + 1] - target);
        best = std::min(best, std::max(d0, d1));
    }
    CHECK(best <= kSnapDenominator / 100);
}

TEST_CASE("polar grid radial step scales with eps", "[bounded]") {
    CHECK(bounded_grid(r01(), rat(1, 2)).eps_bar == rat(1, 57));
    CHECK_THROWS_AS(bounded_grid(r01(), rat(1, 5), 10), ResourceCapError);
    CHECK_THROWS_AS(bounded_grid(r01(), Rat(1)), ValidationError);
    CHECK_THROWS_AS(bounded_grid(Rewards({Rat(0), Rat(2)}), rat(1, 5)),
                    ValidationError);
}

TEST_CASE("search space constructors validate their input", "[bounded]") {
    CHECK_THROWS_AS(ContractSearchSpace::box_grid(3, rat(1, 100), 1'000'000),
                    ResourceCapError);
    CHECK_THROWS_AS(ContractSearchSpace::box_grid(0, rat(1, 2)), ValidationError);
    CHECK_THROWS_AS(ContractSearchSpace::box_grid(2, Rat(0)), ValidationError);
    CHECK_THROWS_AS(ContractSearchSpace::from_contracts({}), ValidationError);

    const ContractSearchSpace box = ContractSearchSpace::box_grid(2, rat(1, 2));
    CHECK(box.size() == 9);
    CHECK(box.m() == 2);
    CHECK(box.contract_at(0) == zero_contract(2));
    CHECK(box.contract_at(1) == Contract(std::vector<Rat>{Rat(0), rat(1, 2)}));
}

TEST_CASE("exact set optimization on the hard distribution", "[bounded]") {
    const Instance d1 = gen_d1_linear(rat(1, 20));
    const TypeDistribution d = d1.distribution();

    const auto [c_box, v_box] = opt_over_set(
        d1.rewards, d, ContractSearchSpace::box_grid(2, rat(1, 2)), Rat(0));
    CHECK(c_box == Contract(std::vector<Rat>{Rat(0), rat(1, 2)}));
    CHECK(v_box == rat(1, 4));

    const auto lin = ContractSearchSpace::from_linear_grid(eps_grid(rat(1, 2)), d1.rewards);
    const auto [c_lin, v_lin] = opt_over_set(d1.rewards, d, lin, Rat(0));
    CHECK(c_lin == Contract(std::vector<Rat>{Rat(0), rat(1, 2)}));
    CHECK(v_lin == rat(1, 4));
}

TEST_CASE("set optimization validates its arguments", "[bounded]") {
    const Instance d1 = gen_d1_linear(rat(1, 20));
    const TypeDistribution d = d1.distribution();
    CHECK_THROWS_AS(opt_over_set(d1.rewards, d, ContractSearchSpace::box_grid(2, rat(1, 2)),
                                 rat(-1, 10)),
                    ValidationError);
    CHECK_THROWS_AS(opt_over_set(d1.rewards, d, ContractSearchSpace::box_grid(3, rat(1, 2)),
                                 Rat(0)),
                    ValidationError);
}

TEST_CASE("set optimization matches the exhaustive oracle", "[bounded][property]") {
    Rng rng(772);
    for (int trial = 0; trial < 100; ++trial) {
        const int m = static_cast<int>(rng.next_in(2, 3));
        const Rewards r = random_rewards(m, rng);
        std::vector<AgentType> types;
        const int n_types = static_cast<int>(rng.next_in(1, 2));
        for (int s = 0; s < n_types; ++s)
            types.push_back(random_type(static_cast<int>(rng.next_in(1, 3)), m, rng));
        const TypeDistribution d = random_distribution(std::move(types), rng);

        const ContractSearchSpace space =
            (trial % 2 == 0) ? ContractSearchSpace::box_grid(m, rat(1, 3))
                             : ContractSearchSpace::from_linear_grid(eps_grid(rat(1, 2)), r);
        const auto got = opt_over_set(r, d, space, Rat(0));
        const auto want = oracles::naive_opt_over_set(r, d, space);
        REQUIRE(got.second == want.second);
        REQUIRE(got.first == want.first);
    }
}

TEST_CASE("sample minimization over a payment box", "[bounded]") {
    const Instance inst = gen_grid_forcing({rat(1, 4)}, r01());
    const Contract c = erm_bounded(inst.types, inst.rewards,
                                   ContractSearchSpace::box_grid(2, rat(1, 4)), Rat(0));
    CHECK(c == Contract(std::vector<Rat>{Rat(0), rat(1, 4)}));
    CHECK_THROWS_AS(erm_bounded({}, inst.rewards,
                                ContractSearchSpace::box_grid(2, rat(1, 4)), Rat(0)),
                    ValidationError);
}
