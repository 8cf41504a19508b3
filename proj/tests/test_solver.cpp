#include <doctest.h>

#include <algorithm>

#include "mobility/solver.hpp"
#include "support/random_scenario.hpp"

using namespace mobility;
using namespace mobility::solver;

namespace {

std::vector<network::TravelerId> everyone(const network::Scenario& s) {
    std::vector<network::TravelerId> ids;
    for (const auto& t : s.travelers) ids.push_back(t.id);
    return ids;
}

}  // namespace

TEST_CASE("single traveler takes the cheapest feasible option") {
    mobility::testing::ScenarioOptions opt;
    opt.travelers = 1;
    opt.services = 2;
    const auto s = mobility::testing::random_scenario(3, opt);

    const auto result = solve_subclass({1}, s, s.planner);
    REQUIRE(result.status == SolveStatus::optimal);

    const SubclassContext ctx({1}, s, s.planner);
    double best = std::numeric_limits<double>::infinity();
    int best_j = -1;
    for (int j = 0; j < ctx.menu_size(); ++j)
        if (ctx.member_cost(0, j, 0) < best) {
            best = ctx.member_cost(0, j, 0);
            best_j = j;
        }
    CHECK(result.assignment.services[0] == ctx.menu()[static_cast<std::size_t>(best_j)]);
    CHECK(result.objective == doctest::Approx(best));
}

TEST_CASE("branch and bound equals exhaustive enumeration with identical ties") {
    for (std::uint64_t seed = 0; seed < 60; ++seed) {
        mobility::testing::ScenarioOptions opt;
        opt.travelers = 2 + static_cast<int>(seed % 5);  // 2..6
        opt.services = 1 + static_cast<int>(seed % 3);   // 1..3
        const auto s = mobility::testing::random_scenario(seed, opt);

        const auto fast = solve_subclass(everyone(s), s, s.planner);
        const auto slow = brute_force_solve(everyone(s), s, s.planner);

        REQUIRE(fast.status == slow.status);
        if (fast.status == SolveStatus::optimal) {
            CHECK(fast.objective == doctest::Approx(slow.objective).epsilon(1e-9));
            CHECK(fast.assignment == slow.assignment);
        }
    }
}

TEST_CASE("capacity one forces a lexicographically resolved competition") {
    // Two identical travelers, one attractive service with a single seat.
    network::Scenario s;
    s.network.nodes = {"A", "B"};
    s.network.links = {{"A", "B", 1, 10.0}};
    s.services = {{0, 10, 8.0, 0.0, true}, {1, 1, 1.0, 0.0, false}};
    for (int i = 1; i <= 2; ++i) {
        network::Traveler t;
        t.id = i;
        t.origin = "A";
        t.destination = "B";
        t.max_willingness_to_pay = 20.0;
        t.discount_rate = 0.5;
        t.preferences.preferred_travel_time = 10.0;
        t.preferences.max_co_travelers = {{0, 2}, {1, 2}};
        t.preferences.value_of_time = {{0, 0.5}, {1, 0.5}};
        s.travelers.push_back(t);
    }
    s.validate();

    const auto fast = solve_subclass({1, 2}, s, s.planner);
    const auto slow = brute_force_solve({1, 2}, s, s.planner);
    REQUIRE(fast.status == SolveStatus::optimal);
    CHECK(fast.assignment == slow.assignment);
    // both allocations cost the same; the lexicographically smaller
    // assignment vector (0, 1) puts traveler 1 on the fallback (id 0) and
    // hands traveler 2 the seat
    CHECK(fast.assignment.service_of(1) == 0);
    CHECK(fast.assignment.service_of(2) == 1);
    CHECK(solver::SolveStatus::optimal == fast.status);
}

TEST_CASE("an equity bound of zero on unequal inconveniences is infeasible") {
    // traveler 1 wants to arrive instantly (every trip is a delay), traveler
    // 2 tolerates anything: inconveniences are unequal under every
    // assignment, so a Gini bound of zero empties the feasible set
    network::Scenario s;
    s.network.nodes = {"A", "B"};
    s.network.links = {{"A", "B", 1, 10.0}};
    s.services = {{0, 9, 4.0, 0.0, true}, {1, 2, 2.0, 0.0, false}};
    for (int i = 1; i <= 2; ++i) {
        network::Traveler t;
        t.id = i;
        t.origin = "A";
        t.destination = "B";
        t.max_willingness_to_pay = 50.0;
        t.discount_rate = 0.5;
        t.preferences.preferred_travel_time = i == 1 ? 0.0 : 100.0;
        t.preferences.max_co_travelers = {{0, 3}, {1, 3}};
        t.preferences.value_of_time = {{0, 0.9}, {1, 0.9}};
        s.travelers.push_back(t);
    }
    s.planner.equity_gmax = 0.0;
    s.validate();

    const auto fast = solve_subclass(everyone(s), s, s.planner);
    const auto slow = brute_force_solve(everyone(s), s, s.planner);
    CHECK(fast.status == slow.status);
    CHECK(fast.status == SolveStatus::infeasible);

    // lifting the bound restores feasibility
    auto relaxed = s;
    relaxed.planner.equity_gmax = 1.0;
    CHECK(solve_subclass(everyone(s), relaxed, relaxed.planner).status ==
          SolveStatus::optimal);
}

TEST_CASE("equity-bounded instances still match the oracle") {
    for (std::uint64_t seed = 0; seed < 30; ++seed) {
        mobility::testing::ScenarioOptions opt;
        opt.travelers = 4;
        opt.services = 2;
        opt.equity_gmax = 0.2 + 0.2 * static_cast<double>(seed % 3);
        const auto s = mobility::testing::random_scenario(seed, opt);

        const auto fast = solve_subclass(everyone(s), s, s.planner);
        const auto slow = brute_force_solve(everyone(s), s, s.planner);
        REQUIRE(fast.status == slow.status);
        if (fast.status == SolveStatus::optimal) {
            CHECK(fast.objective == doctest::Approx(slow.objective).epsilon(1e-9));
            CHECK(fast.assignment == slow.assignment);
            // post-check the constraints with the independent evaluators
            const SubclassContext ctx(everyone(s), s, s.planner);
            std::vector<int> choice;
            for (auto sid : fast.assignment.services)
                choice.push_back(static_cast<int>(
                    std::find(ctx.menu().begin(), ctx.menu().end(), sid) -
                    ctx.menu().begin()));
            CHECK(ctx.capacity_ok(choice));
            CHECK(ctx.equity_ok(choice));
        }
    }
}

TEST_CASE("the partial lower bound never exceeds the best completion") {
    for (std::uint64_t seed = 0; seed < 20; ++seed) {
        mobility::testing::ScenarioOptions opt;
        opt.travelers = 4;
        opt.services = 2;
        const auto s = mobility::testing::random_scenario(seed, opt);
        const SubclassContext ctx(everyone(s), s, s.planner);
        Rng rng(derive_seed(seed, 5));

        for (int round = 0; round < 20; ++round) {
            const int depth = rng.uniform_int(0, ctx.member_count() - 1);
            std::vector<int> prefix;
            std::vector<int> count(static_cast<std::size_t>(ctx.menu_size()), 0);
            for (int i = 0; i < depth; ++i) {
                int j;
                do {
                    j = rng.uniform_int(0, ctx.menu_size() - 1);
                } while (count[static_cast<std::size_t>(j)] >= ctx.capacity(j));
                prefix.push_back(j);
                ++count[static_cast<std::size_t>(j)];
            }
            const double bound = ctx.partial_lower_bound(prefix);

            // enumerate all capacity-feasible completions
            double best = std::numeric_limits<double>::infinity();
            std::vector<int> completion(
                static_cast<std::size_t>(ctx.member_count() - depth), 0);
            while (true) {
                std::vector<int> full = prefix;
                full.insert(full.end(), completion.begin(), completion.end());
                if (ctx.capacity_ok(full)) best = std::min(best, ctx.evaluate(full));
                int pos = static_cast<int>(completion.size()) - 1;
                while (pos >= 0 && completion[static_cast<std::size_t>(pos)] ==
                                       ctx.menu_size() - 1) {
                    completion[static_cast<std::size_t>(pos)] = 0;
                    --pos;
                }
                if (pos < 0) break;
                ++completion[static_cast<std::size_t>(pos)];
            }
            CHECK(bound <= best + 1e-9);
        }
    }
}

TEST_CASE("solving is deterministic") {
    mobility::testing::ScenarioOptions opt;
    opt.travelers = 5;
    opt.services = 3;
    const auto s = mobility::testing::random_scenario(17, opt);

    const auto a = solve_subclass(everyone(s), s, s.planner);
    const auto b = solve_subclass(everyone(s), s, s.planner);
    CHECK(a.objective == b.objective);  // bit-identical
    CHECK(a.assignment == b.assignment);
    CHECK(a.explored_nodes == b.explored_nodes);
}

TEST_CASE("solve_all handles subclasses independently and in order") {
    mobility::testing::ScenarioOptions opt;
    opt.travelers = 6;
    opt.services = 2;
    opt.subclasses = 2;
    const auto s = mobility::testing::random_scenario(23, opt);

    const auto results = solve_all(s, s.planner);
    REQUIRE(results.size() == 2);
    for (const auto& r : results) CHECK(r.status == SolveStatus::optimal);

    SUBCASE("matches per-subclass solves") {
        const auto partition = network::partition_subclasses(s.travelers);
        for (std::size_t k = 0; k < partition.subclasses.size(); ++k) {
            const auto direct = solve_subclass(partition.subclasses[k], s, s.planner);
            CHECK(direct.objective == results[k].objective);
            CHECK(direct.assignment == results[k].assignment);
        }
    }

    SUBCASE("worker count does not change anything") {
        const auto parallel = solve_all(s, s.planner, 4);
        REQUIRE(parallel.size() == results.size());
        for (std::size_t k = 0; k < results.size(); ++k) {
            CHECK(parallel[k].objective == results[k].objective);
            CHECK(parallel[k].assignment == results[k].assignment);
            CHECK(parallel[k].explored_nodes == results[k].explored_nodes);
        }
    }

    SUBCASE("a single subclass degenerates to solve_subclass") {
        mobility::testing::ScenarioOptions one;
        one.travelers = 4;
        one.services = 2;
        const auto s1 = mobility::testing::random_scenario(29, one);
        const auto all = solve_all(s1, s1.planner);
        REQUIRE(all.size() == 1);
        const auto direct = solve_subclass(everyone(s1), s1, s1.planner);
        CHECK(all[0].objective == direct.objective);
        CHECK(all[0].assignment == direct.assignment);
    }
}

TEST_CASE("permuting traveler ids preserves subclass objectives") {
    mobility::testing::ScenarioOptions opt;
    opt.travelers = 4;
    opt.services = 2;
    opt.subclasses = 2;
    const auto s = mobility::testing::random_scenario(31, opt);

    // swap the ids of travelers 1 and 3 (same subclass under round-robin)
    network::Scenario permuted = s;
    for (auto& t : permuted.travelers) {
        if (t.id == 1) t.id = 3;
        else if (t.id == 3) t.id = 1;
    }
    std::sort(permuted.travelers.begin(), permuted.travelers.end(),
              [](const auto& a, const auto& b) { return a.id < b.id; });

    const auto base = solve_all(s, s.planner);
    const auto relabeled = solve_all(permuted, permuted.planner);
    REQUIRE(base.size() == relabeled.size());
    for (std::size_t k = 0; k < base.size(); ++k)
        CHECK(base[k].objective == doctest::Approx(relabeled[k].objective));
}

TEST_CASE("brute force refuses oversized enumerations") {
    mobility::testing::ScenarioOptions opt;
    opt.travelers = 12;
    opt.services = 3;
    const auto s = mobility::testing::random_scenario(37, opt);
    CHECK_THROWS_AS(brute_force_solve(everyone(s), s, s.planner), InstanceTooLargeError);
}

TEST_CASE("empty subclasses are rejected") {
    mobility::testing::ScenarioOptions opt;
    const auto s = mobility::testing::random_scenario(41, opt);
    CHECK_THROWS_AS(solve_subclass({}, s, s.planner), ValidationError);
}
