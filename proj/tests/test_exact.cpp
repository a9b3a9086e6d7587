#include "doctest.h"
#include "elrp/exact.hpp"
#include "elrp/instance_io.hpp"
#include "support/helpers.hpp"

using namespace elrp;

TEST_CASE("single customer in range") {
    test::InstanceBuilder b;
    b.customer(30.0, 0.0, 0.5).station(60.0, 0.0, "moderate").function(test::example_function());
    const Instance inst = b.build();
    const ExactResult res = brute_force(inst);
    REQUIRE(res.found);
    CHECK(res.objective == doctest::Approx(2.0 * inst.travel_time(0, 1)));
    CHECK(res.solution.open_stations.empty());
    CHECK(res.solution.routes.size() == 1);
    const ValidationReport rep = validate_solution(inst, res.solution);
    CHECK(rep.feasible());
    CHECK(rep.objective == doctest::Approx(res.objective));
}

TEST_CASE("forced station stop charges the exact deficit") {
    test::InstanceBuilder b;
    b.ev.max_route_duration = 20.0;
    b.customer(56.0, 0.0, 0.5).station(80.0, 0.0, "moderate").function(test::example_function());
    const Instance inst = b.build();
    const ExactResult res = brute_force(inst);
    REQUIRE(res.found);
    REQUIRE(res.solution.open_stations == std::set<NodeId>{2});
    double charged = 0.0;
    for (const auto& r : res.solution.routes)
        for (const auto& c : r.charges) charged += c.q_out - c.q_in;
    CHECK(charged == doctest::Approx(4.0));  // 16 - (7 + 3 + 10) = -4
}

TEST_CASE("brute force agrees with the independent enumeration oracle") {
    io::GenParams p;
    p.n_customers = 4;
    p.n_stations = 2;
    int compared = 0;
    for (uint64_t seed = 0; seed < 20; ++seed) {
        const Instance inst = io::generate_synthetic(p, seed);
        bool oracle_found = false;
        const double oracle = test::oracle_optimum(inst, &oracle_found);
        const ExactResult res = brute_force(inst);
        REQUIRE(res.found == oracle_found);
        if (res.found) {
            CHECK(res.objective == doctest::Approx(oracle).epsilon(1e-9));
            ++compared;
        }
    }
    CHECK(compared >= 15);
}

TEST_CASE("solve_exact matches brute force") {
    io::GenParams p;
    p.n_customers = 5;
    p.n_stations = 2;
    for (uint64_t seed = 40; seed < 48; ++seed) {
        const Instance inst = io::generate_synthetic(p, seed);
        const ExactResult bf = brute_force(inst);
        const ExactResult bb = solve_exact(inst);
        REQUIRE(bf.found == bb.found);
        if (bf.found) {
            CHECK(bb.optimal);
            CHECK(bb.objective == doctest::Approx(bf.objective).epsilon(1e-6));
            CHECK(bb.bound <= bb.objective + 1e-9);
            CHECK(validate_solution(inst, bb.solution).feasible());
        }
    }
}

TEST_CASE("solve_exact is deterministic") {
    const Instance inst = io::generate_synthetic(4, 2, 77);
    const ExactResult a = solve_exact(inst);
    const ExactResult b = solve_exact(inst);
    REQUIRE(a.found == b.found);
    CHECK(a.objective == b.objective);
    CHECK(serialize_solution(a.solution) == serialize_solution(b.solution));
}

TEST_CASE("infeasible instances produce a certificate") {
    test::InstanceBuilder b;
    b.ev.max_route_duration = 50.0;
    b.customer(100.0, 0.0);  // 25 kWh round trip, no stations anywhere near
    b.station(100.0, 120.0, "moderate").function(test::example_function());
    const Instance inst = b.build();
    const ExactResult res = brute_force(inst);
    CHECK(!res.found);
    CHECK(!res.infeasibility.empty());
    const ExactResult bb = solve_exact(inst);
    CHECK(!bb.found);
    CHECK(!bb.infeasibility.empty());
}

TEST_CASE("budget cutoff returns an incumbent with a valid bound") {
    const Instance inst = io::generate_synthetic(5, 2, 3);
    SearchLimits limits;
    limits.node_budget = 50;  // force an early stop
    const ExactResult res = solve_exact(inst, limits);
    CHECK(!res.optimal);
    if (res.found) CHECK(res.bound <= res.objective + 1e-9);
}

TEST_CASE("generated instances are always solvable") {
    // the generator's sufficiency check promises at least one feasible plan
    for (uint64_t seed = 200; seed < 212; ++seed) {
        const Instance inst = io::generate_synthetic(3, 2, seed);
        CHECK(brute_force(inst).found);
    }
}
