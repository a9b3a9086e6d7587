#include "doctest.h"
#include "elrp/core.hpp"
#include "elrp/random.hpp"
#include "support/helpers.hpp"

using namespace elrp;

TEST_CASE("build_matrices from coordinates") {
    std::vector<Node> nodes(2);
    nodes[0] = {0, NodeKind::Depot, 0.0, 0.0};
    nodes[1] = {1, NodeKind::Customer, 0.0, 100.0, 0.0};
    EvParams ev{16.0, 10.0, 0.125, 100.0};
    Matrix t, e;
    build_matrices(nodes, ev, t, e);
    CHECK(e(0, 1) == doctest::Approx(12.5));
    CHECK(t(0, 1) == doctest::Approx(1.0));
    CHECK(e(1, 0) == doctest::Approx(12.5));
    CHECK(t(0, 0) == 0.0);

    nodes[1].x = 0.0;
    nodes[1].y = 0.0;  // co-located pair
    build_matrices(nodes, ev, t, e);
    CHECK(e(0, 1) == 0.0);
    CHECK(t(0, 1) == 0.0);

    nodes[1].x = std::numeric_limits<double>::quiet_NaN();
    CHECK_THROWS_AS(build_matrices(nodes, ev, t, e), std::invalid_argument);
}

TEST_CASE("triangle inequality holds on random instances") {
    Rng rng(11);
    for (int trial = 0; trial < 5; ++trial) {
        std::vector<Node> nodes;
        for (int i = 0; i < 5; ++i) {
            Node n;
            n.id = i;
            n.kind = i == 0 ? NodeKind::Depot : NodeKind::Customer;
            n.x = rng.uniform(0.0, 120.0);
            n.y = rng.uniform(0.0, 120.0);
            nodes.push_back(n);
        }
        EvParams ev{16.0, 10.0, 0.125, 40.0};
        Matrix t, e;
        build_matrices(nodes, ev, t, e);
        for (int i = 0; i < 5; ++i)
            for (int j = 0; j < 5; ++j)
                for (int k = 0; k < 5; ++k) {
                    CHECK(t(i, k) <= t(i, j) + t(j, k) + 1e-9);
                    CHECK(e(i, k) <= e(i, j) + e(j, k) + 1e-9);
                }
    }
}

TEST_CASE("instance validation") {
    test::InstanceBuilder b;
    b.customer(10.0, 0.0).station(20.0, 0.0, "moderate").function(test::example_function());
    const Instance inst = b.build();
    CHECK(inst.customers() == std::vector<NodeId>{1});
    CHECK(inst.stations() == std::vector<NodeId>{2});
    CHECK(inst.function_of(2).tech() == "moderate");
    CHECK_THROWS_AS(inst.function_of(1), std::invalid_argument);

    // station with unknown technology
    test::InstanceBuilder bad;
    bad.customer(10.0, 0.0).station(20.0, 0.0, "warp").function(test::example_function());
    CHECK_THROWS_AS(bad.build(), std::invalid_argument);

    // negative service time
    test::InstanceBuilder neg;
    neg.customer(10.0, 0.0, -1.0);
    CHECK_THROWS_AS(neg.build(), std::invalid_argument);
}

TEST_CASE("with_linearized_charging replaces every function by its secant") {
    test::InstanceBuilder b;
    b.customer(10.0, 0.0).station(20.0, 0.0, "moderate").function(test::example_function());
    const Instance lin = with_linearized_charging(b.build());
    for (const auto& [tech, f] : lin.charging_functions) {
        CHECK(f.segments() == 1);
        CHECK(f.time_to_full() == doctest::Approx(1.25));
    }
}
