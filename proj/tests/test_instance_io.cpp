#include "doctest.h"
#include "elrp/instance_io.hpp"
#include "support/helpers.hpp"

using namespace elrp;

namespace {

const char* kMinimal = R"JSON({
  "schema_version": 1,
  "name": "mini",
  "ev": {"battery_capacity_kwh": 16.0, "consumption_rate_kwh_per_km": 0.125,
         "max_route_duration_h": 10.0, "speed_km_per_h": 40.0},
  "limits": {"max_stations": 1, "max_routes": 1},
  "charging_functions": {"slow": [[0,0],[10,0.5],[16,1.25]]},
  "nodes": [
    {"id": 0, "kind": "depot", "x": 0, "y": 0},
    {"id": 1, "kind": "customer", "x": 10, "y": 0, "service_time_h": 0.4},
    {"id": 2, "kind": "station", "x": 20, "y": 0, "tech": "slow"}
  ]
})JSON";

}  // namespace

TEST_CASE("parse_instance on a minimal file") {
    const Instance inst = io::parse_instance(kMinimal);
    CHECK(inst.num_nodes() == 3);
    CHECK(inst.name == "mini");
    CHECK(inst.nodes[1].service_time == doctest::Approx(0.4));
    CHECK(inst.energy(0, 1) == doctest::Approx(1.25));
    CHECK(inst.charging_functions.at("slow").segments() == 2);
}

TEST_CASE("serialize/parse round trip is byte identical") {
    const std::string normalized = io::serialize_instance(io::parse_instance(kMinimal));
    const std::string twice = io::serialize_instance(io::parse_instance(normalized));
    CHECK(normalized == twice);
}

TEST_CASE("malformed instances are rejected with context") {
    // decreasing breakpoint times
    std::string bad = kMinimal;
    bad.replace(bad.find("[16,1.25]"), 9, "[16,0.25]");
    CHECK_THROWS_WITH_AS(io::parse_instance(bad),
                         doctest::Contains("strictly increasing"), std::runtime_error);
    // missing depot
    std::string nodepot = kMinimal;
    nodepot.replace(nodepot.find("\"depot\""), 7, "\"customer\"");
    CHECK_THROWS_AS(io::parse_instance(nodepot), std::runtime_error);
    CHECK_THROWS_AS(io::parse_instance("{not json"), std::runtime_error);
}

TEST_CASE("extend_to_elrp doubles the candidate set") {
    io::GenParams p;
    p.n_customers = 10;
    p.n_stations = 2;
    const Instance evrp = io::generate_synthetic(p, 99);
    REQUIRE(evrp.stations().size() == 2);
    const Instance elrp = io::extend_to_elrp(evrp, 5);

    CHECK(elrp.stations().size() == 4);
    CHECK(elrp.max_stations == 2);
    CHECK(elrp.customers() == evrp.customers());
    CHECK(elrp.max_routes == evrp.max_routes);
    // original nodes untouched
    for (int i = 0; i < evrp.num_nodes(); ++i) {
        CHECK(elrp.nodes[i].kind == evrp.nodes[i].kind);
        CHECK(elrp.nodes[i].x == evrp.nodes[i].x);
        CHECK(elrp.nodes[i].tech == evrp.nodes[i].tech);
    }
    // the new candidates co-locate with distinct customers and use the
    // slowest original technology
    TechId slowest;
    double worst = -1;
    for (const auto& [tech, f] : evrp.charging_functions)
        if (f.time_to_full() > worst) {
            worst = f.time_to_full();
            slowest = tech;
        }
    std::set<std::pair<double, double>> customer_pos;
    for (NodeId c : evrp.customers()) customer_pos.insert({evrp.nodes[c].x, evrp.nodes[c].y});
    std::set<std::pair<double, double>> new_pos;
    for (int i = evrp.num_nodes(); i < elrp.num_nodes(); ++i) {
        CHECK(elrp.nodes[i].is_station());
        CHECK(elrp.nodes[i].tech == slowest);
        CHECK(customer_pos.count({elrp.nodes[i].x, elrp.nodes[i].y}) == 1);
        new_pos.insert({elrp.nodes[i].x, elrp.nodes[i].y});
    }
    CHECK(new_pos.size() == 2);  // distinct customers drawn

    // determinism
    const Instance again = io::extend_to_elrp(evrp, 5);
    CHECK(io::serialize_instance(again) == io::serialize_instance(elrp));
    const Instance other = io::extend_to_elrp(evrp, 6);
    CHECK(io::serialize_instance(other) != io::serialize_instance(elrp));
}

TEST_CASE("extend_to_elrp needs enough customers") {
    test::InstanceBuilder b;
    b.max_stations = 2;
    b.customer(10.0, 0.0)
        .station(20.0, 0.0, "moderate")
        .station(30.0, 0.0, "moderate")
        .function(test::example_function());
    CHECK_THROWS_AS(io::extend_to_elrp(b.build(), 1), std::invalid_argument);
}

TEST_CASE("generate_synthetic: deterministic, paper defaults, concave functions") {
    const Instance a = io::generate_synthetic(5, 2, 7);
    const Instance b = io::generate_synthetic(5, 2, 7);
    CHECK(io::serialize_instance(a) == io::serialize_instance(b));
    CHECK(io::serialize_instance(a) != io::serialize_instance(io::generate_synthetic(5, 2, 8)));

    CHECK(a.ev.battery_capacity == doctest::Approx(16.0));
    CHECK(a.ev.consumption_rate == doctest::Approx(0.125));
    CHECK(a.ev.max_route_duration == doctest::Approx(10.0));
    for (const auto& n : a.nodes) {
        CHECK(n.x >= 0.0);
        CHECK(n.x <= 120.0);
        CHECK(n.y >= 0.0);
        CHECK(n.y <= 120.0);
    }
    // constructor validates concavity; sweep seeds for the invariant
    for (uint64_t seed = 0; seed < 100; ++seed)
        CHECK_NOTHROW(io::generate_synthetic(3, 2, seed));
}

TEST_CASE("import_evrp_text") {
    const char* text = R"(# toy EVRP file
NAME toy
Q 16.0
T 10.0
RATE 0.125
SPEED 40
FUNCTION slow 10 0.5 16 1.25
DEPOT 0 0
CUSTOMER 10 0 0.4
CUSTOMER 20 5
STATION 30 0 slow
)";
    const Instance inst = io::import_evrp_text(text, "fallback");
    CHECK(inst.name == "toy");
    CHECK(inst.customers().size() == 2);
    CHECK(inst.stations().size() == 1);
    CHECK(inst.nodes[1].service_time == doctest::Approx(0.4));
    CHECK(inst.nodes[2].service_time == 0.0);
    CHECK(inst.max_stations == 1);
    // canonical round trip of the import
    const std::string canon = io::serialize_instance(inst);
    CHECK(io::serialize_instance(io::parse_instance(canon)) == canon);

    CHECK_THROWS_WITH_AS(io::import_evrp_text("BOGUS 1 2\n", "x"),
                         doctest::Contains("line 1"), std::runtime_error);
    CHECK_THROWS_AS(io::import_evrp_text("CUSTOMER 1 2\n", "x"), std::runtime_error);
}
