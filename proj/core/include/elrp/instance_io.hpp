#pragma once

#include <cstdint>
#include <string>

#include "elrp/core.hpp"

namespace elrp::io {

// Canonical instance file: self-describing JSON with explicit units, keys
// `schema_version`, `name`, `ev`, `limits{max_stations,max_routes}`,
// `charging_functions`, `nodes`. Round-trips byte-identically through
// parse_instance / serialize_instance.

// Parses a canonical JSON instance. Throws std::runtime_error with
// line/key context on malformed input; all core invariants and the
// charging-function concavity check are enforced.
Instance parse_instance(const std::string& text);

// Canonical serialization (normalized key order, 2-space indent).
std::string serialize_instance(const Instance& inst);

Instance load_instance(const std::string& path);
void save_instance(const Instance& inst, const std::string& path);

// Best-effort importer for EVRP-style plain-text instances; see README for
// the accepted line format.
Instance import_evrp_text(const std::string& text, const std::string& name);

// Extends an EVRP instance (k stations) to a location-routing instance by
// adding k station candidates co-located with k uniformly drawn distinct
// customers. The new candidates all get the slowest original technology,
// the station-opening limit stays at k, and the customer set, depot, EV
// parameters and existing stations are unchanged.
Instance extend_to_elrp(const Instance& evrp, uint64_t seed);

struct GenParams {
    int n_customers = 5;
    int n_stations = 2;
    double area = 120.0;          // square side, km
    double service_time = 0.5;    // hours per customer
    double battery_capacity = 16.0;  // kWh
    double consumption_rate = 0.125; // kWh/km
    double max_route_duration = 10.0;  // hours
    double speed = 40.0;          // km/h
    int max_routes = 0;           // 0 -> n_customers
    int max_stations = 0;         // 0 -> n_stations
    int n_techs = 3;              // 1..3 speed tiers
};

// Deterministic synthetic generator: uniform coordinates on an
// area x area square, concave random 3-segment charging functions in up
// to three totally ordered speed tiers. Repositions customers until every
// one of them is serviceable by a single-customer route (directly or via
// one candidate station).
Instance generate_synthetic(const GenParams& params, uint64_t seed);
Instance generate_synthetic(int n_customers, int n_stations, uint64_t seed);

}  // namespace elrp::io
