#pragma once

#include <optional>
#include <set>
#include <string>
#include <vector>

#include "elrp/core.hpp"

namespace elrp {

// One recharge stop in a route: SoC when arriving (q_in) and leaving (q_out).
struct ChargeStop {
    int node_pos = 0;  // index into the route's node sequence
    double q_in = 0.0;
    double q_out = 0.0;
};

struct Route {
    std::vector<NodeId> nodes;  // depot ... depot
    std::vector<ChargeStop> charges;  // one entry per station visit, in order
};

// Semantic solution: the common currency of the validator, the exact solver
// and the model checkers.
struct RouteSolution {
    std::vector<Route> routes;
    std::set<NodeId> open_stations;
};

enum class ViolationKind {
    RouteShape,        // missing depot endpoints, bad charge bookkeeping
    EnergyUnderflow,   // SoC < 0 on an arc
    Overcharge,        // q_out above battery capacity or q_out < q_in
    ChargeMismatch,    // declared q_in disagrees with the traced SoC
    DurationExceeded,  // route longer than T
    Coverage,          // customer missing or visited more than once
    RouteLimit,
    StationLimit,
    ClosedStation,
};

struct Violation {
    ViolationKind kind;
    int route = -1;
    NodeId node = -1;
    std::string detail;
};

struct RouteTrace {
    std::vector<double> arrival_time;
    std::vector<double> departure_time;
    std::vector<double> arrival_soc;
    std::vector<double> departure_soc;
    std::vector<double> charge_time;  // per node position, 0 off stations
    double travel_time = 0.0;         // sum of arc times
    double total_charge_time = 0.0;
    double duration = 0.0;            // arrival back at the depot
    std::vector<Violation> violations;

    bool feasible() const { return violations.empty(); }
    // Objective contribution: travel plus charging time, service excluded.
    double cost() const { return travel_time + total_charge_time; }
};

// Forward pass over one route: initial SoC = Q, energy consumed per arc,
// service time at customers, declared charges applied at stations. All
// violations are pinpointed to the first offending node/arc.
RouteTrace simulate_route(const Instance& inst, const Route& route);

struct ValidationReport {
    std::vector<Violation> violations;
    double objective = 0.0;  // travel + charging time (Eq. (1) semantics)
    bool feasible() const { return violations.empty(); }
};

// Full-solution check: customer coverage, route count, open-station count,
// station-use within the open set, and per-route feasibility.
ValidationReport validate_solution(const Instance& inst, const RouteSolution& sol);

struct ChargingPlan {
    std::vector<ChargeStop> charges;
    double total_charge_time = 0.0;
    bool feasible = false;
    std::string why_infeasible;
};

// Minimum-total-charging-time plan for a fixed node sequence (station stops
// fixed). Exact for concave piecewise-linear charging functions: the search
// runs over candidate exit-SoC levels taken from function breakpoints and
// the binding minima implied by downstream consumption.
ChargingPlan optimize_fixed_route_charging(const Instance& inst,
                                           const std::vector<NodeId>& nodes);

struct Reevaluation {
    bool feasible = false;
    double objective = 0.0;   // Obj*: fixed decisions, charging re-optimized
    RouteSolution solution;   // with the re-optimized charges
    std::string why_infeasible;
};

// Keeps routes and open stations from a linear-charging solution and
// re-optimizes the charge amounts under the instance's true nonlinear
// functions. Infeasible fixed decisions are flagged, never repaired.
Reevaluation reevaluate_under_nonlinear(const Instance& inst, const RouteSolution& sol);

// Solution file round-trip (JSON: routes, open_stations, charges).
std::string serialize_solution(const RouteSolution& sol);
RouteSolution parse_solution(const std::string& text);
RouteSolution load_solution(const std::string& path);
void save_solution(const RouteSolution& sol, const std::string& path);

}  // namespace elrp
