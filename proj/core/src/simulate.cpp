#include "elrp/simulate.hpp"

#include <algorithm>
#include <cmath>
#include <fstream>
#include <map>
#include <sstream>

#include "json.hpp"

namespace elrp {

namespace {

std::string fmt(double v) {
    std::ostringstream os;
    os.precision(6);
    os << v;
    return os.str();
}

}  // namespace

RouteTrace simulate_route(const Instance& inst, const Route& route) {
    RouteTrace tr;
    const int m = static_cast<int>(route.nodes.size());
    auto violate = [&](ViolationKind kind, NodeId node, std::string detail) {
        tr.violations.push_back({kind, -1, node, std::move(detail)});
    };
    if (m < 2 || route.nodes.front() != 0 || route.nodes.back() != 0) {
        violate(ViolationKind::RouteShape, m ? route.nodes.front() : -1,
                "route must start and end at the depot");
        return tr;
    }
    // Charges must line up with the station visits, in order.
    std::map<int, const ChargeStop*> stop_at;
    for (const auto& c : route.charges) {
        if (c.node_pos <= 0 || c.node_pos >= m - 1 ||
            !inst.nodes[route.nodes[c.node_pos]].is_station()) {
            violate(ViolationKind::RouteShape, -1,
                    "charge entry at position " + std::to_string(c.node_pos) +
                        " does not point at a station visit");
            return tr;
        }
        stop_at[c.node_pos] = &c;
    }
    for (int pos = 1; pos < m - 1; ++pos)
        if (inst.nodes[route.nodes[pos]].is_station() && !stop_at.count(pos)) {
            violate(ViolationKind::RouteShape, route.nodes[pos],
                    "station visit at position " + std::to_string(pos) + " has no charge entry");
            return tr;
        }

    // The pass always completes so infeasible solutions still yield a full
    // trace (the model checkers convert those to locate violated rows);
    // violations are recorded in encounter order, first offender first.
    const double q_cap = inst.battery_capacity();
    tr.arrival_time.assign(m, 0.0);
    tr.departure_time.assign(m, 0.0);
    tr.arrival_soc.assign(m, q_cap);
    tr.departure_soc.assign(m, q_cap);
    tr.charge_time.assign(m, 0.0);

    double soc = q_cap;
    double clock = 0.0;
    for (int pos = 1; pos < m; ++pos) {
        const NodeId prev = route.nodes[pos - 1];
        const NodeId here = route.nodes[pos];
        clock += inst.travel_time(prev, here);
        tr.travel_time += inst.travel_time(prev, here);
        soc -= inst.energy(prev, here);
        tr.arrival_time[pos] = clock;
        tr.arrival_soc[pos] = soc;
        if (soc < -kFeasTol)
            violate(ViolationKind::EnergyUnderflow, here,
                    "SoC " + fmt(soc) + " kWh on arrival (arc " + std::to_string(prev) + "->" +
                        std::to_string(here) + ")");
        const Node& nd = inst.nodes[here];
        if (nd.is_customer()) {
            clock += nd.service_time;
        } else if (nd.is_station()) {
            const ChargeStop& stop = *stop_at.at(pos);
            if (std::abs(stop.q_in - soc) > kFeasTol)
                violate(ViolationKind::ChargeMismatch, here,
                        "declared q_in " + fmt(stop.q_in) + " vs traced SoC " + fmt(soc));
            if (stop.q_out < stop.q_in - kFeasTol)
                violate(ViolationKind::Overcharge, here,
                        "q_out " + fmt(stop.q_out) + " below q_in " + fmt(stop.q_in));
            if (stop.q_out > q_cap + kFeasTol)
                violate(ViolationKind::Overcharge, here,
                        "q_out " + fmt(stop.q_out) + " above capacity " + fmt(q_cap));
            const ChargingFunction& f = inst.function_of(here);
            const double q_in = std::clamp(stop.q_in, 0.0, q_cap);
            const double q_out = std::clamp(std::max(stop.q_out, q_in), 0.0, q_cap);
            const double dur = f.charge_duration(q_in, q_out);
            tr.charge_time[pos] = dur;
            tr.total_charge_time += dur;
            clock += dur;
            soc = stop.q_out;
        }
        tr.departure_time[pos] = clock;
        tr.departure_soc[pos] = soc;
    }
    tr.duration = tr.arrival_time[m - 1];
    if (tr.duration > inst.ev.max_route_duration + kFeasTol)
        violate(ViolationKind::DurationExceeded, 0,
                "duration " + fmt(tr.duration) + " h exceeds " +
                    fmt(inst.ev.max_route_duration) + " h");
    return tr;
}

ValidationReport validate_solution(const Instance& inst, const RouteSolution& sol) {
    ValidationReport rep;
    std::map<NodeId, int> seen;
    for (size_t r = 0; r < sol.routes.size(); ++r) {
        for (NodeId v : sol.routes[r].nodes) {
            const Node& nd = inst.nodes.at(v);
            if (nd.is_customer()) ++seen[v];
            if (nd.is_station() && !sol.open_stations.count(v))
                rep.violations.push_back({ViolationKind::ClosedStation, static_cast<int>(r), v,
                                          "visit to station " + std::to_string(v) +
                                              " which is not opened"});
        }
    }
    for (NodeId c : inst.customers()) {
        const int k = seen.count(c) ? seen[c] : 0;
        if (k != 1)
            rep.violations.push_back({ViolationKind::Coverage, -1, c,
                                      "customer " + std::to_string(c) + " visited " +
                                          std::to_string(k) + " times"});
    }
    if (static_cast<int>(sol.routes.size()) > inst.max_routes)
        rep.violations.push_back({ViolationKind::RouteLimit, -1, -1,
                                  std::to_string(sol.routes.size()) + " routes exceed limit " +
                                      std::to_string(inst.max_routes)});
    if (static_cast<int>(sol.open_stations.size()) > inst.max_stations)
        rep.violations.push_back({ViolationKind::StationLimit, -1, -1,
                                  std::to_string(sol.open_stations.size()) +
                                      " opened stations exceed limit " +
                                      std::to_string(inst.max_stations)});
    for (size_t r = 0; r < sol.routes.size(); ++r) {
        RouteTrace tr = simulate_route(inst, sol.routes[r]);
        for (Violation v : tr.violations) {
            v.route = static_cast<int>(r);
            rep.violations.push_back(std::move(v));
        }
        rep.objective += tr.cost();
    }
    return rep;
}

ChargingPlan optimize_fixed_route_charging(const Instance& inst,
                                           const std::vector<NodeId>& nodes) {
    ChargingPlan plan;
    if (nodes.size() < 2 || nodes.front() != 0 || nodes.back() != 0) {
        plan.why_infeasible = "route must start and end at the depot";
        return plan;
    }
    const double q_cap = inst.battery_capacity();

    // Station stop positions and the leg energies between charging points.
    std::vector<int> stop_pos;
    for (size_t i = 1; i + 1 < nodes.size(); ++i)
        if (inst.nodes[nodes[i]].is_station()) stop_pos.push_back(static_cast<int>(i));

    std::vector<double> leg;  // leg[i]: energy from stop i-1 (or depot) to stop i (or depot)
    {
        double acc = 0.0;
        size_t next_stop = 0;
        for (size_t i = 1; i < nodes.size(); ++i) {
            acc += inst.energy(nodes[i - 1], nodes[i]);
            if (next_stop < stop_pos.size() && static_cast<int>(i) == stop_pos[next_stop]) {
                leg.push_back(acc);
                acc = 0.0;
                ++next_stop;
            }
        }
        leg.push_back(acc);
    }
    const int m = static_cast<int>(stop_pos.size());

    // Travel + service is fixed; only the charging plan is optimized.
    double base_time = 0.0;
    for (size_t i = 1; i < nodes.size(); ++i) {
        base_time += inst.travel_time(nodes[i - 1], nodes[i]);
        if (inst.nodes[nodes[i]].is_customer()) base_time += inst.nodes[nodes[i]].service_time;
    }

    if (m == 0) {
        if (leg[0] > q_cap + kFeasTol) {
            plan.why_infeasible = "route needs " + fmt(leg[0]) + " kWh with no recharge stop";
            return plan;
        }
        if (base_time > inst.ev.max_route_duration + kFeasTol) {
            plan.why_infeasible = "route duration " + fmt(base_time) + " h exceeds limit";
            return plan;
        }
        plan.feasible = true;
        return plan;
    }

    std::vector<const ChargingFunction*> f(m);
    for (int i = 0; i < m; ++i) f[i] = &inst.function_of(nodes[stop_pos[i]]);

    // Candidate exit-SoC levels per stop: own breakpoints, exact-reach sums
    // of downstream legs, exact reaches onto later stops' breakpoints, Q.
    std::vector<std::vector<double>> cand(m);
    for (int i = 0; i < m; ++i) {
        std::vector<double> c;
        for (const auto& [e, t] : f[i]->breakpoints()) c.push_back(e);
        double acc = 0.0;
        for (int j = i + 1; j <= m; ++j) {
            acc += leg[j];
            c.push_back(acc);  // arrive at stop j (or the depot) empty
            if (j < m)
                for (const auto& [e, t] : f[j]->breakpoints()) c.push_back(acc + e);
        }
        c.push_back(q_cap);
        std::sort(c.begin(), c.end());
        c.erase(std::unique(c.begin(), c.end(),
                            [](double a, double b) { return std::abs(a - b) < 1e-12; }),
                c.end());
        for (double v : c)
            if (v >= -1e-12 && v <= q_cap + 1e-12) cand[i].push_back(std::clamp(v, 0.0, q_cap));
        if (cand[i].empty()) {
            plan.why_infeasible = "leg beyond battery capacity after stop " + std::to_string(i);
            return plan;
        }
    }

    // DP over stops; states are (exit SoC, min total charging time).
    struct State {
        double soc;
        double cost;
        int prev_state;
        double q_in;
    };
    std::vector<std::vector<State>> layers(m + 1);
    layers[0].push_back({q_cap, 0.0, -1, q_cap});
    for (int i = 0; i < m; ++i) {
        std::map<double, State> bests;  // exit soc -> best state
        for (size_t si = 0; si < layers[i].size(); ++si) {
            const State& st = layers[i][si];
            const double arr = st.soc - leg[i];
            if (arr < -kFeasTol) continue;
            const double q_in = std::clamp(arr, 0.0, q_cap);
            auto consider = [&](double q_out) {
                if (q_out < q_in - 1e-12) return;
                q_out = std::max(q_out, q_in);
                const double cost = st.cost + f[i]->charge_duration(q_in, q_out);
                auto it = bests.find(q_out);
                if (it == bests.end() || cost < it->second.cost - 1e-15)
                    bests[q_out] = {q_out, cost, static_cast<int>(si), q_in};
            };
            consider(q_in);  // charge nothing
            for (double q_out : cand[i]) consider(q_out);
        }
        for (auto& [soc, st] : bests) layers[i + 1].push_back(st);
        if (layers[i + 1].empty()) {
            plan.why_infeasible = "no feasible charging plan reaches stop " + std::to_string(i);
            return plan;
        }
    }

    // Final leg home plus the duration limit.
    int best = -1;
    double best_cost = 0.0;
    for (size_t si = 0; si < layers[m].size(); ++si) {
        const State& st = layers[m][si];
        if (st.soc - leg[m] < -kFeasTol) continue;
        if (base_time + st.cost > inst.ev.max_route_duration + kFeasTol) continue;
        if (best < 0 || st.cost < best_cost - 1e-15) {
            best = static_cast<int>(si);
            best_cost = st.cost;
        }
    }
    if (best < 0) {
        plan.why_infeasible = layers[m].empty()
                                  ? "no feasible charging plan"
                                  : "no plan reaches the depot within battery and duration";
        return plan;
    }

    std::vector<ChargeStop> charges(m);
    int cur = best;
    for (int i = m - 1; i >= 0; --i) {
        const State& st = layers[i + 1][cur];
        charges[i] = {stop_pos[i], st.q_in, st.soc};
        cur = st.prev_state;
    }
    plan.charges = std::move(charges);
    plan.total_charge_time = best_cost;
    plan.feasible = true;
    return plan;
}

Reevaluation reevaluate_under_nonlinear(const Instance& inst, const RouteSolution& sol) {
    Reevaluation out;
    out.solution.open_stations = sol.open_stations;
    double objective = 0.0;
    for (const auto& route : sol.routes) {
        ChargingPlan plan = optimize_fixed_route_charging(inst, route.nodes);
        if (!plan.feasible) {
            out.why_infeasible = "route infeasible under nonlinear charging: " +
                                 plan.why_infeasible;
            return out;
        }
        Route fixed;
        fixed.nodes = route.nodes;
        fixed.charges = plan.charges;
        RouteTrace tr = simulate_route(inst, fixed);
        objective += tr.cost();
        out.solution.routes.push_back(std::move(fixed));
    }
    out.feasible = true;
    out.objective = objective;
    return out;
}

std::string serialize_solution(const RouteSolution& sol) {
    nlohmann::ordered_json j;
    j["schema_version"] = 1;
    nlohmann::ordered_json routes = nlohmann::ordered_json::array();
    for (const auto& r : sol.routes) {
        nlohmann::ordered_json rj;
        rj["nodes"] = r.nodes;
        nlohmann::ordered_json charges = nlohmann::ordered_json::array();
        for (const auto& c : r.charges)
            charges.push_back({{"node_pos", c.node_pos}, {"q_in", c.q_in}, {"q_out", c.q_out}});
        rj["charges"] = charges;
        routes.push_back(rj);
    }
    j["routes"] = routes;
    j["open_stations"] = std::vector<NodeId>(sol.open_stations.begin(), sol.open_stations.end());
    return j.dump(2) + "\n";
}

RouteSolution parse_solution(const std::string& text) {
    nlohmann::json j;
    try {
        j = nlohmann::json::parse(text);
    } catch (const nlohmann::json::parse_error& e) {
        throw std::runtime_error(std::string("solution parse error: ") + e.what());
    }
    RouteSolution sol;
    try {
        for (const auto& rj : j.at("routes")) {
            Route r;
            r.nodes = rj.at("nodes").get<std::vector<NodeId>>();
            for (const auto& cj : rj.value("charges", nlohmann::json::array()))
                r.charges.push_back({cj.at("node_pos").get<int>(), cj.at("q_in").get<double>(),
                                     cj.at("q_out").get<double>()});
            sol.routes.push_back(std::move(r));
        }
        for (const auto& s : j.value("open_stations", nlohmann::json::array()))
            sol.open_stations.insert(s.get<NodeId>());
    } catch (const nlohmann::json::exception& e) {
        throw std::runtime_error(std::string("solution parse error: ") + e.what());
    }
    return sol;
}

RouteSolution load_solution(const std::string& path) {
    std::ifstream in(path);
    if (!in) throw std::runtime_error("cannot open solution file: " + path);
    std::ostringstream ss;
    ss << in.rdbuf();
    return parse_solution(ss.str());
}

void save_solution(const RouteSolution& sol, const std::string& path) {
    std::ofstream out(path);
    if (!out) throw std::runtime_error("cannot write solution file: " + path);
    out << serialize_solution(sol);
}

}  // namespace elrp
