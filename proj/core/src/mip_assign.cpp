#include <algorithm>
#include <map>
#include <set>
#include <sstream>

#include "elrp/mip/builders.hpp"
#include "mip_internal.hpp"

namespace elrp::mip {

namespace {

using detail::NodeExpansion;
using detail::idx;

struct Visit {
    int route;
    int pos;         // node position within the route
    NodeId station;  // original station id
    double q_in, q_out, arrival, departure;
};

// Writes the alpha/z block values for one charging point.
void set_alpha(Assignment& a, const ChargingFunction& f, const std::string& alpha_prefix,
               const std::string& z_prefix, const std::string& sep, double q) {
    const auto alpha = f.alpha_fill(q);
    for (size_t k = 0; k < alpha.size(); ++k) {
        a.set(alpha_prefix + sep + std::to_string(k), alpha[k]);
        a.set(z_prefix + sep + std::to_string(k), alpha[k] > 1e-12 ? 1.0 : 0.0);
    }
}

struct Traced {
    std::vector<RouteTrace> traces;
    std::vector<Visit> visits;  // in (route, pos) order
};

Traced trace_all(const Instance& inst, const RouteSolution& sol) {
    Traced out;
    for (size_t r = 0; r < sol.routes.size(); ++r) {
        RouteTrace tr = simulate_route(inst, sol.routes[r]);
        // Structurally broken routes cannot be expressed at all; physical
        // violations (battery dips, late returns) still convert, clamped
        // into variable domains, so the model rows pinpoint them.
        for (const auto& v : tr.violations)
            if (v.kind == ViolationKind::RouteShape)
                throw std::invalid_argument("solution_to_assignment: route " +
                                            std::to_string(r) + ": " + v.detail);
        const auto& nodes = sol.routes[r].nodes;
        for (size_t pos = 0; pos < nodes.size(); ++pos)
            if (inst.nodes[nodes[pos]].is_station())
                out.visits.push_back({static_cast<int>(r), static_cast<int>(pos), nodes[pos],
                                      tr.arrival_soc[pos], tr.departure_soc[pos],
                                      tr.arrival_time[pos], tr.departure_time[pos]});
        out.traces.push_back(std::move(tr));
    }
    return out;
}

Assignment convert_m1m2(const MipModel& model, const Instance& inst, const RouteSolution& sol) {
    const bool arc_based = model.formulation == FormulationId::M2;
    NodeExpansion ex(inst, model.beta);
    Traced tr = trace_all(inst, sol);

    // Assign the k-th visit of station s to its k-th copy.
    std::map<NodeId, int> visit_count;
    std::map<std::pair<int, int>, int> copy_of;  // (route, pos) -> model node
    std::map<NodeId, size_t> group_index;
    {
        const auto stations = inst.stations();
        for (size_t g = 0; g < stations.size(); ++g) group_index[stations[g]] = g;
    }
    for (const auto& v : tr.visits) {
        const int k = visit_count[v.station]++;
        if (k > model.beta) {
            std::ostringstream os;
            os << "solution visits station " << v.station << " " << (k + 1)
               << " times but beta=" << model.beta << " provides only " << (model.beta + 1)
               << " copies";
            throw std::invalid_argument(os.str());
        }
        copy_of[{v.route, v.pos}] = ex.copy_group[group_index[v.station]][k];
    }

    Assignment a;
    for (const auto& var : model.variables()) a.set(var.name, 0.0);

    // Arcs, SoC and clock values along each route.
    for (size_t r = 0; r < sol.routes.size(); ++r) {
        const auto& nodes = sol.routes[r].nodes;
        const RouteTrace& trace = tr.traces[r];
        auto model_node = [&](int pos) {
            const NodeId v = nodes[pos];
            if (inst.nodes[v].is_station()) return copy_of.at({static_cast<int>(r), pos});
            return static_cast<int>(v);
        };
        for (size_t pos = 0; pos + 1 < nodes.size(); ++pos) {
            const int from = pos == 0 ? 0 : model_node(static_cast<int>(pos));
            const int to =
                pos + 1 == nodes.size() - 1 ? 0 : model_node(static_cast<int>(pos + 1));
            a.set(idx("x", from, to), 1.0);
            if (arc_based) {
                a.set(idx("q", from, to), std::max(0.0, trace.departure_soc[pos]));
                a.set(idx("tau", from, to), trace.arrival_time[pos]);
                if (from != 0 && ex.is_station(from, inst))
                    a.set(idx("dar", from, to), trace.charge_time[pos]);
            }
        }
        if (!arc_based) {
            for (size_t pos = 0; pos + 1 < nodes.size(); ++pos) {
                const int v = pos == 0 ? 0 : model_node(static_cast<int>(pos));
                if (v == 0) continue;
                a.set(idx("q", v), std::max(0.0, trace.departure_soc[pos]));
                a.set(idx("tau", v), trace.departure_time[pos]);
            }
        }
    }
    if (!arc_based) a.set(idx("q", 0), inst.battery_capacity());

    // Station-side values per copy.
    for (const auto& v : tr.visits) {
        const int node = copy_of.at({v.route, v.pos});
        const ChargingFunction& f = inst.function_of(v.station);
        a.set(idx("qp", node), std::max(0.0, v.q_in));
        a.set(idx("qm", node), std::max(0.0, v.q_out));
        const double s_t = f.time_at_soc(std::clamp(v.q_in, 0.0, f.capacity()));
        const double d_t = f.time_at_soc(std::clamp(v.q_out, 0.0, f.capacity()));
        a.set(idx("s", node), s_t);
        a.set(idx("d", node), d_t);
        a.set(idx("dlt", node), d_t - s_t);
        set_alpha(a, f, idx("ap", node), idx("zp", node), "_", std::clamp(v.q_in, 0.0, f.capacity()));
        set_alpha(a, f, idx("am", node), idx("zm", node), "_", std::clamp(v.q_out, 0.0, f.capacity()));
        a.set(idx("y", node), 1.0);
    }
    // Opened-but-unvisited stations keep their original copy opened.
    for (NodeId s : sol.open_stations) a.set(idx("y", s), 1.0);
    return a;
}

Assignment convert_m3(const MipModel& model, const Instance& inst, const RouteSolution& sol) {
    Traced tr = trace_all(inst, sol);
    Assignment a;
    for (const auto& var : model.variables()) a.set(var.name, 0.0);

    for (size_t r = 0; r < sol.routes.size(); ++r) {
        const auto& nodes = sol.routes[r].nodes;
        const RouteTrace& trace = tr.traces[r];
        size_t pos = 0;
        while (pos + 1 < nodes.size()) {
            // hop from nodes[pos] (customer/depot) over 0..k stations
            size_t next = pos + 1;
            std::vector<size_t> stations;
            while (next < nodes.size() && inst.nodes[nodes[next]].is_station()) {
                stations.push_back(next);
                ++next;
            }
            if (next >= nodes.size())
                throw std::invalid_argument("route does not end at the depot");
            if (stations.size() > 1)
                throw std::invalid_argument(
                    "solution uses " + std::to_string(stations.size()) +
                    " consecutive stations; the recharge-arc model supports at most one");
            const NodeId i = nodes[pos];
            const NodeId j = nodes[next];
            const std::string h =
                stations.empty() ? "d" : std::to_string(nodes[stations[0]]);
            const std::string key =
                std::to_string(i) + "_" + h + "_" + std::to_string(j);
            a.set("x_" + key, 1.0);
            a.set("q_" + key, std::max(0.0, trace.departure_soc[pos]));
            a.set("tau_" + key, i == 0 ? 0.0 : trace.departure_time[pos]);
            if (!stations.empty()) {
                const size_t sp = stations[0];
                const NodeId s_node = nodes[sp];
                const ChargingFunction& f = inst.function_of(s_node);
                const double q_in = std::clamp(trace.arrival_soc[sp], 0.0, f.capacity());
                const double q_out = std::clamp(trace.departure_soc[sp], 0.0, f.capacity());
                a.set("qp_" + key, q_in);
                a.set("qm_" + key, q_out);
                a.set("s_" + key, f.time_at_soc(q_in));
                a.set("d_" + key, f.time_at_soc(q_out));
                a.set("dlt_" + key, f.charge_duration(q_in, q_out));
                set_alpha(a, f, "ap_" + key, "zp_" + key, "_", q_in);
                set_alpha(a, f, "am_" + key, "zm_" + key, "_", q_out);
            }
            pos = next;
        }
    }
    for (NodeId s : sol.open_stations) a.set(idx("y", s), 1.0);
    return a;
}

Assignment convert_m4(const MipModel& model, const Instance& inst, const RouteSolution& sol) {
    Traced tr = trace_all(inst, sol);
    Assignment a;
    for (const auto& var : model.variables()) a.set(var.name, 0.0);

    for (size_t r = 0; r < sol.routes.size(); ++r) {
        const auto& nodes = sol.routes[r].nodes;
        const RouteTrace& trace = tr.traces[r];
        size_t pos = 0;
        while (pos + 1 < nodes.size()) {
            size_t next = pos + 1;
            std::vector<size_t> stations;
            while (next < nodes.size() && inst.nodes[nodes[next]].is_station()) {
                stations.push_back(next);
                ++next;
            }
            if (next >= nodes.size())
                throw std::invalid_argument("route does not end at the depot");
            const NodeId i = nodes[pos];
            const NodeId j = nodes[next];
            std::vector<NodeId> seq;
            for (size_t sp : stations) seq.push_back(nodes[sp]);
            const auto it = model.m4_paths.find({i, j});
            int p_index = -1;
            if (it != model.m4_paths.end())
                for (size_t p = 0; p < it->second.size(); ++p)
                    if (it->second[p].stations == seq) {
                        p_index = static_cast<int>(p);
                        break;
                    }
            if (p_index < 0) {
                std::ostringstream os;
                os << "no recharge path in the model matches the hop " << i << "->" << j
                   << " (the path may have been pruned)";
                throw std::invalid_argument(os.str());
            }
            const std::string key = std::to_string(i) + "_" + std::to_string(j) + "_p" +
                                    std::to_string(p_index);
            a.set("x_" + key, 1.0);
            a.set("q_" + key, std::max(0.0, trace.departure_soc[pos]));
            a.set("tau_" + key, i == 0 ? 0.0 : trace.departure_time[pos]);
            double total_dlt = 0.0;
            for (size_t m = 0; m < stations.size(); ++m) {
                const size_t sp = stations[m];
                const NodeId s_node = nodes[sp];
                const ChargingFunction& f = inst.function_of(s_node);
                const std::string mk = key + "_m" + std::to_string(m);
                const double q_in = std::clamp(trace.arrival_soc[sp], 0.0, f.capacity());
                const double q_out = std::clamp(trace.departure_soc[sp], 0.0, f.capacity());
                a.set("qp_" + mk, q_in);
                a.set("qm_" + mk, q_out);
                a.set("s_" + mk, f.time_at_soc(q_in));
                a.set("d_" + mk, f.time_at_soc(q_out));
                total_dlt += f.charge_duration(q_in, q_out);
                set_alpha(a, f, "ap_" + mk, "zp_" + mk, "_k", q_in);
                set_alpha(a, f, "am_" + mk, "zm_" + mk, "_k", q_out);
            }
            a.set("dlt_" + key, total_dlt);
            pos = next;
        }
    }
    for (NodeId s : sol.open_stations) a.set(idx("y", s), 1.0);
    return a;
}

}  // namespace

Assignment solution_to_assignment(const MipModel& model, const Instance& inst,
                                  const RouteSolution& sol) {
    switch (model.formulation) {
        case FormulationId::M1:
        case FormulationId::M2: return convert_m1m2(model, inst, sol);
        case FormulationId::M3: return convert_m3(model, inst, sol);
        case FormulationId::M4: return convert_m4(model, inst, sol);
    }
    throw std::invalid_argument("solution_to_assignment: bad formulation");
}

RouteSolution solution_from_assignment(const MipModel& model, const Instance& inst,
                                       const Assignment& assignment) {
    if (model.formulation != FormulationId::M1 && model.formulation != FormulationId::M2)
        throw std::invalid_argument("solution_from_assignment supports M1/M2 assignments");
    NodeExpansion ex(inst, model.beta);
    const int n = ex.total();
    std::vector<int> succ(n, -1);
    std::vector<int> depot_out;
    for (int i = 0; i < n; ++i)
        for (int j = 0; j < n; ++j) {
            if (i == j || ex.same_group(i, j)) continue;
            if (assignment.get(idx("x", i, j)) > 0.5) {
                if (i == 0) {
                    depot_out.push_back(j);
                } else {
                    if (succ[i] >= 0)
                        throw std::runtime_error("assignment has two successors for node " +
                                                 std::to_string(i));
                    succ[i] = j;
                }
            }
        }
    std::sort(depot_out.begin(), depot_out.end());

    RouteSolution sol;
    for (int start : depot_out) {
        Route route;
        route.nodes.push_back(0);
        int cur = start;
        int guard = 0;
        while (cur != 0) {
            if (++guard > n + 1)
                throw std::runtime_error("assignment contains a cycle that misses the depot");
            const NodeId orig = ex.to_orig[cur];
            route.nodes.push_back(orig);
            if (inst.nodes[orig].is_station()) {
                route.charges.push_back({static_cast<int>(route.nodes.size()) - 1,
                                         assignment.get(idx("qp", cur)),
                                         assignment.get(idx("qm", cur))});
            }
            cur = succ[cur];
            if (cur < 0) throw std::runtime_error("route does not return to the depot");
        }
        route.nodes.push_back(0);
        sol.routes.push_back(std::move(route));
    }
    for (NodeId s : inst.stations())
        if (assignment.get(idx("y", s)) > 0.5) sol.open_stations.insert(s);
    return sol;
}

}  // namespace elrp::mip
