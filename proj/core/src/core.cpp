#include "elrp/core.hpp"

#include <cmath>
#include <sstream>

namespace elrp {

void EvParams::validate() const {
    if (!(battery_capacity > 0.0)) throw std::invalid_argument("battery capacity must be > 0");
    if (!(max_route_duration > 0.0)) throw std::invalid_argument("route duration must be > 0");
    if (!(consumption_rate > 0.0)) throw std::invalid_argument("consumption rate must be > 0");
    if (!(speed > 0.0)) throw std::invalid_argument("speed must be > 0");
}

std::vector<NodeId> Instance::customers() const {
    std::vector<NodeId> out;
    for (const auto& n : nodes)
        if (n.is_customer()) out.push_back(n.id);
    return out;
}

std::vector<NodeId> Instance::stations() const {
    std::vector<NodeId> out;
    for (const auto& n : nodes)
        if (n.is_station()) out.push_back(n.id);
    return out;
}

const ChargingFunction& Instance::function_of(NodeId station) const {
    const Node& n = nodes.at(station);
    if (!n.is_station()) throw std::invalid_argument("function_of: node is not a station");
    auto it = charging_functions.find(n.tech);
    if (it == charging_functions.end())
        throw std::invalid_argument("function_of: unknown technology '" + n.tech + "'");
    return it->second;
}

void build_matrices(const std::vector<Node>& nodes, const EvParams& ev, Matrix& travel_time,
                    Matrix& energy) {
    if (nodes.size() < 2) throw std::invalid_argument("build_matrices: need at least two nodes");
    ev.validate();
    for (const auto& n : nodes)
        if (!std::isfinite(n.x) || !std::isfinite(n.y))
            throw std::invalid_argument("build_matrices: non-finite coordinate at node " +
                                        std::to_string(n.id));
    const int n = static_cast<int>(nodes.size());
    travel_time = Matrix(n);
    energy = Matrix(n);
    for (int i = 0; i < n; ++i) {
        for (int j = 0; j < n; ++j) {
            if (i == j) continue;
            const double d = std::hypot(nodes[i].x - nodes[j].x, nodes[i].y - nodes[j].y);
            travel_time(i, j) = d / ev.speed;
            energy(i, j) = d * ev.consumption_rate;
        }
    }
}

void Instance::validate() const {
    if (nodes.size() < 2) throw std::invalid_argument("instance needs at least two nodes");
    if (!nodes[0].is_depot()) throw std::invalid_argument("node 0 must be the depot");
    int depots = 0;
    for (size_t i = 0; i < nodes.size(); ++i) {
        const Node& nd = nodes[i];
        if (nd.id != static_cast<NodeId>(i))
            throw std::invalid_argument("node ids must be dense 0..n-1 (node " +
                                        std::to_string(i) + ")");
        if (nd.is_depot()) ++depots;
        if (nd.service_time < 0.0)
            throw std::invalid_argument("negative service time at node " + std::to_string(i));
        if (nd.is_station() && !charging_functions.count(nd.tech))
            throw std::invalid_argument("station " + std::to_string(i) +
                                        " references unknown technology '" + nd.tech + "'");
    }
    if (depots != 1) throw std::invalid_argument("instance must have exactly one depot");
    ev.validate();
    for (const auto& [tech, f] : charging_functions) {
        f.validate();
        if (std::abs(f.capacity() - ev.battery_capacity) > kFeasTol)
            throw std::invalid_argument("charging function '" + tech +
                                        "' does not reach battery capacity");
    }
    const int ns = static_cast<int>(stations().size());
    if (ns > 0 && (max_stations < 1 || max_stations > ns))
        throw std::invalid_argument("max_stations must be in [1, |S|]");
    if (max_routes < 1) throw std::invalid_argument("max_routes must be >= 1");

    const int n = num_nodes();
    if (travel_time.size() != n || energy.size() != n)
        throw std::invalid_argument("matrix size does not match node count");
    for (int i = 0; i < n; ++i) {
        if (std::abs(travel_time(i, i)) > kFeasTol || std::abs(energy(i, i)) > kFeasTol)
            throw std::invalid_argument("matrix diagonal must be zero");
        for (int j = 0; j < n; ++j) {
            if (travel_time(i, j) < 0.0 || energy(i, j) < 0.0)
                throw std::invalid_argument("matrices must be nonnegative");
        }
    }
    // Triangle inequality, exhaustive over all triples.
    for (int i = 0; i < n; ++i)
        for (int j = 0; j < n; ++j)
            for (int k = 0; k < n; ++k) {
                if (travel_time(i, k) > travel_time(i, j) + travel_time(j, k) + 1e-9 ||
                    energy(i, k) > energy(i, j) + energy(j, k) + 1e-9) {
                    std::ostringstream os;
                    os << "triangle inequality violated on (" << i << "," << j << "," << k << ")";
                    throw std::invalid_argument(os.str());
                }
            }
}

Instance make_instance(std::string name, std::vector<Node> nodes, EvParams ev, int max_stations,
                       int max_routes, std::map<TechId, ChargingFunction> functions) {
    Instance inst;
    inst.name = std::move(name);
    inst.nodes = std::move(nodes);
    inst.ev = ev;
    inst.max_stations = max_stations;
    inst.max_routes = max_routes;
    inst.charging_functions = std::move(functions);
    build_matrices(inst.nodes, inst.ev, inst.travel_time, inst.energy);
    inst.validate();
    return inst;
}

Instance with_linearized_charging(const Instance& inst) {
    Instance out = inst;
    for (auto& [tech, f] : out.charging_functions) f = f.linearize();
    return out;
}

}  // namespace elrp
