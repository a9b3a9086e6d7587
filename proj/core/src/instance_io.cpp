#include "elrp/instance_io.hpp"

#include <algorithm>
#include <cmath>
#include <fstream>
#include <sstream>

#include "elrp/random.hpp"
#include "json.hpp"

namespace elrp::io {

using ordered_json = nlohmann::ordered_json;

namespace {

[[noreturn]] void fail(const std::string& what) {
    throw std::runtime_error("instance parse error: " + what);
}

ChargingFunction function_from_json(const TechId& tech, const ordered_json& arr) {
    if (!arr.is_array() || arr.empty()) fail("charging function '" + tech + "' must be an array");
    std::vector<std::pair<double, double>> bps;
    for (const auto& bp : arr) {
        if (!bp.is_array() || bp.size() != 2)
            fail("charging function '" + tech + "': breakpoint must be [energy, time]");
        bps.emplace_back(bp[0].get<double>(), bp[1].get<double>());
    }
    return ChargingFunction(tech, std::move(bps));
}

}  // namespace

Instance parse_instance(const std::string& text) {
    ordered_json j;
    try {
        j = ordered_json::parse(text);
    } catch (const nlohmann::json::parse_error& e) {
        fail(e.what());
    }
    try {
        if (j.value("schema_version", 0) != 1) fail("unsupported or missing schema_version");
        Instance inst;
        inst.name = j.value("name", "");
        const auto& ev = j.at("ev");
        inst.ev.battery_capacity = ev.at("battery_capacity_kwh").get<double>();
        inst.ev.consumption_rate = ev.at("consumption_rate_kwh_per_km").get<double>();
        inst.ev.max_route_duration = ev.at("max_route_duration_h").get<double>();
        inst.ev.speed = ev.at("speed_km_per_h").get<double>();
        const auto& lim = j.at("limits");
        inst.max_stations = lim.at("max_stations").get<int>();
        inst.max_routes = lim.at("max_routes").get<int>();
        for (const auto& [tech, arr] : j.at("charging_functions").items())
            inst.charging_functions.emplace(tech, function_from_json(tech, arr));
        for (const auto& nj : j.at("nodes")) {
            Node n;
            n.id = nj.at("id").get<int>();
            const std::string kind = nj.at("kind").get<std::string>();
            n.x = nj.at("x").get<double>();
            n.y = nj.at("y").get<double>();
            if (kind == "depot") {
                n.kind = NodeKind::Depot;
            } else if (kind == "customer") {
                n.kind = NodeKind::Customer;
                n.service_time = nj.value("service_time_h", 0.0);
            } else if (kind == "station") {
                n.kind = NodeKind::Station;
                n.tech = nj.at("tech").get<std::string>();
            } else {
                fail("unknown node kind '" + kind + "'");
            }
            inst.nodes.push_back(n);
        }
        if (inst.nodes.empty() || !inst.nodes[0].is_depot()) fail("node 0 must be the depot");
        build_matrices(inst.nodes, inst.ev, inst.travel_time, inst.energy);
        inst.validate();
        return inst;
    } catch (const nlohmann::json::exception& e) {
        fail(e.what());
    } catch (const std::invalid_argument& e) {
        fail(e.what());
    }
}

std::string serialize_instance(const Instance& inst) {
    ordered_json j;
    j["schema_version"] = 1;
    j["name"] = inst.name;
    j["ev"] = {{"battery_capacity_kwh", inst.ev.battery_capacity},
               {"consumption_rate_kwh_per_km", inst.ev.consumption_rate},
               {"max_route_duration_h", inst.ev.max_route_duration},
               {"speed_km_per_h", inst.ev.speed}};
    j["limits"] = {{"max_stations", inst.max_stations}, {"max_routes", inst.max_routes}};
    ordered_json funcs = ordered_json::object();
    for (const auto& [tech, f] : inst.charging_functions) {
        ordered_json arr = ordered_json::array();
        for (const auto& [e, t] : f.breakpoints()) arr.push_back({e, t});
        funcs[tech] = arr;
    }
    j["charging_functions"] = funcs;
    ordered_json nodes = ordered_json::array();
    for (const auto& n : inst.nodes) {
        ordered_json nj;
        nj["id"] = n.id;
        switch (n.kind) {
            case NodeKind::Depot: nj["kind"] = "depot"; break;
            case NodeKind::Customer: nj["kind"] = "customer"; break;
            case NodeKind::Station: nj["kind"] = "station"; break;
        }
        nj["x"] = n.x;
        nj["y"] = n.y;
        if (n.is_customer()) nj["service_time_h"] = n.service_time;
        if (n.is_station()) nj["tech"] = n.tech;
        nodes.push_back(nj);
    }
    j["nodes"] = nodes;
    return j.dump(2) + "\n";
}

Instance load_instance(const std::string& path) {
    std::ifstream in(path);
    if (!in) throw std::runtime_error("cannot open instance file: " + path);
    std::ostringstream ss;
    ss << in.rdbuf();
    try {
        return parse_instance(ss.str());
    } catch (const std::runtime_error& e) {
        throw std::runtime_error(path + ": " + e.what());
    }
}

void save_instance(const Instance& inst, const std::string& path) {
    std::ofstream out(path);
    if (!out) throw std::runtime_error("cannot write instance file: " + path);
    out << serialize_instance(inst);
}

Instance import_evrp_text(const std::string& text, const std::string& name) {
    std::istringstream in(text);
    std::string line;
    int lineno = 0;
    EvParams ev;
    ev.battery_capacity = 16.0;
    ev.consumption_rate = 0.125;
    ev.max_route_duration = 10.0;
    ev.speed = 40.0;
    std::vector<Node> depot, customers, stations;
    std::map<TechId, ChargingFunction> funcs;
    std::string inst_name = name;
    int max_stations = 0, max_routes = 0;
    while (std::getline(in, line)) {
        ++lineno;
        const auto pos = line.find('#');
        if (pos != std::string::npos) line.erase(pos);
        std::istringstream ls(line);
        std::string key;
        if (!(ls >> key)) continue;
        auto ctx = [&](const std::string& msg) {
            throw std::runtime_error("import error at line " + std::to_string(lineno) + ": " + msg);
        };
        if (key == "NAME") {
            ls >> inst_name;
        } else if (key == "Q") {
            ls >> ev.battery_capacity;
        } else if (key == "T") {
            ls >> ev.max_route_duration;
        } else if (key == "RATE") {
            ls >> ev.consumption_rate;
        } else if (key == "SPEED") {
            ls >> ev.speed;
        } else if (key == "MAX_STATIONS") {
            ls >> max_stations;
        } else if (key == "MAX_ROUTES") {
            ls >> max_routes;
        } else if (key == "FUNCTION") {
            std::string tech;
            ls >> tech;
            std::vector<std::pair<double, double>> bps{{0.0, 0.0}};
            double e, t;
            while (ls >> e >> t) bps.emplace_back(e, t);
            if (bps.size() < 2) ctx("FUNCTION needs at least one breakpoint");
            try {
                funcs.emplace(tech, ChargingFunction(tech, std::move(bps)));
            } catch (const std::invalid_argument& ex) {
                ctx(ex.what());
            }
        } else if (key == "DEPOT") {
            Node n;
            n.kind = NodeKind::Depot;
            if (!(ls >> n.x >> n.y)) ctx("DEPOT needs x y");
            depot.push_back(n);
        } else if (key == "CUSTOMER") {
            Node n;
            n.kind = NodeKind::Customer;
            if (!(ls >> n.x >> n.y)) ctx("CUSTOMER needs x y [service_time]");
            ls >> n.service_time;
            customers.push_back(n);
        } else if (key == "STATION") {
            Node n;
            n.kind = NodeKind::Station;
            if (!(ls >> n.x >> n.y >> n.tech)) ctx("STATION needs x y tech");
            stations.push_back(n);
        } else {
            ctx("unknown record '" + key + "'");
        }
    }
    if (depot.size() != 1) throw std::runtime_error("import error: exactly one DEPOT required");
    std::vector<Node> nodes;
    nodes.push_back(depot[0]);
    for (auto& n : customers) nodes.push_back(n);
    for (auto& n : stations) nodes.push_back(n);
    for (size_t i = 0; i < nodes.size(); ++i) nodes[i].id = static_cast<int>(i);
    if (max_stations <= 0) max_stations = static_cast<int>(stations.size());
    if (max_routes <= 0) max_routes = static_cast<int>(customers.size());
    return make_instance(inst_name, std::move(nodes), ev, std::max(1, max_stations),
                         std::max(1, max_routes), std::move(funcs));
}

namespace {

TechId slowest_tech(const Instance& inst) {
    TechId best;
    double worst = -1.0;
    for (const auto& [tech, f] : inst.charging_functions) {
        const double ttf = f.time_to_full();
        if (ttf > worst + 1e-12 || (std::abs(ttf - worst) <= 1e-12 && tech < best)) {
            worst = ttf;
            best = tech;
        }
    }
    return best;
}

}  // namespace

Instance extend_to_elrp(const Instance& evrp, uint64_t seed) {
    const auto customers = evrp.customers();
    const auto stations = evrp.stations();
    const int k = static_cast<int>(stations.size());
    if (k < 1) throw std::invalid_argument("extend_to_elrp: instance has no stations");
    if (static_cast<int>(customers.size()) < k)
        throw std::invalid_argument("extend_to_elrp: fewer customers than stations");

    // Partial Fisher-Yates draw of k distinct customers.
    Rng rng(seed);
    std::vector<NodeId> pool = customers;
    std::vector<NodeId> chosen;
    for (int i = 0; i < k; ++i) {
        const auto idx = rng.below(pool.size() - i) + i;
        std::swap(pool[i], pool[idx]);
        chosen.push_back(pool[i]);
    }
    std::sort(chosen.begin(), chosen.end());

    const TechId slow = slowest_tech(evrp);
    std::vector<Node> nodes = evrp.nodes;
    for (NodeId c : chosen) {
        Node s;
        s.id = static_cast<int>(nodes.size());
        s.kind = NodeKind::Station;
        s.x = evrp.nodes[c].x;
        s.y = evrp.nodes[c].y;
        s.tech = slow;
        nodes.push_back(s);
    }
    return make_instance(evrp.name.empty() ? "elrp" : evrp.name + "-elrp", std::move(nodes),
                         evrp.ev, k, evrp.max_routes, evrp.charging_functions);
}

namespace {

// Round values so generated instances serialize compactly.
double round3(double v) { return std::round(v * 1000.0) / 1000.0; }

std::map<TechId, ChargingFunction> random_functions(Rng& rng, double q, int n_techs) {
    // One random concave 3-segment profile for the slow tier; faster tiers
    // scale the time axis (same shape, 2x / 4x speed).
    const double r1 = rng.uniform(9.0, 12.0);
    const double r2 = r1 / rng.uniform(1.5, 2.2);
    const double r3 = r2 / rng.uniform(1.8, 2.8);
    const double q1 = round3(q * rng.uniform(0.5, 0.7));
    const double q2 = round3(q * rng.uniform(0.78, 0.9));
    auto mk = [&](const TechId& tech, double scale) {
        std::vector<std::pair<double, double>> bps;
        bps.emplace_back(0.0, 0.0);
        double t1 = q1 / r1;
        double t2 = t1 + (q2 - q1) / r2;
        double t3 = t2 + (q - q2) / r3;
        bps.emplace_back(q1, round3(t1 * scale));
        bps.emplace_back(q2, round3(t2 * scale));
        bps.emplace_back(q, round3(t3 * scale));
        return ChargingFunction(tech, std::move(bps));
    };
    std::map<TechId, ChargingFunction> out;
    out.emplace("slow", mk("slow", 1.0));
    if (n_techs >= 2) out.emplace("moderate", mk("moderate", 0.5));
    if (n_techs >= 3) out.emplace("fast", mk("fast", 0.25));
    return out;
}

// Sufficiency check used by the generator: customer c must be serviceable
// by a single-customer route, either directly or via a single candidate
// station (charging as needed), within battery and duration limits.
bool customer_serviceable(const Node& depot, const Node& cust,
                          const std::vector<std::pair<Node, const ChargingFunction*>>& stations,
                          const EvParams& ev) {
    const double q_cap = ev.battery_capacity;
    auto energy = [&](const Node& a, const Node& b) {
        return std::hypot(a.x - b.x, a.y - b.y) * ev.consumption_rate;
    };
    auto time = [&](const Node& a, const Node& b) {
        return std::hypot(a.x - b.x, a.y - b.y) / ev.speed;
    };
    const double e_oc = energy(depot, cust);
    if (2.0 * e_oc <= q_cap && 2.0 * time(depot, cust) + cust.service_time <= ev.max_route_duration)
        return true;
    for (const auto& [st, f] : stations) {
        const double e_os = energy(depot, st);
        const double e_sc = energy(st, cust);
        if (e_os > q_cap || 2.0 * e_sc > q_cap || e_os > q_cap) continue;
        // route depot -> s -> c -> s -> depot, recharging at both s visits
        const double q1 = q_cap - e_os;
        if (q1 < 0.0) continue;
        const double want1 = std::min(q_cap, std::max(q1, 2.0 * e_sc));
        if (want1 < 2.0 * e_sc) continue;
        const double q2 = want1 - 2.0 * e_sc;
        const double want2 = std::min(q_cap, std::max(q2, e_os));
        if (want2 < e_os) continue;
        const double charge = f->charge_duration(q1, want1) + f->charge_duration(q2, want2);
        const double total = time(depot, st) * 2.0 + time(st, cust) * 2.0 + cust.service_time +
                             charge;
        if (total <= ev.max_route_duration) return true;
    }
    return false;
}

}  // namespace

Instance generate_synthetic(const GenParams& p, uint64_t seed) {
    if (p.n_customers < 1 || p.n_stations < 1)
        throw std::invalid_argument("generate_synthetic: need >= 1 customer and station");
    Rng rng(seed);
    EvParams ev;
    ev.battery_capacity = p.battery_capacity;
    ev.consumption_rate = p.consumption_rate;
    ev.max_route_duration = p.max_route_duration;
    ev.speed = p.speed;
    auto funcs = random_functions(rng, ev.battery_capacity, std::clamp(p.n_techs, 1, 3));
    std::vector<TechId> techs;
    for (const auto& [tech, f] : funcs) techs.push_back(tech);

    auto draw = [&]() { return round3(rng.uniform(0.0, p.area)); };
    std::vector<Node> nodes;
    Node depot;
    depot.kind = NodeKind::Depot;
    depot.x = draw();
    depot.y = draw();
    nodes.push_back(depot);

    std::vector<std::pair<Node, const ChargingFunction*>> stations;
    for (int s = 0; s < p.n_stations; ++s) {
        Node n;
        n.kind = NodeKind::Station;
        n.x = draw();
        n.y = draw();
        n.tech = techs[rng.below(techs.size())];
        stations.emplace_back(n, &funcs.at(n.tech));
    }

    for (int c = 0; c < p.n_customers; ++c) {
        Node n;
        n.kind = NodeKind::Customer;
        n.service_time = p.service_time;
        bool placed = false;
        for (int attempt = 0; attempt < 10000; ++attempt) {
            n.x = draw();
            n.y = draw();
            if (customer_serviceable(depot, n, stations, ev)) {
                placed = true;
                break;
            }
        }
        if (!placed)
            throw std::runtime_error("generate_synthetic: could not place a serviceable customer");
        nodes.push_back(n);
    }
    for (auto& [st, f] : stations) nodes.push_back(st);
    for (size_t i = 0; i < nodes.size(); ++i) nodes[i].id = static_cast<int>(i);

    std::ostringstream name;
    name << "syn-c" << p.n_customers << "-s" << p.n_stations << "-seed" << seed;
    const int max_routes = p.max_routes > 0 ? p.max_routes : p.n_customers;
    const int max_stations = p.max_stations > 0 ? p.max_stations : p.n_stations;
    return make_instance(name.str(), std::move(nodes), ev, max_stations, max_routes,
                         std::move(funcs));
}

Instance generate_synthetic(int n_customers, int n_stations, uint64_t seed) {
    GenParams p;
    p.n_customers = n_customers;
    p.n_stations = n_stations;
    return generate_synthetic(p, seed);
}

}  // namespace elrp::io
