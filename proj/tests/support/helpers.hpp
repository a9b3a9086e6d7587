#pragma once

#include <algorithm>
#include <cmath>
#include <functional>
#include <limits>
#include <map>
#include <set>
#include <vector>

#include "elrp/core.hpp"
#include "elrp/instance_io.hpp"
#include "elrp/paths.hpp"
#include "elrp/preprocess.hpp"
#include "elrp/random.hpp"
#include "elrp/simulate.hpp"

namespace elrp::test {

// Reference charging curve used throughout the examples:
// 10 kWh in 0.5 h (20 kWh/h), then 6 kWh in 0.75 h (8 kWh/h).
inline ChargingFunction example_function(const TechId& tech = "moderate") {
    return ChargingFunction(tech, {{0.0, 0.0}, {10.0, 0.5}, {16.0, 1.25}});
}

// Random strictly concave 3-segment function over capacity q.
inline ChargingFunction random_function(Rng& rng, double q, const TechId& tech) {
    const double r1 = rng.uniform(9.0, 16.0);
    const double r2 = r1 / rng.uniform(1.4, 2.4);
    const double r3 = r2 / rng.uniform(1.4, 2.8);
    const double q1 = q * rng.uniform(0.35, 0.6);
    const double q2 = q * rng.uniform(0.7, 0.9);
    const double t1 = q1 / r1;
    const double t2 = t1 + (q2 - q1) / r2;
    const double t3 = t2 + (q - q2) / r3;
    return ChargingFunction(tech, {{0.0, 0.0}, {q1, t1}, {q2, t2}, {q, t3}});
}

// Fine-grid scenario oracle for the charging-time gap bound: simulates the
// equal-final-SoC scenarios directly. Grid anchors include every breakpoint
// (shifted as needed), so the piecewise-linear maximum is attained exactly.
inline double grid_time_gap(const ChargingFunction& slow, const ChargingFunction& fast,
                            const GapWindow& w, int grid = 120) {
    const double q_cap = fast.capacity();
    auto anchors = [&](double shift, double lo, double hi) {
        std::vector<double> out;
        for (int g = 0; g <= grid; ++g) out.push_back(lo + (hi - lo) * g / grid);
        for (const auto& [e, t] : fast.breakpoints()) out.push_back(e);
        for (const auto& [e, t] : slow.breakpoints()) out.push_back(e + shift);
        std::vector<double> keep;
        for (double v : out)
            if (v >= lo - 1e-12 && v <= hi + 1e-12) keep.push_back(std::clamp(v, lo, hi));
        std::sort(keep.begin(), keep.end());
        return keep;
    };
    if (w.entry_hi < 0) return 0.0;
    double best = 0.0;
    for (double a_prime : anchors(-w.entry_shift, 0.0, w.entry_hi)) {
        const double a = std::clamp(a_prime + w.entry_shift, 0.0, slow.capacity());
        for (double b_prime : anchors(w.exit_shift, std::max(a_prime, w.exit_lo), q_cap)) {
            std::vector<double> bps{b_prime, a_prime, a_prime + w.entry_shift + w.exit_shift};
            for (double bp : bps) {
                if (bp < std::max(a_prime, w.exit_lo) - 1e-12 || bp > q_cap + 1e-12) continue;
                const double b = std::clamp(bp - w.exit_shift, 0.0, slow.capacity());
                const double dt_s = b > a ? slow.charge_duration(a, b) : 0.0;
                const double dt_f = fast.charge_duration(a_prime, std::clamp(bp, a_prime, q_cap));
                best = std::max(best, dt_s - dt_f);
            }
        }
    }
    return best;
}

// Equal-arrival-time scenario oracle for the charged-energy gap bound.
inline double grid_energy_gap(const ChargingFunction& slow, const ChargingFunction& fast,
                              const GapWindow& w, int grid = 160) {
    const double q_cap = fast.capacity();
    if (w.entry_hi < 0) return 0.0;
    std::vector<double> a_anchors;
    for (int g = 0; g <= grid; ++g) a_anchors.push_back(w.entry_hi * g / grid);
    for (const auto& [e, t] : fast.breakpoints()) a_anchors.push_back(e);
    for (const auto& [e, t] : slow.breakpoints()) a_anchors.push_back(e - w.entry_shift);
    double best = 0.0;
    for (double a_prime : a_anchors) {
        if (a_prime < -1e-12 || a_prime > w.entry_hi + 1e-12) continue;
        a_prime = std::clamp(a_prime, 0.0, w.entry_hi);
        const double a = std::clamp(a_prime + w.entry_shift, 0.0, slow.capacity());
        const double alpha = fast.time_at_soc(a_prime);
        const double beta = slow.time_at_soc(a);
        const double u_hi =
            std::min(fast.time_to_full() - alpha, slow.time_to_full() - beta - w.time_shift);
        const double u_lo =
            std::max(0.0, fast.time_at_soc(std::clamp(w.exit_lo, 0.0, q_cap)) - alpha);
        if (u_hi < u_lo) continue;
        std::vector<double> u_anchors;
        for (int g = 0; g <= grid; ++g) u_anchors.push_back(u_lo + (u_hi - u_lo) * g / grid);
        for (const auto& [e, t] : fast.breakpoints()) u_anchors.push_back(t - alpha);
        for (const auto& [e, t] : slow.breakpoints()) u_anchors.push_back(t - beta - w.time_shift);
        for (double u : u_anchors) {
            if (u < u_lo - 1e-12 || u > u_hi + 1e-12) continue;
            u = std::clamp(u, u_lo, u_hi);
            const double dq_f = fast.soc_at_time(alpha + u) - a_prime;
            const double dq_s =
                slow.soc_at_time(std::clamp(beta + u + w.time_shift, 0.0, slow.time_to_full())) -
                a;
            best = std::max(best, dq_f - dq_s);
        }
    }
    return best;
}

// Hand-rolled instance: explicit nodes, matrices from coordinates.
struct InstanceBuilder {
    std::vector<Node> nodes;
    EvParams ev{16.0, 10.0, 0.125, 40.0};
    std::map<TechId, ChargingFunction> funcs;
    int max_stations = 1;
    int max_routes = 4;

    InstanceBuilder() {
        Node depot;
        depot.kind = NodeKind::Depot;
        nodes.push_back(depot);
    }
    InstanceBuilder& customer(double x, double y, double service = 0.5) {
        Node n;
        n.kind = NodeKind::Customer;
        n.x = x;
        n.y = y;
        n.service_time = service;
        nodes.push_back(n);
        return *this;
    }
    InstanceBuilder& station(double x, double y, const TechId& tech) {
        Node n;
        n.kind = NodeKind::Station;
        n.x = x;
        n.y = y;
        n.tech = tech;
        nodes.push_back(n);
        return *this;
    }
    InstanceBuilder& function(const ChargingFunction& f) {
        funcs.emplace(f.tech(), f);
        return *this;
    }
    Instance build(const std::string& name = "test") {
        for (size_t i = 0; i < nodes.size(); ++i) nodes[i].id = static_cast<int>(i);
        return make_instance(name, nodes, ev, max_stations, max_routes, funcs);
    }
};

// Independent desk-scale optimum: enumerates open-station subsets, customer
// partitions, permutations, and per-gap recharge paths directly, with
// charging from optimize_fixed_route_charging. Structured entirely
// differently from exact::brute_force; used as its second implementation.
inline double oracle_optimum(const Instance& inst, bool* found = nullptr) {
    const auto customers = inst.customers();
    const auto stations = inst.stations();
    const PathSet paths = enumerate_paths(inst, inst.max_stations);
    double best = std::numeric_limits<double>::infinity();

    const int n = static_cast<int>(customers.size());
    std::vector<int> assign(n, 0);
    // assignment of customers to route labels 0..max_routes-1
    std::function<void(int)> routes_rec = [&](int pos) {
        if (pos < n) {
            for (int r = 0; r < inst.max_routes && r <= pos; ++r) {
                assign[pos] = r;
                routes_rec(pos + 1);
            }
            // allow opening a fresh label equal to pos (canonical)
            return;
        }
        // group and permute each route independently; since charging is
        // route-separable the sum of per-route minima is the optimum for
        // this grouping under a fixed open set.
        std::map<int, std::vector<NodeId>> groups;
        for (int i = 0; i < n; ++i) groups[assign[i]].push_back(customers[i]);
        for (uint32_t open = 0; open < (1u << stations.size()); ++open) {
            if (__builtin_popcount(open) > inst.max_stations) continue;
            std::set<NodeId> allowed;
            for (size_t s = 0; s < stations.size(); ++s)
                if (open >> s & 1u) allowed.insert(stations[s]);
            double total = 0.0;
            bool ok = true;
            for (auto& [r, members] : groups) {
                std::vector<NodeId> perm = members;
                std::sort(perm.begin(), perm.end());
                double route_best = std::numeric_limits<double>::infinity();
                do {
                    // expand every gap with every allowed path combination
                    std::vector<NodeId> hops{0};
                    for (NodeId c : perm) hops.push_back(c);
                    hops.push_back(0);
                    std::function<void(size_t, std::vector<NodeId>&)> gaps =
                        [&](size_t g, std::vector<NodeId>& acc) {
                            if (g + 1 == hops.size()) {
                                const ChargingPlan plan =
                                    optimize_fixed_route_charging(inst, acc);
                                if (plan.feasible) {
                                    double travel = 0.0;
                                    for (size_t i = 1; i < acc.size(); ++i)
                                        travel += inst.travel_time(acc[i - 1], acc[i]);
                                    route_best =
                                        std::min(route_best, travel + plan.total_charge_time);
                                }
                                return;
                            }
                            const auto& options = paths.at({hops[g], hops[g + 1]});
                            for (const auto& p : options) {
                                bool usable = true;
                                for (NodeId s : p.stations)
                                    if (!allowed.count(s)) usable = false;
                                if (!usable) continue;
                                const size_t mark = acc.size();
                                for (NodeId s : p.stations) acc.push_back(s);
                                acc.push_back(hops[g + 1]);
                                gaps(g + 1, acc);
                                acc.resize(mark);
                            }
                        };
                    std::vector<NodeId> acc{0};
                    gaps(0, acc);
                } while (std::next_permutation(perm.begin(), perm.end()));
                if (!std::isfinite(route_best)) {
                    ok = false;
                    break;
                }
                total += route_best;
            }
            if (ok) best = std::min(best, total);
        }
    };
    routes_rec(0);
    if (found) *found = std::isfinite(best);
    return best;
}

// Exhaustive subtour-cut scan over every depot-free subset (|V| small).
inline std::vector<SubtourCut> scan_all_cuts(const std::map<std::pair<NodeId, NodeId>, double>& x,
                                             int n_nodes) {
    std::vector<SubtourCut> out;
    const int m = n_nodes - 1;  // nodes 1..n-1
    for (uint32_t mask = 1; mask < (1u << m); ++mask) {
        if (__builtin_popcount(mask) < 2) continue;
        SubtourCut cut;
        for (int v = 0; v < m; ++v)
            if (mask >> v & 1u) cut.nodes.push_back(v + 1);
        if (sec_violation(cut, x) > 1e-6) out.push_back(cut);
    }
    return out;
}

}  // namespace elrp::test
