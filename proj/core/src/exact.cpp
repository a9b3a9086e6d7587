#include "elrp/exact.hpp"

#include <algorithm>
#include <chrono>
#include <cmath>
#include <functional>
#include <limits>
#include <map>
#include <set>

#include "elrp/preprocess.hpp"

namespace elrp {

namespace {

constexpr double kInf = std::numeric_limits<double>::infinity();

using Clock = std::chrono::steady_clock;

struct RouteBest {
    double cost = kInf;
    std::vector<NodeId> nodes;
    std::vector<ChargeStop> charges;
    std::string first_violation;
};

std::vector<std::vector<NodeId>> route_key(const RouteSolution& sol) {
    std::vector<std::vector<NodeId>> key;
    for (const auto& r : sol.routes) key.push_back(r.nodes);
    std::sort(key.begin(), key.end());
    return key;
}

// Shared context: per-gap path options restricted to an open-station set.
class Search {
  public:
    Search(const Instance& inst, const ExactOptions& opts)
        : inst_(inst), opts_(opts), q_cap_(inst.battery_capacity()) {
        paths_ = opts.use_pruned_paths ? prune_dominated(inst_)
                                       : enumerate_paths(inst_, inst_.max_stations);
        if (opts.use_infeasible_arcs || opts.use_soc_floors) report_ = preprocess(inst_);
        stations_ = inst_.stations();
        customers_ = inst_.customers();
        for (auto& [key, list] : paths_)
            std::stable_sort(list.begin(), list.end(),
                             [](const RechargePath& a, const RechargePath& b) {
                                 if (a.ct != b.ct) return a.ct < b.ct;
                                 return a.stations < b.stations;
                             });
    }

    const std::vector<NodeId>& customers() const { return customers_; }
    const std::vector<NodeId>& stations() const { return stations_; }

    double min_gap_ct(NodeId i, NodeId j) const {
        const auto it = paths_.find({i, j});
        if (it == paths_.end() || it->second.empty()) return kInf;
        double best = kInf;
        for (const auto& p : it->second) best = std::min(best, p.ct);
        return best;
    }

    // Cheapest outgoing gap of a customer, over all endpoints.
    double min_out_ct(NodeId c) const {
        double best = kInf;
        best = std::min(best, min_gap_ct(c, 0));
        for (NodeId j : customers_)
            if (j != c) best = std::min(best, min_gap_ct(c, j));
        return best;
    }

    // Minimum-cost realization of a fixed customer sequence with stations
    // restricted to `open` (bitmask over stations_). Memoized.
    const RouteBest& sequence_cost(const std::vector<NodeId>& seq, uint32_t open) {
        const auto key = std::make_pair(seq, open);
        auto it = memo_.find(key);
        if (it != memo_.end()) return it->second;
        RouteBest best = realize(seq, open);
        return memo_.emplace(key, std::move(best)).first->second;
    }

    long charging_calls = 0;

  private:
    bool station_allowed(NodeId s, uint32_t open) const {
        const auto pos = std::find(stations_.begin(), stations_.end(), s) - stations_.begin();
        return open >> pos & 1u;
    }

    bool gap_allowed(const RechargePath& p, NodeId from, NodeId to, uint32_t open) const {
        for (NodeId s : p.stations)
            if (!station_allowed(s, open)) return false;
        if (p.direct() && opts_.use_infeasible_arcs && from != 0 && to != 0 &&
            report_.infeasible_arcs.count({from, to}))
            return false;
        return true;
    }

    RouteBest realize(const std::vector<NodeId>& seq, uint32_t open) {
        RouteBest best;
        std::vector<NodeId> hops;
        hops.push_back(0);
        for (NodeId c : seq) hops.push_back(c);
        hops.push_back(0);
        const int gaps = static_cast<int>(hops.size()) - 1;

        std::vector<std::vector<const RechargePath*>> options(gaps);
        std::vector<double> min_ct(gaps, kInf);
        for (int g = 0; g < gaps; ++g) {
            const auto it = paths_.find({hops[g], hops[g + 1]});
            if (it == paths_.end()) {
                best.first_violation = "no enumerated path between " +
                                       std::to_string(hops[g]) + " and " +
                                       std::to_string(hops[g + 1]);
                return best;
            }
            for (const auto& p : it->second)
                if (gap_allowed(p, hops[g], hops[g + 1], open)) {
                    options[g].push_back(&p);
                    min_ct[g] = std::min(min_ct[g], p.ct);
                }
            if (options[g].empty()) {
                best.first_violation = "no usable recharge path between " +
                                       std::to_string(hops[g]) + " and " +
                                       std::to_string(hops[g + 1]);
                return best;
            }
        }
        std::vector<double> tail(gaps + 1, 0.0);
        for (int g = gaps - 1; g >= 0; --g) tail[g] = tail[g + 1] + min_ct[g];

        std::vector<const RechargePath*> pick(gaps, nullptr);
        std::vector<NodeId> nodes{0};
        std::function<void(int, double, double)> dfs = [&](int g, double travel, double max_soc) {
            if (travel + tail[g] >= best.cost - 1e-12) return;
            if (g == gaps) {
                ++charging_calls;
                ChargingPlan plan = optimize_fixed_route_charging(inst_, nodes);
                if (!plan.feasible) {
                    if (best.first_violation.empty()) best.first_violation = plan.why_infeasible;
                    return;
                }
                const double cost = travel + plan.total_charge_time;
                if (cost < best.cost - 1e-12 ||
                    (cost < best.cost + 1e-12 && nodes < best.nodes)) {
                    best.cost = std::min(cost, best.cost);
                    best.nodes = nodes;
                    best.charges = plan.charges;
                }
                return;
            }
            for (const RechargePath* p : options[g]) {
                // Optimistic SoC screen: even charging to full at every stop,
                // each chained arc must fit in the battery.
                double soc = max_soc;
                bool ok = true;
                NodeId prev = hops[g];
                for (NodeId s : p->stations) {
                    soc -= inst_.energy(prev, s);
                    if (soc < -kFeasTol) {
                        ok = false;
                        break;
                    }
                    soc = q_cap_;
                    prev = s;
                }
                if (ok) {
                    soc -= inst_.energy(prev, hops[g + 1]);
                    if (soc < -kFeasTol) ok = false;
                }
                if (ok && opts_.use_soc_floors && hops[g + 1] != 0) {
                    const auto fl = report_.customer_escape.find(hops[g + 1]);
                    if (fl != report_.customer_escape.end() && soc < fl->second - kFeasTol)
                        ok = false;
                }
                if (!ok) {
                    if (best.first_violation.empty())
                        best.first_violation = "battery underflow on gap " +
                                               std::to_string(hops[g]) + "->" +
                                               std::to_string(hops[g + 1]);
                    continue;
                }
                const size_t mark = nodes.size();
                for (NodeId s : p->stations) nodes.push_back(s);
                nodes.push_back(hops[g + 1]);
                pick[g] = p;
                dfs(g + 1, travel + p->ct, hops[g + 1] == 0 ? q_cap_ : soc);
                nodes.resize(mark);
            }
        };
        dfs(0, 0.0, q_cap_);
        return best;
    }

    const Instance& inst_;
    ExactOptions opts_;
    double q_cap_;
    PathSet paths_;
    PreprocessReport report_;
    std::vector<NodeId> stations_;
    std::vector<NodeId> customers_;
    std::map<std::pair<std::vector<NodeId>, uint32_t>, RouteBest> memo_;
};

std::vector<uint32_t> open_subsets(int n_stations, int max_open) {
    std::vector<uint32_t> subsets;
    for (uint32_t mask = 0; mask < (1u << n_stations); ++mask)
        if (__builtin_popcount(mask) <= max_open) subsets.push_back(mask);
    std::sort(subsets.begin(), subsets.end(), [](uint32_t a, uint32_t b) {
        const int pa = __builtin_popcount(a), pb = __builtin_popcount(b);
        if (pa != pb) return pa < pb;
        return a < b;
    });
    return subsets;
}

RouteSolution assemble(const Instance& inst, const std::vector<RouteBest>& routes) {
    RouteSolution sol;
    for (const auto& rb : routes) {
        Route r;
        r.nodes = rb.nodes;
        r.charges = rb.charges;
        sol.routes.push_back(std::move(r));
    }
    std::sort(sol.routes.begin(), sol.routes.end(),
              [](const Route& a, const Route& b) { return a.nodes < b.nodes; });
    for (const auto& r : sol.routes)
        for (NodeId v : r.nodes)
            if (inst.nodes[v].is_station()) sol.open_stations.insert(v);
    return sol;
}

// All set partitions of `items` into at most max_blocks nonempty blocks,
// produced in a canonical order.
void for_each_partition(const std::vector<NodeId>& items, int max_blocks,
                        const std::function<void(const std::vector<std::vector<NodeId>>&)>& fn) {
    std::vector<std::vector<NodeId>> blocks;
    std::function<void(size_t)> rec = [&](size_t i) {
        if (i == items.size()) {
            fn(blocks);
            return;
        }
        // index-based: the recursion grows `blocks`, invalidating references
        const size_t existing = blocks.size();
        for (size_t b = 0; b < existing; ++b) {
            blocks[b].push_back(items[i]);
            rec(i + 1);
            blocks[b].pop_back();
        }
        if (static_cast<int>(blocks.size()) < max_blocks) {
            blocks.push_back({items[i]});
            rec(i + 1);
            blocks.pop_back();
        }
    };
    rec(0);
}

}  // namespace

ExactResult brute_force(const Instance& inst, const ExactOptions& opts) {
    const auto t0 = Clock::now();
    ExactResult res;
    Search search(inst, opts);
    const auto& customers = search.customers();
    const int n_stations = static_cast<int>(search.stations().size());
    const auto subsets = open_subsets(n_stations, inst.max_stations);

    double best_cost = kInf;
    std::vector<std::vector<NodeId>> best_key;
    std::set<std::string> reasons;

    for (uint32_t open : subsets) {
        // Best ordering per customer block, memoized inside Search.
        std::map<std::vector<NodeId>, const RouteBest*> block_best;
        auto best_of_block = [&](const std::vector<NodeId>& block) -> const RouteBest* {
            auto it = block_best.find(block);
            if (it != block_best.end()) return it->second;
            std::vector<NodeId> perm = block;
            std::sort(perm.begin(), perm.end());
            const RouteBest* best = nullptr;
            do {
                const RouteBest& rb = search.sequence_cost(perm, open);
                if (!rb.first_violation.empty()) reasons.insert(rb.first_violation);
                if (rb.cost < kInf &&
                    (!best || rb.cost < best->cost - 1e-12 ||
                     (rb.cost < best->cost + 1e-12 && rb.nodes < best->nodes)))
                    best = &rb;
            } while (std::next_permutation(perm.begin(), perm.end()));
            return block_best.emplace(block, best).first->second;
        };

        for_each_partition(customers, inst.max_routes,
                           [&](const std::vector<std::vector<NodeId>>& blocks) {
                               double cost = 0.0;
                               std::vector<RouteBest> picked;
                               for (const auto& block : blocks) {
                                   std::vector<NodeId> sorted_block = block;
                                   std::sort(sorted_block.begin(), sorted_block.end());
                                   const RouteBest* rb = best_of_block(sorted_block);
                                   if (!rb) return;
                                   cost += rb->cost;
                                   picked.push_back(*rb);
                               }
                               if (cost >= best_cost + 1e-12) return;
                               RouteSolution sol = assemble(inst, picked);
                               const auto key = route_key(sol);
                               if (cost < best_cost - 1e-12 ||
                                   (std::abs(cost - best_cost) <= 1e-12 && key < best_key)) {
                                   best_cost = cost;
                                   best_key = key;
                                   res.solution = std::move(sol);
                                   res.found = true;
                               }
                           });
    }
    res.nodes = search.charging_calls;
    if (res.found) {
        res.objective = best_cost;
        res.bound = best_cost;
        res.optimal = true;
    } else {
        res.infeasibility.assign(reasons.begin(), reasons.end());
        if (res.infeasibility.empty())
            res.infeasibility.push_back("no feasible route structure exists");
    }
    res.wall_time_s = std::chrono::duration<double>(Clock::now() - t0).count();
    return res;
}

ExactResult solve_exact(const Instance& inst, const SearchLimits& limits,
                        const ExactOptions& opts) {
    const auto t0 = Clock::now();
    ExactResult res;
    Search search(inst, opts);
    const auto& customers = search.customers();
    const int n_stations = static_cast<int>(search.stations().size());
    const auto subsets = open_subsets(n_stations, inst.max_stations);

    std::map<NodeId, double> out_lb;
    for (NodeId c : customers) out_lb[c] = search.min_out_ct(c);

    double incumbent = kInf;
    double frontier = kInf;  // smallest bound among abandoned subtrees
    std::vector<std::vector<NodeId>> best_key;
    long nodes = 0;
    bool cutoff = false;
    std::set<std::string> reasons;

    // Skeleton = partition of customers into ordered sequences. Branch by
    // either extending the open sequence or closing it and opening a new one.
    std::vector<std::vector<NodeId>> blocks;
    std::set<NodeId> used;

    auto over_budget = [&]() {
        if (nodes >= limits.node_budget) return true;
        if ((nodes & 0xff) == 0 &&
            std::chrono::duration<double>(Clock::now() - t0).count() > limits.time_budget_s)
            return true;
        return false;
    };

    auto skeleton_bound = [&](bool open_block) {
        // Decided gaps at their cheapest realization plus one cheapest
        // outgoing gap per unassigned customer; charging adds >= 0.
        double lb = 0.0;
        const size_t closed_end = blocks.size() - (open_block ? 1 : 0);
        for (size_t i = 0; i < blocks.size(); ++i) {
            NodeId prev = 0;
            for (NodeId c : blocks[i]) {
                lb += search.min_gap_ct(prev, c);
                prev = c;
            }
            if (i < closed_end)
                lb += search.min_gap_ct(prev, 0);
            else
                lb += search.min_out_ct(prev);
        }
        for (NodeId c : customers)
            if (!used.count(c)) lb += out_lb[c];
        return lb;
    };

    auto evaluate_complete = [&]() {
        for (uint32_t open : subsets) {
            double cost = 0.0;
            std::vector<RouteBest> picked;
            bool ok = true;
            for (const auto& b : blocks) {
                const RouteBest& rb = search.sequence_cost(b, open);
                if (rb.cost >= kInf) {
                    if (!rb.first_violation.empty()) reasons.insert(rb.first_violation);
                    ok = false;
                    break;
                }
                cost += rb.cost;
                picked.push_back(rb);
                if (cost >= incumbent + 1e-12) {
                    ok = false;
                    break;
                }
            }
            if (!ok) continue;
            RouteSolution sol = assemble(inst, picked);
            const auto key = route_key(sol);
            if (cost < incumbent - 1e-12 ||
                (std::abs(cost - incumbent) <= 1e-12 && key < best_key)) {
                incumbent = cost;
                best_key = key;
                res.solution = std::move(sol);
                res.found = true;
            }
        }
    };

    std::function<void(bool)> dfs = [&](bool open_block) {
        ++nodes;
        if (over_budget()) {
            cutoff = true;
            frontier = std::min(frontier, skeleton_bound(open_block));
            return;
        }
        const double lb = skeleton_bound(open_block);
        if (lb >= incumbent - 1e-9) return;
        if (used.size() == customers.size()) {
            if (!open_block) evaluate_complete();
            if (open_block) {
                dfs(false);
            }
            return;
        }
        // Extend the open block (or start one).
        if (open_block) {
            for (NodeId c : customers) {
                if (used.count(c)) continue;
                blocks.back().push_back(c);
                used.insert(c);
                dfs(true);
                used.erase(c);
                blocks.back().pop_back();
            }
            dfs(false);  // close the block
        } else {
            if (static_cast<int>(blocks.size()) >= inst.max_routes) return;
            // Routes form a set: visit each collection once by requiring the
            // first customers of blocks to increase in creation order. Any
            // ordering inside a block stays reachable.
            const NodeId prev_first = blocks.empty() ? -1 : blocks.back().front();
            for (NodeId c : customers) {
                if (used.count(c) || c <= prev_first) continue;
                blocks.push_back({c});
                used.insert(c);
                dfs(true);
                used.erase(c);
                blocks.pop_back();
            }
        }
    };
    dfs(false);

    res.nodes = nodes;
    res.wall_time_s = std::chrono::duration<double>(Clock::now() - t0).count();
    if (res.found) {
        res.objective = incumbent;
        res.optimal = !cutoff;
        res.bound = cutoff ? std::min(incumbent, frontier) : incumbent;
    } else if (cutoff) {
        res.bound = std::min(frontier, incumbent);
    } else {
        res.infeasibility.assign(reasons.begin(), reasons.end());
        if (res.infeasibility.empty())
            res.infeasibility.push_back("no feasible route structure exists");
    }
    return res;
}

}  // namespace elrp
