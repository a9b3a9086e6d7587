#include "elrp/preprocess.hpp"

#include <algorithm>
#include <limits>
#include <queue>

namespace elrp {

double min_escape_energy(const Instance& inst, NodeId customer) {
    double best = inst.energy(customer, 0);  // depot
    for (NodeId s : inst.stations()) best = std::min(best, inst.energy(customer, s));
    return best;
}

std::set<std::pair<NodeId, NodeId>> infeasible_arcs(const Instance& inst) {
    std::set<std::pair<NodeId, NodeId>> out;
    const auto customers = inst.customers();
    std::map<NodeId, double> esc;
    for (NodeId c : customers) esc[c] = min_escape_energy(inst, c);
    const double q_cap = inst.battery_capacity();
    for (NodeId i : customers)
        for (NodeId j : customers) {
            if (i == j) continue;
            if (esc[i] + inst.energy(i, j) + esc[j] > q_cap + kFeasTol) out.insert({i, j});
        }
    return out;
}

PreprocessReport preprocess(const Instance& inst) {
    PreprocessReport rep;
    rep.infeasible_arcs = infeasible_arcs(inst);
    for (NodeId c : inst.customers()) rep.customer_escape[c] = min_escape_energy(inst, c);
    const auto stations = inst.stations();
    for (NodeId s : stations) {
        double best = inst.energy(s, 0);
        for (NodeId t : stations)
            if (t != s) best = std::min(best, inst.energy(s, t));
        for (NodeId c : inst.customers())
            best = std::min(best, inst.energy(s, c) + inst.energy(c, s));
        rep.station_escape[s] = best;
    }
    return rep;
}

double sec_violation(const SubtourCut& cut,
                     const std::map<std::pair<NodeId, NodeId>, double>& x) {
    std::set<NodeId> in(cut.nodes.begin(), cut.nodes.end());
    double flow = 0.0;
    for (const auto& [arc, v] : x)
        if (in.count(arc.first) && in.count(arc.second)) flow += v;
    return flow - cut.rhs();
}

namespace {

// Dinic max-flow on a small dense-ish graph; doubles as capacities.
class MaxFlow {
  public:
    explicit MaxFlow(int n) : head_(n, -1), level_(n), it_(n) {}

    void add_edge(int u, int v, double cap) {
        edges_.push_back({v, head_[u], cap});
        head_[u] = static_cast<int>(edges_.size()) - 1;
        edges_.push_back({u, head_[v], 0.0});
        head_[v] = static_cast<int>(edges_.size()) - 1;
    }

    double run(int s, int t) {
        double flow = 0.0;
        while (bfs(s, t)) {
            it_ = head_;
            double f;
            while ((f = dfs(s, t, kInf)) > kEps) flow += f;
        }
        return flow;
    }

    // After run(): nodes reachable from s in the residual graph.
    std::vector<bool> min_cut_side(int s) const {
        std::vector<bool> seen(head_.size(), false);
        std::queue<int> q;
        q.push(s);
        seen[s] = true;
        while (!q.empty()) {
            int u = q.front();
            q.pop();
            for (int e = head_[u]; e >= 0; e = edges_[e].next) {
                if (edges_[e].cap > kEps && !seen[edges_[e].to]) {
                    seen[edges_[e].to] = true;
                    q.push(edges_[e].to);
                }
            }
        }
        return seen;
    }

  private:
    static constexpr double kInf = std::numeric_limits<double>::infinity();
    static constexpr double kEps = 1e-11;

    struct Edge {
        int to;
        int next;
        double cap;
    };

    bool bfs(int s, int t) {
        std::fill(level_.begin(), level_.end(), -1);
        std::queue<int> q;
        q.push(s);
        level_[s] = 0;
        while (!q.empty()) {
            int u = q.front();
            q.pop();
            for (int e = head_[u]; e >= 0; e = edges_[e].next)
                if (edges_[e].cap > kEps && level_[edges_[e].to] < 0) {
                    level_[edges_[e].to] = level_[u] + 1;
                    q.push(edges_[e].to);
                }
        }
        return level_[t] >= 0;
    }

    double dfs(int u, int t, double pushed) {
        if (u == t) return pushed;
        for (int& e = it_[u]; e >= 0; e = edges_[e].next) {
            Edge& ed = edges_[e];
            if (ed.cap > kEps && level_[ed.to] == level_[u] + 1) {
                const double f = dfs(ed.to, t, std::min(pushed, ed.cap));
                if (f > kEps) {
                    ed.cap -= f;
                    edges_[e ^ 1].cap += f;
                    return f;
                }
            }
        }
        return 0.0;
    }

    std::vector<Edge> edges_;
    std::vector<int> head_;
    std::vector<int> level_;
    std::vector<int> it_;
};

bool is_integral(const std::map<std::pair<NodeId, NodeId>, double>& x) {
    for (const auto& [arc, v] : x)
        if (std::abs(v) > kFeasTol && std::abs(v - 1.0) > kFeasTol) return false;
    return true;
}

}  // namespace

std::vector<SubtourCut> separate_sec(const std::map<std::pair<NodeId, NodeId>, double>& x,
                                     const Instance& inst) {
    const int n = inst.num_nodes();
    std::vector<SubtourCut> cuts;
    auto push_cut = [&](std::vector<NodeId> nodes) {
        std::sort(nodes.begin(), nodes.end());
        SubtourCut cut{std::move(nodes)};
        if (cut.nodes.size() < 2 || static_cast<int>(cut.nodes.size()) > n - 1) return;
        if (sec_violation(cut, x) <= kFeasTol) return;
        for (const auto& c : cuts)
            if (c.nodes == cut.nodes) return;
        cuts.push_back(std::move(cut));
    };

    if (is_integral(x)) {
        // Union-find over the support graph, then one cut per depot-free
        // component whose internal flow exceeds |G'|-1.
        std::vector<int> parent(n);
        for (int i = 0; i < n; ++i) parent[i] = i;
        std::function<int(int)> find = [&](int a) {
            while (parent[a] != a) a = parent[a] = parent[parent[a]];
            return a;
        };
        for (const auto& [arc, v] : x)
            if (v > 0.5) parent[find(arc.first)] = find(arc.second);
        std::map<int, std::vector<NodeId>> comps;
        for (const auto& [arc, v] : x) {
            if (v <= 0.5) continue;
            comps[find(arc.first)];
        }
        for (auto& [root, members] : comps) {
            for (int i = 0; i < n; ++i)
                if (find(i) == root) members.push_back(i);
            if (std::find(members.begin(), members.end(), 0) != members.end()) continue;
            push_cut(members);
        }
    } else {
        // Exact separation of max_{S not containing the depot} x(A(S)) - |S|
        // via min cut on the project-selection network, forcing each node
        // into S in turn so every violated "region" yields a cut.
        struct Arc {
            int u, v;
            double w;
        };
        std::vector<Arc> arcs;
        for (const auto& [arc, v] : x)
            if (arc.first != 0 && arc.second != 0 && v > kFeasTol)
                arcs.push_back({arc.first, arc.second, v});
        if (arcs.empty()) return cuts;
        for (int forced = 1; forced < n; ++forced) {
            const int num_arcs = static_cast<int>(arcs.size());
            const int src = n + num_arcs;
            const int sink = src + 1;
            MaxFlow mf(sink + 1);
            double total = 0.0;
            for (int a = 0; a < num_arcs; ++a) {
                mf.add_edge(src, n + a, arcs[a].w);
                mf.add_edge(n + a, arcs[a].u, std::numeric_limits<double>::infinity());
                mf.add_edge(n + a, arcs[a].v, std::numeric_limits<double>::infinity());
                total += arcs[a].w;
            }
            for (int v = 1; v < n; ++v) mf.add_edge(v, sink, 1.0);
            mf.add_edge(src, forced, std::numeric_limits<double>::infinity());
            const double cut_value = mf.run(src, sink);
            if (total - cut_value <= -1.0 + kFeasTol) continue;
            const auto side = mf.min_cut_side(src);
            std::vector<NodeId> members;
            for (int v = 1; v < n; ++v)
                if (side[v]) members.push_back(v);
            push_cut(std::move(members));
        }
    }
    std::sort(cuts.begin(), cuts.end(),
              [](const SubtourCut& a, const SubtourCut& b) { return a.nodes < b.nodes; });
    return cuts;
}

}  // namespace elrp
