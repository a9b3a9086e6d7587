#pragma once

#include <limits>
#include <string>
#include <vector>

#include "elrp/core.hpp"

namespace elrp::mip::detail {

inline constexpr double kInf = std::numeric_limits<double>::infinity();

inline std::string idx(const std::string& base, int a) { return base + "_" + std::to_string(a); }
inline std::string idx(const std::string& base, int a, int b) {
    return base + "_" + std::to_string(a) + "_" + std::to_string(b);
}
inline std::string idx(const std::string& base, int a, int b, int c) {
    return base + "_" + std::to_string(a) + "_" + std::to_string(b) + "_" + std::to_string(c);
}

// Model node space for M1/M2: original nodes 0..n-1 followed by beta dummy
// copies of every station (grouped per station, copies share coordinates).
struct NodeExpansion {
    int n_orig = 0;
    std::vector<int> to_orig;                  // model id -> original id
    std::vector<std::vector<int>> copy_group;  // per station: [orig, d1, ..., d_beta]
    std::vector<int> station_nodes;            // all station model ids (S')
    std::vector<int> customer_nodes;

    NodeExpansion(const Instance& inst, int beta) {
        n_orig = inst.num_nodes();
        to_orig.resize(n_orig);
        for (int i = 0; i < n_orig; ++i) to_orig[i] = i;
        for (NodeId c : inst.customers()) customer_nodes.push_back(c);
        for (NodeId s : inst.stations()) {
            std::vector<int> group{s};
            for (int b = 0; b < beta; ++b) {
                group.push_back(static_cast<int>(to_orig.size()));
                to_orig.push_back(s);
            }
            copy_group.push_back(group);
            for (int v : group) station_nodes.push_back(v);
        }
    }

    int total() const { return static_cast<int>(to_orig.size()); }
    bool same_group(int a, int b) const { return to_orig[a] == to_orig[b] && a != b; }
    bool is_station(int v, const Instance& inst) const {
        return inst.nodes[to_orig[v]].is_station();
    }
};

}  // namespace elrp::mip::detail
