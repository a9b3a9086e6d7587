#pragma once

#include <map>
#include <set>
#include <utility>
#include <vector>

#include "elrp/core.hpp"

namespace elrp {

struct PreprocessReport {
    // Customer-customer arcs that cannot appear in any feasible route.
    std::set<std::pair<NodeId, NodeId>> infeasible_arcs;
    // Minimum escape energy per customer (to the nearest station or depot);
    // doubles as the SoC floor at that customer.
    std::map<NodeId, double> customer_escape;
    // SoC floor on departure from each station candidate.
    std::map<NodeId, double> station_escape;
};

// Minimum energy from customer i to the nearest station candidate or depot.
double min_escape_energy(const Instance& inst, NodeId customer);

// Arc (i,j) between customers is infeasible iff
// escape(i) + e_ij + escape(j) > Q (strict; equality stays feasible).
// Both directions are evaluated independently.
std::set<std::pair<NodeId, NodeId>> infeasible_arcs(const Instance& inst);

PreprocessReport preprocess(const Instance& inst);

struct SubtourCut {
    std::vector<NodeId> nodes;  // G', sorted; depot never included
    int rhs() const { return static_cast<int>(nodes.size()) - 1; }
};

// Separates subtour elimination cuts for an arc-value map x (values in
// [0,1]). Integral vectors: depot-free connected components of the support
// graph with internal flow above |G'|-1. Fractional vectors: exact min-cut
// separation of max over S of x(A(S)) - |S| with each node in turn forced
// into S. Returns only cuts violated by more than 1e-6, sorted by node set.
std::vector<SubtourCut> separate_sec(const std::map<std::pair<NodeId, NodeId>, double>& x,
                                     const Instance& inst);

// Violation amount of a cut against an arc-value map: x(A(G')) - (|G'|-1).
double sec_violation(const SubtourCut& cut,
                     const std::map<std::pair<NodeId, NodeId>, double>& x);

}  // namespace elrp
