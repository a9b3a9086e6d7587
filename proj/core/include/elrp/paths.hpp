#pragma once

#include <map>
#include <optional>
#include <utility>
#include <vector>

#include "elrp/core.hpp"

namespace elrp {

// Ordered sequence of distinct station candidates traversed between two
// non-station nodes. An empty station list is the direct arc.
struct RechargePath {
    NodeId from = 0;
    NodeId to = 0;
    std::vector<NodeId> stations;
    double ct = 0.0;  // total travel time over the arc chain, hours
    double ce = 0.0;  // total travel energy, kWh
    double cf = 0.0;  // first-arc energy (equals ce for the direct path)
    double cl = 0.0;  // last-arc energy (equals ce for the direct path)

    bool direct() const { return stations.empty(); }
    int length() const { return static_cast<int>(stations.size()); }
};

RechargePath make_path(const Instance& inst, NodeId from, NodeId to,
                       std::vector<NodeId> stations);

using PathSet = std::map<std::pair<NodeId, NodeId>, std::vector<RechargePath>>;

// All station sequences of length 0..max_stations between every ordered
// pair of distinct nodes in C u {o}, keeping only paths whose individual
// arcs fit in the battery. Deterministic: shorter paths first, then
// lexicographic by station ids.
PathSet enumerate_paths(const Instance& inst, int max_stations);

// Scenario geometry for the charging-gap bounds between a slower station s
// (on the candidate dominator p) and a faster one s' (on p'). Derived from
// the path summaries of a single-station pair.
struct GapWindow {
    double entry_shift = 0.0;   // cf' - cf > 0: s is entered that much fuller
    double exit_shift = 0.0;    // cl' - cl > 0: s may leave that much emptier
    double time_shift = 0.0;    // ct' - ct > 0: travel-time headroom of p
    double entry_hi = 0.0;      // Q - cf': highest SoC entering s'
    double exit_lo = 0.0;       // cl': lowest SoC leaving s'
};

GapWindow gap_window(const Instance& inst, const RechargePath& p, const RechargePath& p_prime);

struct GapBound {
    double value = 0.0;
    bool window_empty = false;
};

// Largest extra charging time of the slower station s over s' across all
// scenarios in which both paths deliver the EV at j with equal SoC.
// Exact: the maximum of the piecewise-linear difference is attained on the
// breakpoint grid of both functions.
GapBound max_time_gap(const ChargingFunction& slow, const ChargingFunction& fast,
                      const GapWindow& w);

// Largest extra energy the faster station s' delivers over s across all
// scenarios in which both paths deliver the EV at j at equal times.
GapBound max_energy_gap(const ChargingFunction& slow, const ChargingFunction& fast,
                        const GapWindow& w);

// Appendix-style pairwise dominance between two nonempty paths sharing
// endpoints. Case 1 (p at least as fast): strict cf/cl/ct (and ce)
// improvement. Case 2 (p slower, single-station pairs only): additionally
// ct + dt_bar < ct' and ce + dq_bar < ce'. Ties are never dominated.
// Throws std::invalid_argument on mismatched endpoints or direct paths.
bool dominates(const Instance& inst, const RechargePath& p, const RechargePath& p_prime);

// Algorithm-1 style pruning: per endpoint pair, iterate k = 1..max_stations,
// compare surviving paths of length <= k in ascending ct order, drop the
// dominated ones, and repeat until a fixpoint. Direct paths always survive.
PathSet prune_dominated(const Instance& inst, const PathSet& all);
PathSet prune_dominated(const Instance& inst);

}  // namespace elrp
