#pragma once

#include <optional>
#include <string>
#include <vector>

#include "elrp/core.hpp"
#include "elrp/paths.hpp"
#include "elrp/simulate.hpp"

namespace elrp {

struct SearchLimits {
    double time_budget_s = 60.0;
    long node_budget = 50'000'000;
    int max_customers_brute_force = 6;
};

struct ExactOptions {
    bool use_pruned_paths = false;     // recharge paths from prune_dominated
    bool use_infeasible_arcs = false;  // skip direct gaps in the preprocess set I
    bool use_soc_floors = false;       // reachability filter from escape energies
};

struct ExactResult {
    bool found = false;
    double objective = 0.0;
    double bound = 0.0;    // valid lower bound; equals objective when proven
    bool optimal = false;  // search finished (no budget cutoff)
    RouteSolution solution;
    long nodes = 0;
    double wall_time_s = 0.0;
    // When no feasible solution exists: first violation per failed branch.
    std::vector<std::string> infeasibility;
};

// Exhaustive search over customer partitions (<= max_routes blocks), open
// station subsets (<= max_stations), recharge-path insertions per gap, and
// optimal charging per realized route. Global minimum of travel + charging
// time; deterministic tie-break by lexicographically smallest route list.
// Intended for |C| <= 6.
ExactResult brute_force(const Instance& inst, const ExactOptions& opts = {});

// Branch-and-bound over partial route skeletons with an admissible
// travel-time-only completion bound. Returns the incumbent plus a valid
// bound on budget cutoff. Deterministic.
ExactResult solve_exact(const Instance& inst, const SearchLimits& limits = {},
                        const ExactOptions& opts = {.use_pruned_paths = true,
                                                    .use_infeasible_arcs = true,
                                                    .use_soc_floors = true});

}  // namespace elrp
