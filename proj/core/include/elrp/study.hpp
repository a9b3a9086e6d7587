#pragma once

#include <optional>
#include <string>
#include <vector>

#include "elrp/core.hpp"
#include "elrp/exact.hpp"
#include "elrp/mip/backend.hpp"

namespace elrp {

// One row of the linear-vs-nonlinear charging study: the nonlinear optimum,
// the linear-charging optimum, and the nonlinear re-evaluation of the
// linear decisions (routes and opened stations kept, charging re-optimized).
struct StudyRow {
    std::string instance;
    std::string status = "ok";  // ok | timeout | infeasible | nl_ld_infeasible
    double obj = 0.0;           // nonlinear optimum
    int ev_routes = 0;
    std::vector<NodeId> open_stations;
    double obj_linear = 0.0;
    int ev_routes_linear = 0;
    std::vector<NodeId> open_stations_linear;
    double obj_nl_ld = 0.0;  // Obj*
    double nl_gap_pct = 0.0; // 100 * (Obj* - obj) / obj
    bool stations_differ = false;
    bool routes_differ = false;
};

struct StudyOptions {
    std::string engine = "exact";  // exact | backend
    SearchLimits limits;
    mip::BackendConfig backend;
    int jobs = 1;
};

StudyRow compare_charging(const Instance& inst, const StudyOptions& opts);
std::vector<StudyRow> run_study(const std::vector<Instance>& instances,
                                const StudyOptions& opts);

// Fixed column order, deterministic formatting, one header row.
std::string study_csv(const std::vector<StudyRow>& rows);

}  // namespace elrp
