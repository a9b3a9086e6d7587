#include "elrp/study.hpp"

#include <atomic>
#include <cstdio>
#include <sstream>
#include <thread>

#include "elrp/mip/builders.hpp"
#include "elrp/simulate.hpp"

namespace elrp {

namespace {

std::string join_ids(const std::vector<NodeId>& ids) {
    std::ostringstream os;
    for (size_t i = 0; i < ids.size(); ++i) os << (i ? ";" : "") << ids[i];
    return os.str();
}

std::string num3(double v) {
    char buf[32];
    std::snprintf(buf, sizeof(buf), "%.3f", v);
    return buf;
}

struct EngineResult {
    bool ok = false;
    bool timeout = false;
    double objective = 0.0;
    RouteSolution solution;
};

EngineResult run_engine(const Instance& inst, const StudyOptions& opts) {
    EngineResult out;
    if (opts.engine == "exact") {
        ExactResult res = solve_exact(inst, opts.limits);
        out.ok = res.found;
        out.timeout = res.found && !res.optimal;
        out.objective = res.objective;
        out.solution = res.solution;
        return out;
    }
    // backend engine: solve M2 through the external solver and decode
    mip::MipModel model = mip::build_m2(inst, 1, false);
    mip::SolveResult r = mip::backend_solve(model, opts.backend);
    if ((r.status == mip::SolveStatus::Optimal || r.status == mip::SolveStatus::Feasible) &&
        !r.assignment.values.empty()) {
        out.solution = mip::solution_from_assignment(model, inst, r.assignment);
        const ValidationReport rep = validate_solution(inst, out.solution);
        out.ok = rep.feasible();
        out.objective = rep.objective;
        out.timeout = r.status != mip::SolveStatus::Optimal;
    }
    return out;
}

}  // namespace

StudyRow compare_charging(const Instance& inst, const StudyOptions& opts) {
    StudyRow row;
    row.instance = inst.name;

    EngineResult nl = run_engine(inst, opts);
    if (!nl.ok) {
        row.status = "infeasible";
        return row;
    }
    row.obj = nl.objective;
    row.ev_routes = static_cast<int>(nl.solution.routes.size());
    row.open_stations.assign(nl.solution.open_stations.begin(), nl.solution.open_stations.end());

    const Instance lin_inst = with_linearized_charging(inst);
    EngineResult lin = run_engine(lin_inst, opts);
    if (!lin.ok) {
        row.status = "infeasible";
        return row;
    }
    row.obj_linear = lin.objective;
    row.ev_routes_linear = static_cast<int>(lin.solution.routes.size());
    row.open_stations_linear.assign(lin.solution.open_stations.begin(),
                                    lin.solution.open_stations.end());
    if (nl.timeout || lin.timeout) row.status = "timeout";

    const Reevaluation reeval = reevaluate_under_nonlinear(inst, lin.solution);
    if (!reeval.feasible) {
        row.status = "nl_ld_infeasible";
    } else {
        row.obj_nl_ld = reeval.objective;
        row.nl_gap_pct = 100.0 * (reeval.objective - row.obj) / row.obj;
    }
    row.stations_differ = row.open_stations != row.open_stations_linear;
    row.routes_differ = row.ev_routes != row.ev_routes_linear;
    return row;
}

std::vector<StudyRow> run_study(const std::vector<Instance>& instances,
                                const StudyOptions& opts) {
    std::vector<StudyRow> rows(instances.size());
    const int jobs = std::max(1, opts.jobs);
    if (jobs == 1) {
        for (size_t i = 0; i < instances.size(); ++i)
            rows[i] = compare_charging(instances[i], opts);
        return rows;
    }
    std::vector<std::thread> pool;
    std::atomic<size_t> next{0};
    for (int t = 0; t < jobs; ++t)
        pool.emplace_back([&]() {
            for (;;) {
                const size_t i = next.fetch_add(1);
                if (i >= instances.size()) return;
                rows[i] = compare_charging(instances[i], opts);
            }
        });
    for (auto& th : pool) th.join();
    return rows;
}

std::string study_csv(const std::vector<StudyRow>& rows) {
    std::ostringstream os;
    os << "instance,obj,ev_routes,open_stations,obj_linear,ev_routes_linear,"
          "open_stations_linear,obj_nl_ld,nl_gap_pct,stations_differ,routes_differ,status\n";
    for (const auto& r : rows) {
        os << r.instance << "," << num3(r.obj) << "," << r.ev_routes << ","
           << join_ids(r.open_stations) << "," << num3(r.obj_linear) << ","
           << r.ev_routes_linear << "," << join_ids(r.open_stations_linear) << ","
           << num3(r.obj_nl_ld) << ",";
        char gap[32];
        std::snprintf(gap, sizeof(gap), "%.1f", r.nl_gap_pct);
        os << gap << "," << (r.stations_differ ? 1 : 0) << "," << (r.routes_differ ? 1 : 0)
           << "," << r.status << "\n";
    }
    return os.str();
}

}  // namespace elrp
