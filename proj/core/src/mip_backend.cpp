#include <cstdio>
#include <cstdlib>
#include <filesystem>
#include <fstream>
#include <sstream>

#include "elrp/mip/backend.hpp"
#include "elrp/mip/builders.hpp"

namespace elrp::mip {

namespace fs = std::filesystem;

namespace {

std::string resolve_command(const BackendConfig& config) {
    if (!config.command.empty()) return config.command;
    const char* env = std::getenv("ELRP_BACKEND");
    return env ? env : "";
}

SolveResult parse_solution_file(const MipModel& model, const std::string& path,
                                std::string& diag) {
    SolveResult res;
    std::ifstream in(path);
    if (!in) {
        diag += "backend produced no solution file; ";
        return res;
    }
    res.status = SolveStatus::Feasible;  // plain name/value files count as feasible
    std::string line;
    while (std::getline(in, line)) {
        std::istringstream ls(line);
        std::string key;
        if (!(ls >> key) || key[0] == '#') continue;
        if (key == "status") {
            std::string s;
            ls >> s;
            if (s == "optimal") res.status = SolveStatus::Optimal;
            else if (s == "feasible") res.status = SolveStatus::Feasible;
            else if (s == "infeasible") res.status = SolveStatus::Infeasible;
            else res.status = SolveStatus::Unknown;
        } else if (key == "objective") {
            ls >> res.objective;
            res.has_objective = true;
        } else if (key == "bound") {
            ls >> res.bound;
            res.has_bound = true;
        } else {
            double v;
            if (ls >> v) res.assignment.set(key, v);
        }
    }
    if (!res.assignment.values.empty() && !res.has_objective) {
        const EvalResult ev = evaluate_assignment(model, res.assignment);
        res.objective = ev.objective;
        res.has_objective = true;
    }
    // Contract: an optimal claim carries a matching bound.
    if (res.status == SolveStatus::Optimal) {
        if (!res.has_bound) {
            res.bound = res.objective;
            res.has_bound = res.has_objective;
        } else if (res.has_objective && res.bound > res.objective + kFeasTol) {
            diag += "optimal status with bound above objective, demoted to unknown; ";
            res.status = SolveStatus::Unknown;
        }
    }
    if (res.has_bound && res.has_objective && res.bound > res.objective + kFeasTol &&
        res.status != SolveStatus::Unknown) {
        diag += "bound above objective, demoted to unknown; ";
        res.status = SolveStatus::Unknown;
    }
    return res;
}

}  // namespace

bool backend_available(const BackendConfig& config) { return !resolve_command(config).empty(); }

SolveResult backend_solve(const MipModel& model, const BackendConfig& config) {
    SolveResult res;
    const std::string cmd = resolve_command(config);
    if (cmd.empty()) {
        res.diagnostics = "no backend configured (set ELRP_BACKEND)";
        return res;
    }
    std::error_code ec;
    fs::path dir = config.workdir.empty() ? fs::temp_directory_path() / "elrp-backend"
                                          : fs::path(config.workdir);
    fs::create_directories(dir, ec);
    const fs::path mps = dir / (model.name.empty() ? "model.mps" : model.name + ".mps");
    const fs::path sol = dir / (model.name.empty() ? "model.sol" : model.name + ".sol");
    fs::remove(sol, ec);
    {
        std::ofstream out(mps);
        out << export_mps(model);
    }
    std::ostringstream full;
    full << cmd << " '" << mps.string() << "' '" << sol.string() << "' " << config.time_limit_s;
    const int rc = std::system(full.str().c_str());
    std::string diag;
    if (rc != 0) diag += "backend exited with code " + std::to_string(rc) + "; ";
    res = parse_solution_file(model, sol.string(), diag);
    if (rc != 0 && res.status != SolveStatus::Infeasible) res.status = SolveStatus::Unknown;
    res.diagnostics = diag;
    return res;
}

BetaEscalationResult solve_with_beta_escalation(const Instance& inst, FormulationId formulation,
                                                const BackendConfig& config, bool strengthen,
                                                int max_beta) {
    if (!backend_available(config))
        throw std::runtime_error("solve_with_beta_escalation requires a configured backend");
    if (formulation != FormulationId::M1 && formulation != FormulationId::M2)
        throw std::invalid_argument("beta escalation applies to M1/M2 only");

    BetaEscalationResult out;
    bool have_incumbent = false;
    for (int beta = 0; beta <= max_beta; ++beta) {
        const MipModel model = formulation == FormulationId::M1
                                   ? build_m1(inst, beta, strengthen)
                                   : build_m2(inst, beta, strengthen);
        SolveResult r = backend_solve(model, config);
        BetaTrial trial{beta, r.status, r.has_objective, r.objective};
        out.trail.push_back(trial);
        const bool usable = r.has_objective && (r.status == SolveStatus::Optimal ||
                                                r.status == SolveStatus::Feasible);
        if (usable && (!have_incumbent || r.objective < out.best.objective - kFeasTol)) {
            out.best = std::move(r);
            out.beta = beta;
            have_incumbent = true;
            continue;  // improvement: try one more copy
        }
        break;  // no improvement (or no solution) ends the escalation
    }
    return out;
}

}  // namespace elrp::mip
