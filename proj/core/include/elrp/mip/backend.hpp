#pragma once

#include <string>
#include <vector>

#include "elrp/mip/model.hpp"

namespace elrp::mip {

// External MIP backend, file-exchange protocol: the executable is invoked
// as `<command> <model.mps> <solution.out> <time_limit_s>` and writes a
// solution file of plain `name value` lines, optionally preceded by
// `status <optimal|feasible|infeasible|unknown>`, `objective <v>` and
// `bound <v>` lines. Resolved from ELRP_BACKEND when `command` is empty.
struct BackendConfig {
    std::string command;
    double time_limit_s = 3600.0;
    std::string workdir;  // scratch directory; a temp dir when empty
};

// Returns status Unknown (without throwing) when no backend is configured.
// Crashes and timeouts surface as Unknown with captured diagnostics.
SolveResult backend_solve(const MipModel& model, const BackendConfig& config);

bool backend_available(const BackendConfig& config);

struct BetaTrial {
    int beta = 0;
    SolveStatus status = SolveStatus::Unknown;
    bool has_objective = false;
    double objective = 0.0;
};

struct BetaEscalationResult {
    SolveResult best;
    int beta = 0;                   // the beta that produced `best`
    std::vector<BetaTrial> trail;   // deterministic log of attempts
};

// Starts at beta = 0 and re-solves with beta+1 while the incumbent
// improves; stops at the first non-improving step (or on solver failure).
// Throws std::runtime_error when no backend is configured.
BetaEscalationResult solve_with_beta_escalation(const Instance& inst, FormulationId formulation,
                                                const BackendConfig& config, bool strengthen,
                                                int max_beta = 8);

}  // namespace elrp::mip
