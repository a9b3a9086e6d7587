#pragma once

#include "elrp/core.hpp"
#include "elrp/mip/model.hpp"
#include "elrp/paths.hpp"
#include "elrp/preprocess.hpp"
#include "elrp/simulate.hpp"

namespace elrp::mip {

// Node-based formulation with beta dummy copies per station. Constraint
// families carry the equation numbers of the model writeup (c2..c30);
// `strengthen` additionally fixes the preprocess arc set to zero, adds the
// SoC floor rows (c38/c39) and the copy-ordering symmetry rows (c29).
MipModel build_m1(const Instance& inst, int beta, bool strengthen);

// Arc-tracking variant: node SoC/time variables replaced by per-arc
// q_ij / tau_ij (rows c41..c51). Charging time enters the time balance via
// a per-arc split of Delta (rows c47d / c47x).
MipModel build_m2(const Instance& inst, int beta, bool strengthen);

// Recharge-arc formulation over customer/depot hops with at most one
// station per hop (rows c53..c82, plus x-link cleanup rows).
MipModel build_m3(const Instance& inst);

// Recharge-path formulation over an enumerated (optionally dominance
// pruned) path set (rows c91..c120).
MipModel build_m4(const Instance& inst, const PathSet& paths);

// Any of the four builders on the linearized-charging instance.
MipModel build_linear_variant(FormulationId f, const Instance& inst, int beta, bool strengthen,
                              const PathSet* paths = nullptr);

// Appends violated subtour cuts as rows named c40_<k>.
void add_sec_cuts(MipModel& model, const std::vector<SubtourCut>& cuts);

// Converts a semantic solution into a variable assignment for `model`.
// Exact when the solution is feasible: every charging coefficient is
// recomputed from the charge amounts. Throws std::invalid_argument when the
// solution cannot be expressed (more visits to one station than beta+1
// copies for M1/M2, multi-station hops for M3, a hop whose path is absent
// from the model's path set for M4).
Assignment solution_to_assignment(const MipModel& model, const Instance& inst,
                                  const RouteSolution& sol);

// Inverse decode for M1/M2 assignments (used by the backend study path).
RouteSolution solution_from_assignment(const MipModel& model, const Instance& inst,
                                       const Assignment& assignment);

}  // namespace elrp::mip
