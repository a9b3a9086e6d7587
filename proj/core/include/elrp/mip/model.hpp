#pragma once

#include <map>
#include <string>
#include <vector>

#include "elrp/core.hpp"
#include "elrp/paths.hpp"

namespace elrp::mip {

enum class VarKind { Binary, Continuous };
enum class Sense { LE, EQ, GE };

struct Variable {
    std::string name;
    VarKind kind = VarKind::Continuous;
    double lower = 0.0;
    double upper = 0.0;
    double obj = 0.0;
};

struct LinTerm {
    int var = 0;
    double coeff = 0.0;
};

struct Constraint {
    std::string name;
    std::vector<LinTerm> terms;
    Sense sense = Sense::LE;
    double rhs = 0.0;
};

enum class FormulationId { M1, M2, M3, M4 };

std::string to_string(FormulationId f);
FormulationId formulation_from_string(const std::string& s);

// Solver-neutral linear model. Variable names double as the registry keys;
// the naming patterns per formulation are documented in the README.
// Minimization objective. Immutable once built (builders aside).
class MipModel {
  public:
    std::string name;
    FormulationId formulation = FormulationId::M1;
    int beta = 0;
    PathSet m4_paths;  // the path set an M4 model was built over

    int add_var(const std::string& name, VarKind kind, double lower, double upper,
                double obj = 0.0);
    int add_con(const std::string& name, Sense sense, double rhs);
    void add_term(int con, int var, double coeff);

    int var_id(const std::string& name) const;  // throws on unknown names
    bool has_var(const std::string& name) const;
    const Variable& variable(int id) const { return vars_[id]; }
    Variable& variable(int id) { return vars_[id]; }
    Constraint& constraint(int id) { return cons_[id]; }
    const std::vector<Variable>& variables() const { return vars_; }
    const std::vector<Constraint>& constraints() const { return cons_; }
    int num_vars() const { return static_cast<int>(vars_.size()); }
    int num_cons() const { return static_cast<int>(cons_.size()); }

  private:
    std::vector<Variable> vars_;
    std::vector<Constraint> cons_;
    std::map<std::string, int> registry_;
};

// Variable name -> value. Missing names evaluate as 0 (with a warning).
struct Assignment {
    std::map<std::string, double> values;

    double get(const std::string& name) const {
        auto it = values.find(name);
        return it == values.end() ? 0.0 : it->second;
    }
    void set(const std::string& name, double v) { values[name] = v; }
};

struct RowViolation {
    std::string row;
    double lhs = 0.0;
    Sense sense = Sense::LE;
    double rhs = 0.0;
    double amount = 0.0;  // positive violation magnitude
};

struct EvalResult {
    bool feasible = false;
    double objective = 0.0;
    std::vector<RowViolation> row_violations;
    std::vector<std::string> bound_violations;
    std::vector<std::string> warnings;  // e.g. variables missing from the assignment
};

// Exact row-by-row check at tolerance 1e-6; objective is the dot product.
EvalResult evaluate_assignment(const MipModel& model, const Assignment& assignment);

enum class SolveStatus { Optimal, Feasible, Infeasible, Unknown };

std::string to_string(SolveStatus s);

struct SolveResult {
    SolveStatus status = SolveStatus::Unknown;
    bool has_objective = false;
    double objective = 0.0;
    bool has_bound = false;
    double bound = 0.0;  // relaxation / dual bound
    Assignment assignment;
    std::string diagnostics;
};

// Optimality gap in percent: 100 * |bound - value| / |value|.
// Throws std::domain_error when value == 0.
double mip_gap(double obj_val, double obj_bound);

// Deterministic fixed-section MPS (NAME/ROWS/COLUMNS/RHS/BOUNDS/ENDATA,
// binaries via BOUNDS BV) and CPLEX-style LP writers. Names longer than
// 255 characters are mangled with a stable hash; a collision after
// mangling raises an error.
std::string export_mps(const MipModel& model);
std::string export_lp(const MipModel& model);

// Reads back the subset of MPS emitted by export_mps (sufficient for an
// equivalence round-trip); registry/formulation metadata is not restored.
MipModel read_mps(const std::string& text);

}  // namespace elrp::mip
