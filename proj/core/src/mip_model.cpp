#include "elrp/mip/model.hpp"

#include <cmath>
#include <stdexcept>

namespace elrp::mip {

std::string to_string(FormulationId f) {
    switch (f) {
        case FormulationId::M1: return "m1";
        case FormulationId::M2: return "m2";
        case FormulationId::M3: return "m3";
        case FormulationId::M4: return "m4";
    }
    return "m1";
}

FormulationId formulation_from_string(const std::string& s) {
    if (s == "m1" || s == "M1") return FormulationId::M1;
    if (s == "m2" || s == "M2") return FormulationId::M2;
    if (s == "m3" || s == "M3") return FormulationId::M3;
    if (s == "m4" || s == "M4") return FormulationId::M4;
    throw std::invalid_argument("unknown formulation '" + s + "'");
}

std::string to_string(SolveStatus s) {
    switch (s) {
        case SolveStatus::Optimal: return "optimal";
        case SolveStatus::Feasible: return "feasible";
        case SolveStatus::Infeasible: return "infeasible";
        case SolveStatus::Unknown: return "unknown";
    }
    return "unknown";
}

int MipModel::add_var(const std::string& name, VarKind kind, double lower, double upper,
                      double obj) {
    if (!registry_.emplace(name, static_cast<int>(vars_.size())).second)
        throw std::invalid_argument("duplicate variable name '" + name + "'");
    vars_.push_back({name, kind, lower, upper, obj});
    return static_cast<int>(vars_.size()) - 1;
}

int MipModel::add_con(const std::string& name, Sense sense, double rhs) {
    cons_.push_back({name, {}, sense, rhs});
    return static_cast<int>(cons_.size()) - 1;
}

void MipModel::add_term(int con, int var, double coeff) {
    if (coeff == 0.0) return;
    auto& terms = cons_[con].terms;
    // merge duplicate variables so rows stay canonical
    for (auto& t : terms)
        if (t.var == var) {
            t.coeff += coeff;
            return;
        }
    terms.push_back({var, coeff});
}

int MipModel::var_id(const std::string& name) const {
    auto it = registry_.find(name);
    if (it == registry_.end())
        throw std::invalid_argument("unknown variable '" + name + "' in model " + this->name);
    return it->second;
}

bool MipModel::has_var(const std::string& name) const { return registry_.count(name) > 0; }

EvalResult evaluate_assignment(const MipModel& model, const Assignment& assignment) {
    EvalResult res;
    std::vector<double> x(model.num_vars(), 0.0);
    size_t known = 0;
    for (const auto& [name, v] : assignment.values) {
        if (!model.has_var(name)) {
            res.warnings.push_back("assignment names unknown variable '" + name + "'");
            continue;
        }
        x[model.var_id(name)] = v;
        ++known;
    }
    if (known < static_cast<size_t>(model.num_vars()))
        res.warnings.push_back(std::to_string(model.num_vars() - known) +
                               " variables missing from the assignment, treated as 0");

    for (int i = 0; i < model.num_vars(); ++i) {
        const Variable& v = model.variable(i);
        if (x[i] < v.lower - kFeasTol || x[i] > v.upper + kFeasTol)
            res.bound_violations.push_back(v.name + "=" + std::to_string(x[i]) +
                                           " outside [" + std::to_string(v.lower) + ", " +
                                           std::to_string(v.upper) + "]");
    }
    for (const auto& con : model.constraints()) {
        double lhs = 0.0;
        for (const auto& t : con.terms) lhs += t.coeff * x[t.var];
        double amount = 0.0;
        switch (con.sense) {
            case Sense::LE: amount = lhs - con.rhs; break;
            case Sense::GE: amount = con.rhs - lhs; break;
            case Sense::EQ: amount = std::abs(lhs - con.rhs); break;
        }
        if (amount > kFeasTol)
            res.row_violations.push_back({con.name, lhs, con.sense, con.rhs, amount});
    }
    for (int i = 0; i < model.num_vars(); ++i) res.objective += model.variable(i).obj * x[i];
    res.feasible = res.row_violations.empty() && res.bound_violations.empty();
    return res;
}

double mip_gap(double obj_val, double obj_bound) {
    if (std::abs(obj_val) < 1e-12)
        throw std::domain_error("mip_gap undefined for a zero objective value");
    return 100.0 * std::abs(obj_bound - obj_val) / std::abs(obj_val);
}

}  // namespace elrp::mip
