#include <cctype>
#include <cmath>
#include <cstdio>
#include <limits>
#include <map>
#include <sstream>
#include <stdexcept>

#include "elrp/mip/model.hpp"

namespace elrp::mip {

namespace {

constexpr size_t kMaxName = 255;

std::string num(double v) {
    char buf[40];
    std::snprintf(buf, sizeof(buf), "%.12g", v);
    return buf;
}

// Stable mangling for over-long names: prefix + fnv1a hash suffix.
std::string mangle(const std::string& name) {
    if (name.size() <= kMaxName) return name;
    uint64_t h = 1469598103934665603ull;
    for (unsigned char c : name) {
        h ^= c;
        h *= 1099511628211ull;
    }
    char suffix[24];
    std::snprintf(suffix, sizeof(suffix), "~%016llx", static_cast<unsigned long long>(h));
    return name.substr(0, kMaxName - 17) + suffix;
}

struct Names {
    std::vector<std::string> vars;
    std::vector<std::string> cons;
};

Names mangled_names(const MipModel& model) {
    Names out;
    std::map<std::string, int> seen;
    auto take = [&](const std::string& raw) {
        std::string m = mangle(raw);
        if (!seen.emplace(m, 1).second)
            throw std::runtime_error("export: name collision after mangling on '" + m + "'");
        return m;
    };
    for (const auto& v : model.variables()) out.vars.push_back(take(v.name));
    for (const auto& c : model.constraints()) out.cons.push_back(take(c.name));
    return out;
}

void pad(std::ostringstream& os, const std::string& s, size_t width) {
    os << s;
    for (size_t i = s.size(); i < width; ++i) os << ' ';
}

}  // namespace

std::string export_mps(const MipModel& model) {
    const Names names = mangled_names(model);
    std::ostringstream os;
    os << "NAME          " << (model.name.empty() ? "ELRP" : model.name) << "\n";
    os << "ROWS\n";
    os << " N  OBJ\n";
    for (int c = 0; c < model.num_cons(); ++c) {
        const auto& con = model.constraints()[c];
        const char t = con.sense == Sense::LE ? 'L' : (con.sense == Sense::GE ? 'G' : 'E');
        os << " " << t << "  " << names.cons[c] << "\n";
    }
    os << "COLUMNS\n";
    // column-major terms
    std::vector<std::vector<std::pair<int, double>>> cols(model.num_vars());
    for (int c = 0; c < model.num_cons(); ++c)
        for (const auto& t : model.constraints()[c].terms) cols[t.var].push_back({c, t.coeff});
    bool in_int = false;
    int marker = 0;
    for (int v = 0; v < model.num_vars(); ++v) {
        const Variable& var = model.variable(v);
        const bool want_int = var.kind == VarKind::Binary;
        if (want_int != in_int) {
            os << "    MARKER" << marker++ << "    'MARKER'                 '"
               << (want_int ? "INTORG" : "INTEND") << "'\n";
            in_int = want_int;
        }
        auto entry = [&](const std::string& row, double coeff) {
            std::ostringstream line;
            line << "    ";
            pad(line, names.vars[v], 10);
            line << ' ';
            pad(line, row, 10);
            line << ' ' << num(coeff);
            os << line.str() << "\n";
        };
        if (var.obj != 0.0) entry("OBJ", var.obj);
        for (const auto& [c, coeff] : cols[v]) entry(names.cons[c], coeff);
        if (var.obj == 0.0 && cols[v].empty()) entry("OBJ", 0.0);  // keep the column declared
    }
    if (in_int) os << "    MARKER" << marker++ << "    'MARKER'                 'INTEND'\n";
    os << "RHS\n";
    for (int c = 0; c < model.num_cons(); ++c) {
        const auto& con = model.constraints()[c];
        if (con.rhs == 0.0) continue;
        std::ostringstream line;
        line << "    ";
        pad(line, "RHS", 10);
        line << ' ';
        pad(line, names.cons[c], 10);
        line << ' ' << num(con.rhs);
        os << line.str() << "\n";
    }
    os << "BOUNDS\n";
    for (int v = 0; v < model.num_vars(); ++v) {
        const Variable& var = model.variable(v);
        if (var.kind == VarKind::Binary) {
            os << " BV BND       " << names.vars[v] << "\n";
            continue;
        }
        if (var.lower == var.upper) {
            os << " FX BND       " << names.vars[v] << " " << num(var.lower) << "\n";
            continue;
        }
        if (var.lower != 0.0) {
            if (std::isinf(var.lower))
                os << " MI BND       " << names.vars[v] << "\n";
            else
                os << " LO BND       " << names.vars[v] << " " << num(var.lower) << "\n";
        }
        if (std::isinf(var.upper))
            os << " PL BND       " << names.vars[v] << "\n";
        else
            os << " UP BND       " << names.vars[v] << " " << num(var.upper) << "\n";
    }
    os << "ENDATA\n";
    return os.str();
}

std::string export_lp(const MipModel& model) {
    const Names names = mangled_names(model);
    std::ostringstream os;
    os << "\\ " << (model.name.empty() ? "ELRP" : model.name) << "\n";
    os << "Minimize\n obj:";
    {
        bool first = true;
        for (int v = 0; v < model.num_vars(); ++v) {
            const double c = model.variable(v).obj;
            if (c == 0.0) continue;
            os << (first ? " " : (c >= 0 ? " + " : " ")) << num(c) << " " << names.vars[v];
            first = false;
        }
        if (first) os << " 0 " << names.vars[0];
    }
    os << "\nSubject To\n";
    for (int c = 0; c < model.num_cons(); ++c) {
        const auto& con = model.constraints()[c];
        os << " " << names.cons[c] << ":";
        bool first = true;
        for (const auto& t : con.terms) {
            os << (first ? " " : (t.coeff >= 0 ? " + " : " ")) << num(t.coeff) << " "
               << names.vars[t.var];
            first = false;
        }
        if (first) os << " 0 " << names.vars[0];
        os << (con.sense == Sense::LE ? " <= " : con.sense == Sense::GE ? " >= " : " = ")
           << num(con.rhs) << "\n";
    }
    os << "Bounds\n";
    for (int v = 0; v < model.num_vars(); ++v) {
        const Variable& var = model.variable(v);
        if (var.kind == VarKind::Binary) continue;
        if (var.lower == var.upper) {
            os << " " << names.vars[v] << " = " << num(var.lower) << "\n";
        } else {
            os << " " << (std::isinf(var.lower) ? std::string("-inf") : num(var.lower)) << " <= "
               << names.vars[v] << " <= "
               << (std::isinf(var.upper) ? std::string("+inf") : num(var.upper)) << "\n";
        }
    }
    os << "Binary\n";
    for (int v = 0; v < model.num_vars(); ++v)
        if (model.variable(v).kind == VarKind::Binary) os << " " << names.vars[v] << "\n";
    os << "End\n";
    return os.str();
}

MipModel read_mps(const std::string& text) {
    MipModel model;
    std::istringstream in(text);
    std::string line;
    enum { None, Rows, Columns, Rhs, Bounds } section = None;
    std::map<std::string, std::pair<Sense, bool>> row_kind;  // name -> (sense, is_obj)
    std::map<std::string, int> con_ids;
    std::map<std::string, int> var_ids;
    std::map<int, bool> bounded_lower, bounded_upper;
    bool in_int = false;
    const double inf = std::numeric_limits<double>::infinity();

    auto ensure_var = [&](const std::string& name) {
        auto it = var_ids.find(name);
        if (it != var_ids.end()) return it->second;
        const int id = model.add_var(name, in_int ? VarKind::Binary : VarKind::Continuous, 0.0,
                                     in_int ? 1.0 : inf);
        var_ids[name] = id;
        return id;
    };

    while (std::getline(in, line)) {
        if (line.empty() || line[0] == '*') continue;
        std::istringstream ls(line);
        if (!std::isspace(static_cast<unsigned char>(line[0]))) {
            std::string word;
            ls >> word;
            if (word == "NAME") {
                ls >> model.name;
                section = None;
            } else if (word == "ROWS") {
                section = Rows;
            } else if (word == "COLUMNS") {
                section = Columns;
            } else if (word == "RHS") {
                section = Rhs;
            } else if (word == "BOUNDS") {
                section = Bounds;
            } else if (word == "RANGES") {
                throw std::runtime_error("read_mps: RANGES section not supported");
            } else if (word == "ENDATA") {
                break;
            } else {
                throw std::runtime_error("read_mps: unknown section '" + word + "'");
            }
            continue;
        }
        switch (section) {
            case Rows: {
                std::string type, name;
                ls >> type >> name;
                if (type == "N") {
                    row_kind[name] = {Sense::LE, true};
                } else {
                    const Sense s = type == "L" ? Sense::LE : type == "G" ? Sense::GE : Sense::EQ;
                    row_kind[name] = {s, false};
                    con_ids[name] = model.add_con(name, s, 0.0);
                }
                break;
            }
            case Columns: {
                std::string a, b;
                ls >> a >> b;
                if (b == "'MARKER'") {
                    std::string kind;
                    ls >> kind;
                    in_int = kind == "'INTORG'";
                    break;
                }
                const int v = ensure_var(a);
                std::string row = b;
                double coeff;
                while (ls >> coeff) {
                    auto rk = row_kind.find(row);
                    if (rk == row_kind.end())
                        throw std::runtime_error("read_mps: unknown row '" + row + "'");
                    if (rk->second.second) {
                        if (coeff != 0.0) model.variable(v).obj += coeff;
                    } else {
                        model.add_term(con_ids[row], v, coeff);
                    }
                    if (!(ls >> row)) break;
                }
                break;
            }
            case Rhs: {
                std::string set, row;
                double value;
                ls >> set >> row;
                while (ls >> value) {
                    auto it = con_ids.find(row);
                    if (it == con_ids.end())
                        throw std::runtime_error("read_mps: RHS for unknown row '" + row + "'");
                    model.constraint(it->second).rhs = value;
                    if (!(ls >> row)) break;
                }
                break;
            }
            case Bounds: {
                std::string type, set, name;
                ls >> type >> set >> name;
                const int v = ensure_var(name);
                Variable& var = model.variable(v);
                double value = 0.0;
                if (type == "BV") {
                    var.kind = VarKind::Binary;
                    var.lower = 0.0;
                    var.upper = 1.0;
                } else if (type == "MI") {
                    var.lower = -inf;
                } else if (type == "PL") {
                    var.upper = inf;
                } else {
                    if (!(ls >> value))
                        throw std::runtime_error("read_mps: bound needs a value: " + line);
                    if (type == "UP") var.upper = value;
                    else if (type == "LO") var.lower = value;
                    else if (type == "FX") var.lower = var.upper = value;
                    else throw std::runtime_error("read_mps: bound type '" + type + "'");
                }
                break;
            }
            default:
                throw std::runtime_error("read_mps: data outside any section: " + line);
        }
    }
    return model;
}

}  // namespace elrp::mip
