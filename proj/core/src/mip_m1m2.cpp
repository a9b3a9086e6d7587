#include <algorithm>
#include <sstream>

#include "elrp/mip/builders.hpp"
#include "mip_internal.hpp"

namespace elrp::mip {

namespace {

using detail::NodeExpansion;
using detail::idx;
using detail::kInf;

struct M1Common {
    const Instance& inst;
    NodeExpansion ex;
    MipModel model;

    double t(int i, int j) const { return inst.travel_time(ex.to_orig[i], ex.to_orig[j]); }
    double e(int i, int j) const { return inst.energy(ex.to_orig[i], ex.to_orig[j]); }
    const ChargingFunction& f(int v) const { return inst.function_of(ex.to_orig[v]); }
    double sv(int v) const { return inst.nodes[ex.to_orig[v]].service_time; }
    bool arc_exists(int i, int j) const { return i != j && !ex.same_group(i, j); }

    M1Common(const Instance& i, int beta) : inst(i), ex(i, beta) {}
};

// Everything M1 and M2 share: x/y, degree and flow rows, the piecewise
// charging blocks, station siting and the fleet/station limits.
void build_shared(M1Common& c, bool strengthen) {
    MipModel& m = c.model;
    const int n = c.ex.total();
    const double q_cap = c.inst.battery_capacity();
    const double s_bar = c.inst.max_stations;
    const double r_bar = c.inst.max_routes;

    for (int i = 0; i < n; ++i)
        for (int j = 0; j < n; ++j)
            if (c.arc_exists(i, j))
                m.add_var(idx("x", i, j), VarKind::Binary, 0.0, 1.0, c.t(i, j));
    for (int v : c.ex.station_nodes) m.add_var(idx("y", v), VarKind::Binary, 0.0, 1.0);
    for (int v : c.ex.station_nodes) {
        m.add_var(idx("qp", v), VarKind::Continuous, 0.0, kInf);
        m.add_var(idx("qm", v), VarKind::Continuous, 0.0, kInf);
        m.add_var(idx("s", v), VarKind::Continuous, 0.0, kInf);
        m.add_var(idx("d", v), VarKind::Continuous, 0.0, kInf);
        m.add_var(idx("dlt", v), VarKind::Continuous, 0.0, kInf, 1.0);
        const int b = c.f(v).segments();
        for (int k = 0; k < b; ++k) {
            m.add_var(idx("ap", v, k), VarKind::Continuous, 0.0, 1.0);
            m.add_var(idx("am", v, k), VarKind::Continuous, 0.0, 1.0);
            m.add_var(idx("zp", v, k), VarKind::Binary, 0.0, 1.0);
            m.add_var(idx("zm", v, k), VarKind::Binary, 0.0, 1.0);
        }
    }

    // c2: every customer is left exactly once; c3: copies at most once.
    for (int i : c.ex.customer_nodes) {
        const int row = m.add_con(idx("c2", i), Sense::EQ, 1.0);
        for (int j = 0; j < n; ++j)
            if (c.arc_exists(i, j)) m.add_term(row, m.var_id(idx("x", i, j)), 1.0);
    }
    for (int i : c.ex.station_nodes) {
        const int row = m.add_con(idx("c3", i), Sense::LE, 1.0);
        for (int j = 0; j < n; ++j)
            if (c.arc_exists(i, j)) m.add_term(row, m.var_id(idx("x", i, j)), 1.0);
    }
    // c4: flow conservation.
    for (int i = 0; i < n; ++i) {
        const int row = m.add_con(idx("c4", i), Sense::EQ, 0.0);
        for (int j = 0; j < n; ++j)
            if (c.arc_exists(i, j)) {
                m.add_term(row, m.var_id(idx("x", i, j)), 1.0);
                m.add_term(row, m.var_id(idx("x", j, i)), -1.0);
            }
    }

    // Piecewise charging blocks, c10..c20 per station node.
    for (int v : c.ex.station_nodes) {
        const ChargingFunction& f = c.f(v);
        const int b = f.segments();
        auto block = [&](const char* alpha, const char* z, const char* total_q,
                         const char* time_var, int base) {
            int row = m.add_con(idx("c" + std::to_string(base), v), Sense::EQ, 0.0);
            m.add_term(row, m.var_id(idx(total_q, v)), 1.0);
            for (int k = 0; k < b; ++k)
                m.add_term(row, m.var_id(idx(alpha, v, k)), -f.segment_energy(k));
            for (int k = 0; k + 1 < b; ++k) {
                row = m.add_con(idx("c" + std::to_string(base + 1), v, k), Sense::LE, 0.0);
                m.add_term(row, m.var_id(idx(alpha, v, k + 1)), 1.0);
                m.add_term(row, m.var_id(idx(alpha, v, k)), -1.0);
                row = m.add_con(idx("c" + std::to_string(base + 2), v, k), Sense::LE, 0.0);
                m.add_term(row, m.var_id(idx(z, v, k + 1)), 1.0);
                m.add_term(row, m.var_id(idx(alpha, v, k)), -1.0);
            }
            for (int k = 0; k < b; ++k) {
                row = m.add_con(idx("c" + std::to_string(base + 3), v, k), Sense::LE, 0.0);
                m.add_term(row, m.var_id(idx(alpha, v, k)), 1.0);
                m.add_term(row, m.var_id(idx(z, v, k)), -1.0);
            }
            row = m.add_con(idx("c" + std::to_string(base + 4), v), Sense::EQ, 0.0);
            m.add_term(row, m.var_id(idx(time_var, v)), 1.0);
            for (int k = 0; k < b; ++k)
                m.add_term(row, m.var_id(idx(alpha, v, k)), -f.segment_time(k));
        };
        block("ap", "zp", "qp", "s", 10);
        block("am", "zm", "qm", "d", 15);
        const int row = m.add_con(idx("c20", v), Sense::EQ, 0.0);
        m.add_term(row, m.var_id(idx("dlt", v)), 1.0);
        m.add_term(row, m.var_id(idx("d", v)), -1.0);
        m.add_term(row, m.var_id(idx("s", v)), 1.0);
    }

    // Station siting: c25 charging needs an opened copy, c26 visiting does.
    for (int v : c.ex.station_nodes) {
        int row = m.add_con(idx("c25", v), Sense::LE, 0.0);
        m.add_term(row, m.var_id(idx("qm", v)), 1.0);
        m.add_term(row, m.var_id(idx("qp", v)), -1.0);
        m.add_term(row, m.var_id(idx("y", v)), -q_cap);
        row = m.add_con(idx("c26", v), Sense::LE, 0.0);
        for (int j = 0; j < n; ++j)
            if (c.arc_exists(v, j)) m.add_term(row, m.var_id(idx("x", v, j)), 1.0);
        m.add_term(row, m.var_id(idx("y", v)), -1.0);
    }
    {
        const int row = m.add_con("c27", Sense::LE, s_bar);
        for (const auto& group : c.ex.copy_group) m.add_term(row, m.var_id(idx("y", group[0])), 1.0);
        const int row2 = m.add_con("c28", Sense::LE, r_bar);
        for (int j = 1; j < n; ++j)
            if (c.arc_exists(0, j)) m.add_term(row2, m.var_id(idx("x", 0, j)), 1.0);
    }

    if (strengthen) {
        // c29: copy-ordering symmetry within each station group.
        for (const auto& group : c.ex.copy_group)
            for (size_t g = 0; g + 1 < group.size(); ++g) {
                const int row = m.add_con(idx("c29", group[g], group[g + 1]), Sense::GE, 0.0);
                m.add_term(row, m.var_id(idx("y", group[g])), 1.0);
                m.add_term(row, m.var_id(idx("y", group[g + 1])), -1.0);
            }
        // c37: infeasible customer arcs fixed to zero.
        for (const auto& [i, j] : infeasible_arcs(c.inst)) m.variable(m.var_id(idx("x", i, j))).upper = 0.0;
        // c39: station departure floors (copies share the original's bound).
        const PreprocessReport rep = preprocess(c.inst);
        for (int v : c.ex.station_nodes) {
            const double floor = rep.station_escape.at(c.ex.to_orig[v]);
            const int row = m.add_con(idx("c39", v), Sense::GE, 0.0);
            m.add_term(row, m.var_id(idx("qm", v)), 1.0);
            m.add_term(row, m.var_id(idx("y", v)), -floor);
        }
    }
}

}  // namespace

MipModel build_m1(const Instance& inst, int beta, bool strengthen) {
    if (beta < 0) throw std::invalid_argument("build_m1: beta must be >= 0");
    M1Common c(inst, beta);
    MipModel& m = c.model;
    m.name = "m1-" + inst.name;
    m.formulation = FormulationId::M1;
    m.beta = beta;
    const int n = c.ex.total();
    const double q_cap = inst.battery_capacity();
    const double t_max = inst.ev.max_route_duration;

    build_shared(c, strengthen);
    for (int i = 0; i < n; ++i) {
        m.add_var(idx("tau", i), VarKind::Continuous, 0.0, kInf);
        m.add_var(idx("q", i), VarKind::Continuous, 0.0, kInf);
    }

    // c5/c6: SoC tracking into customers and stations.
    for (int i = 0; i < n; ++i)
        for (int j : c.ex.customer_nodes) {
            if (!c.arc_exists(i, j)) continue;
            const int row = m.add_con(idx("c5", i, j), Sense::LE, q_cap);
            m.add_term(row, m.var_id(idx("q", j)), 1.0);
            m.add_term(row, m.var_id(idx("q", i)), -1.0);
            m.add_term(row, m.var_id(idx("x", i, j)), c.e(i, j) + q_cap);
        }
    for (int i = 0; i < n; ++i)
        for (int j : c.ex.station_nodes) {
            if (!c.arc_exists(i, j)) continue;
            const int row = m.add_con(idx("c6", i, j), Sense::LE, q_cap);
            m.add_term(row, m.var_id(idx("qp", j)), 1.0);
            m.add_term(row, m.var_id(idx("q", i)), -1.0);
            m.add_term(row, m.var_id(idx("x", i, j)), c.e(i, j) + q_cap);
        }
    // c7: enough energy to reach the depot; c8: leave the depot full.
    for (int i = 1; i < n; ++i) {
        const int row = m.add_con(idx("c7", i), Sense::GE, 0.0);
        m.add_term(row, m.var_id(idx("q", i)), 1.0);
        m.add_term(row, m.var_id(idx("x", i, 0)), -c.e(i, 0));
    }
    {
        const int row = m.add_con("c8", Sense::EQ, q_cap);
        m.add_term(row, m.var_id(idx("q", 0)), 1.0);
    }
    // c9: departure SoC at stations equals the post-charge level.
    for (int v : c.ex.station_nodes) {
        const int row = m.add_con(idx("c9", v), Sense::EQ, 0.0);
        m.add_term(row, m.var_id(idx("q", v)), 1.0);
        m.add_term(row, m.var_id(idx("qm", v)), -1.0);
    }
    // c21/c22: departure-time propagation; c23/c24: route deadline.
    for (int i = 0; i < n; ++i)
        for (int j : c.ex.customer_nodes) {
            if (!c.arc_exists(i, j)) continue;
            const int row = m.add_con(idx("c21", i, j), Sense::GE, -t_max);
            m.add_term(row, m.var_id(idx("tau", j)), 1.0);
            m.add_term(row, m.var_id(idx("tau", i)), -1.0);
            m.add_term(row, m.var_id(idx("x", i, j)), -(c.t(i, j) + c.sv(j) + t_max));
        }
    for (int i = 0; i < n; ++i)
        for (int j : c.ex.station_nodes) {
            if (!c.arc_exists(i, j)) continue;
            const int row = m.add_con(idx("c22", i, j), Sense::GE, -t_max);
            m.add_term(row, m.var_id(idx("tau", j)), 1.0);
            m.add_term(row, m.var_id(idx("tau", i)), -1.0);
            m.add_term(row, m.var_id(idx("dlt", j)), -1.0);
            m.add_term(row, m.var_id(idx("x", i, j)), -(c.t(i, j) + t_max));
        }
    for (int j = 1; j < n; ++j) {
        const int row = m.add_con(idx("c23", j), Sense::LE, t_max - c.t(j, 0));
        m.add_term(row, m.var_id(idx("tau", j)), 1.0);
    }
    {
        const int row = m.add_con("c24", Sense::LE, t_max);
        m.add_term(row, m.var_id(idx("tau", 0)), 1.0);
    }
    if (strengthen) {
        // c38: customer SoC floors.
        for (int i : c.ex.customer_nodes) {
            const int row = m.add_con(idx("c38", i), Sense::GE, min_escape_energy(inst, i));
            m.add_term(row, m.var_id(idx("q", i)), 1.0);
        }
    }
    return std::move(c.model);
}

MipModel build_m2(const Instance& inst, int beta, bool strengthen) {
    if (beta < 0) throw std::invalid_argument("build_m2: beta must be >= 0");
    M1Common c(inst, beta);
    MipModel& m = c.model;
    m.name = "m2-" + inst.name;
    m.formulation = FormulationId::M2;
    m.beta = beta;
    const int n = c.ex.total();
    const double q_cap = inst.battery_capacity();
    const double t_max = inst.ev.max_route_duration;

    build_shared(c, strengthen);
    for (int i = 0; i < n; ++i)
        for (int j = 0; j < n; ++j)
            if (c.arc_exists(i, j)) {
                m.add_var(idx("q", i, j), VarKind::Continuous, 0.0, kInf);
                m.add_var(idx("tau", i, j), VarKind::Continuous, 0.0, kInf);
            }
    // Charging time split onto the successor arc of each station copy.
    for (int l : c.ex.station_nodes)
        for (int j = 0; j < n; ++j)
            if (c.arc_exists(l, j)) m.add_var(idx("dar", l, j), VarKind::Continuous, 0.0, kInf);

    // c41: customer SoC balance across arcs.
    for (int i : c.ex.customer_nodes) {
        const int row = m.add_con(idx("c41", i), Sense::EQ, 0.0);
        for (int j = 0; j < n; ++j)
            if (c.arc_exists(i, j)) m.add_term(row, m.var_id(idx("q", i, j)), 1.0);
        for (int l = 0; l < n; ++l)
            if (c.arc_exists(l, i)) {
                m.add_term(row, m.var_id(idx("q", l, i)), -1.0);
                m.add_term(row, m.var_id(idx("x", l, i)), c.e(l, i));
            }
    }
    // c42: station departures carry the post-charge SoC.
    for (int i : c.ex.station_nodes) {
        const int row = m.add_con(idx("c42", i), Sense::EQ, 0.0);
        for (int j = 0; j < n; ++j)
            if (c.arc_exists(i, j)) m.add_term(row, m.var_id(idx("q", i, j)), 1.0);
        m.add_term(row, m.var_id(idx("qm", i)), -1.0);
    }
    // c43: arrival SoC at stations.
    for (int j : c.ex.station_nodes) {
        const int row = m.add_con(idx("c43", j), Sense::EQ, 0.0);
        m.add_term(row, m.var_id(idx("qp", j)), 1.0);
        for (int i = 0; i < n; ++i)
            if (c.arc_exists(i, j)) {
                m.add_term(row, m.var_id(idx("q", i, j)), -1.0);
                m.add_term(row, m.var_id(idx("x", i, j)), c.e(i, j));
            }
    }
    // c44: full battery when leaving the depot; c45: x-link on q.
    for (int j = 1; j < n; ++j) {
        const int row = m.add_con(idx("c44", j), Sense::EQ, 0.0);
        m.add_term(row, m.var_id(idx("q", 0, j)), 1.0);
        m.add_term(row, m.var_id(idx("x", 0, j)), -q_cap);
    }
    for (int i = 0; i < n; ++i)
        for (int j = 0; j < n; ++j)
            if (c.arc_exists(i, j)) {
                const int row = m.add_con(idx("c45", i, j), Sense::LE, 0.0);
                m.add_term(row, m.var_id(idx("q", i, j)), 1.0);
                m.add_term(row, m.var_id(idx("x", i, j)), -q_cap);
            }
    // c46: time zero when leaving the depot.
    for (int j = 1; j < n; ++j) {
        const int row = m.add_con(idx("c46", j), Sense::EQ, 0.0);
        m.add_term(row, m.var_id(idx("tau", 0, j)), 1.0);
    }
    // c47: arrival-time balance; predecessor service and charging ride on
    // the incoming arc (charging via the dar split, c47d/c47x).
    for (int i = 1; i < n; ++i) {
        const int row = m.add_con(idx("c47", i), Sense::EQ, 0.0);
        for (int j = 0; j < n; ++j)
            if (c.arc_exists(i, j)) m.add_term(row, m.var_id(idx("tau", i, j)), 1.0);
        for (int l = 0; l < n; ++l) {
            if (!c.arc_exists(l, i)) continue;
            m.add_term(row, m.var_id(idx("tau", l, i)), -1.0);
            const bool is_cust =
                std::find(c.ex.customer_nodes.begin(), c.ex.customer_nodes.end(), l) !=
                c.ex.customer_nodes.end();
            m.add_term(row, m.var_id(idx("x", l, i)), -(c.t(l, i) + (is_cust ? c.sv(l) : 0.0)));
            if (c.ex.is_station(l, inst)) m.add_term(row, m.var_id(idx("dar", l, i)), -1.0);
        }
    }
    for (int l : c.ex.station_nodes) {
        const int row = m.add_con(idx("c47d", l), Sense::EQ, 0.0);
        for (int j = 0; j < n; ++j)
            if (c.arc_exists(l, j)) m.add_term(row, m.var_id(idx("dar", l, j)), 1.0);
        m.add_term(row, m.var_id(idx("dlt", l)), -1.0);
        const double t_bar = c.f(l).max_charge_duration();
        for (int j = 0; j < n; ++j)
            if (c.arc_exists(l, j)) {
                const int lrow = m.add_con(idx("c47x", l, j), Sense::LE, 0.0);
                m.add_term(lrow, m.var_id(idx("dar", l, j)), 1.0);
                m.add_term(lrow, m.var_id(idx("x", l, j)), -t_bar);
            }
    }
    // c48/c49: route deadline on the final arc; c50: x-link on tau.
    for (int i : c.ex.station_nodes) {
        const int row = m.add_con(idx("c48", i), Sense::LE, t_max);
        m.add_term(row, m.var_id(idx("tau", i, 0)), 1.0);
        m.add_term(row, m.var_id(idx("x", i, 0)), c.t(i, 0));
        m.add_term(row, m.var_id(idx("dlt", i)), 1.0);
    }
    for (int i : c.ex.customer_nodes) {
        const int row = m.add_con(idx("c49", i), Sense::LE, t_max);
        m.add_term(row, m.var_id(idx("tau", i, 0)), 1.0);
        m.add_term(row, m.var_id(idx("x", i, 0)), c.t(i, 0) + c.sv(i));
    }
    for (int i = 0; i < n; ++i)
        for (int j = 0; j < n; ++j)
            if (c.arc_exists(i, j)) {
                const int row = m.add_con(idx("c50", i, j), Sense::LE, 0.0);
                m.add_term(row, m.var_id(idx("tau", i, j)), 1.0);
                m.add_term(row, m.var_id(idx("x", i, j)), -t_max);
            }
    if (strengthen) {
        // c38 in arc form: the summed departure SoC respects the floor.
        for (int i : c.ex.customer_nodes) {
            const int row = m.add_con(idx("c38", i), Sense::GE, min_escape_energy(inst, i));
            for (int j = 0; j < n; ++j)
                if (c.arc_exists(i, j)) m.add_term(row, m.var_id(idx("q", i, j)), 1.0);
        }
    }
    return std::move(c.model);
}

void add_sec_cuts(MipModel& model, const std::vector<SubtourCut>& cuts) {
    int k = 0;
    // count existing c40 rows to keep names unique across repeated calls
    for (const auto& con : model.constraints())
        if (con.name.rfind("c40_", 0) == 0) ++k;
    for (const auto& cut : cuts) {
        const int row = model.add_con(idx("c40", k++), Sense::LE, cut.rhs());
        for (NodeId i : cut.nodes)
            for (NodeId j : cut.nodes) {
                if (i == j) continue;
                const std::string name = idx("x", i, j);
                if (model.has_var(name)) model.add_term(row, model.var_id(name), 1.0);
            }
    }
}

}  // namespace elrp::mip
