#include "elrp/mip/builders.hpp"
#include "mip_internal.hpp"

namespace elrp::mip {

namespace {

using detail::idx;
using detail::kInf;

std::string pkey(int i, int j, int p) {
    return std::to_string(i) + "_" + std::to_string(j) + "_p" + std::to_string(p);
}
std::string mkey(const std::string& key, int m) { return key + "_m" + std::to_string(m); }

// Energy of the arc entering position m of the path (m=0: from the origin).
double arc_energy_into(const Instance& inst, const RechargePath& p, int m) {
    const NodeId from = m == 0 ? p.from : p.stations[m - 1];
    return inst.energy(from, p.stations[m]);
}

}  // namespace

MipModel build_m4(const Instance& inst, const PathSet& paths) {
    MipModel m;
    m.name = "m4-" + inst.name;
    m.formulation = FormulationId::M4;
    m.m4_paths = paths;
    const double q_cap = inst.battery_capacity();
    const double t_max = inst.ev.max_route_duration;

    std::vector<NodeId> co{0};
    for (NodeId c : inst.customers()) co.push_back(c);
    for (NodeId s : inst.stations()) m.add_var(idx("y", s), VarKind::Binary, 0.0, 1.0);

    auto list_of = [&](NodeId i, NodeId j) -> const std::vector<RechargePath>& {
        static const std::vector<RechargePath> empty;
        const auto it = paths.find({i, j});
        return it == paths.end() ? empty : it->second;
    };

    for (NodeId i : co)
        for (NodeId j : co) {
            if (i == j) continue;
            const auto& list = list_of(i, j);
            for (size_t p = 0; p < list.size(); ++p) {
                const auto& path = list[p];
                const std::string key = pkey(i, j, static_cast<int>(p));
                m.add_var("x_" + key, VarKind::Binary, 0.0, 1.0, path.ct);
                m.add_var("tau_" + key, VarKind::Continuous, 0.0, kInf);
                m.add_var("q_" + key, VarKind::Continuous, 0.0, kInf);
                m.add_var("dlt_" + key, VarKind::Continuous, 0.0, kInf, 1.0);
                for (int pos = 0; pos < path.length(); ++pos) {
                    const std::string mk = mkey(key, pos);
                    m.add_var("qp_" + mk, VarKind::Continuous, 0.0, kInf);
                    m.add_var("qm_" + mk, VarKind::Continuous, 0.0, kInf);
                    m.add_var("s_" + mk, VarKind::Continuous, 0.0, kInf);
                    m.add_var("d_" + mk, VarKind::Continuous, 0.0, kInf);
                    const ChargingFunction& f = inst.function_of(path.stations[pos]);
                    for (int k = 0; k < f.segments(); ++k) {
                        const std::string kk = mk + "_k" + std::to_string(k);
                        m.add_var("ap_" + kk, VarKind::Continuous, 0.0, 1.0);
                        m.add_var("am_" + kk, VarKind::Continuous, 0.0, 1.0);
                        m.add_var("zp_" + kk, VarKind::Binary, 0.0, 1.0);
                        m.add_var("zm_" + kk, VarKind::Binary, 0.0, 1.0);
                    }
                }
            }
        }

    auto for_paths = [&](auto&& fn) {
        for (NodeId i : co)
            for (NodeId j : co) {
                if (i == j) continue;
                const auto& list = list_of(i, j);
                for (size_t p = 0; p < list.size(); ++p)
                    fn(i, j, static_cast<int>(p), list[p]);
            }
    };

    // c91: every customer leaves once; c92: flow conservation.
    for (NodeId i : co) {
        if (i == 0) continue;
        const int row = m.add_con(idx("c91", i), Sense::EQ, 1.0);
        for (NodeId j : co)
            if (j != i)
                for (size_t p = 0; p < list_of(i, j).size(); ++p)
                    m.add_term(row, m.var_id("x_" + pkey(i, j, p)), 1.0);
    }
    for (NodeId i : co) {
        const int row = m.add_con(idx("c92", i), Sense::EQ, 0.0);
        for (NodeId j : co) {
            if (j == i) continue;
            for (size_t p = 0; p < list_of(i, j).size(); ++p)
                m.add_term(row, m.var_id("x_" + pkey(i, j, p)), 1.0);
            for (size_t p = 0; p < list_of(j, i).size(); ++p)
                m.add_term(row, m.var_id("x_" + pkey(j, i, p)), -1.0);
        }
    }
    for_paths([&](NodeId i, NodeId j, int p, const RechargePath& path) {
        const std::string key = pkey(i, j, p);
        // c93/c94/c95: initial SoC and arrival at the first station.
        if (i == 0) {
            const int row = m.add_con("c93_" + key, Sense::EQ, 0.0);
            m.add_term(row, m.var_id("q_" + key), 1.0);
            m.add_term(row, m.var_id("x_" + key), -q_cap);
            if (path.length() >= 1) {
                const int row2 = m.add_con("c94_" + key, Sense::EQ, 0.0);
                m.add_term(row2, m.var_id("qp_" + mkey(key, 0)), 1.0);
                m.add_term(row2, m.var_id("x_" + key), -q_cap + path.cf);
            }
        } else if (path.length() >= 1) {
            const int row = m.add_con("c95_" + key, Sense::EQ, 0.0);
            m.add_term(row, m.var_id("qp_" + mkey(key, 0)), 1.0);
            m.add_term(row, m.var_id("q_" + key), -1.0);
            m.add_term(row, m.var_id("x_" + key), path.cf);
        }
        // c96: SoC coupling between consecutive stations on the path.
        for (int pos = 1; pos < path.length(); ++pos) {
            const int row = m.add_con("c96_" + mkey(key, pos), Sense::EQ, 0.0);
            m.add_term(row, m.var_id("qp_" + mkey(key, pos)), 1.0);
            m.add_term(row, m.var_id("qm_" + mkey(key, pos - 1)), -1.0);
            m.add_term(row, m.var_id("x_" + key), arc_energy_into(inst, path, pos));
        }
        // c98/c99/c100: x-links.
        {
            int row = m.add_con("c98_" + key, Sense::LE, 0.0);
            m.add_term(row, m.var_id("q_" + key), 1.0);
            m.add_term(row, m.var_id("x_" + key), -q_cap);
            for (int pos = 0; pos < path.length(); ++pos) {
                row = m.add_con("c99_" + mkey(key, pos), Sense::LE, 0.0);
                m.add_term(row, m.var_id("qp_" + mkey(key, pos)), 1.0);
                m.add_term(row, m.var_id("x_" + key), -q_cap);
            }
            if (path.length() >= 1) {
                double t_bar = 0.0;
                for (NodeId s : path.stations)
                    t_bar += inst.function_of(s).max_charge_duration();
                row = m.add_con("c100_" + key, Sense::LE, 0.0);
                m.add_term(row, m.var_id("dlt_" + key), 1.0);
                m.add_term(row, m.var_id("x_" + key), -t_bar);
            }
        }
        // c102: all stations on a used path must be opened.
        for (NodeId h : path.stations) {
            const int row = m.add_con("c102_" + key + "_h" + std::to_string(h), Sense::LE, 0.0);
            m.add_term(row, m.var_id("q_" + key), 1.0);
            m.add_term(row, m.var_id(idx("y", h)), -q_cap);
        }
        // c103..c112 charging blocks per position, c113 total charge time.
        for (int pos = 0; pos < path.length(); ++pos) {
            const std::string mk = mkey(key, pos);
            const ChargingFunction& f = inst.function_of(path.stations[pos]);
            const int b = f.segments();
            auto seg = [&](int k) { return mk + "_k" + std::to_string(k); };
            auto block = [&](const char* alpha, const char* z, const char* total_q,
                             const char* time_var, int base) {
                int row = m.add_con("c" + std::to_string(base) + "_" + mk, Sense::EQ, 0.0);
                m.add_term(row, m.var_id(std::string(total_q) + "_" + mk), 1.0);
                for (int k = 0; k < b; ++k)
                    m.add_term(row, m.var_id(std::string(alpha) + "_" + seg(k)),
                               -f.segment_energy(k));
                for (int k = 0; k + 1 < b; ++k) {
                    row = m.add_con("c" + std::to_string(base + 1) + "_" + seg(k), Sense::LE,
                                    0.0);
                    m.add_term(row, m.var_id(std::string(alpha) + "_" + seg(k + 1)), 1.0);
                    m.add_term(row, m.var_id(std::string(alpha) + "_" + seg(k)), -1.0);
                    row = m.add_con("c" + std::to_string(base + 2) + "_" + seg(k), Sense::LE,
                                    0.0);
                    m.add_term(row, m.var_id(std::string(z) + "_" + seg(k + 1)), 1.0);
                    m.add_term(row, m.var_id(std::string(alpha) + "_" + seg(k)), -1.0);
                }
                for (int k = 0; k < b; ++k) {
                    row = m.add_con("c" + std::to_string(base + 3) + "_" + seg(k), Sense::LE,
                                    0.0);
                    m.add_term(row, m.var_id(std::string(alpha) + "_" + seg(k)), 1.0);
                    m.add_term(row, m.var_id(std::string(z) + "_" + seg(k)), -1.0);
                }
                row = m.add_con("c" + std::to_string(base + 4) + "_" + mk, Sense::EQ, 0.0);
                m.add_term(row, m.var_id(std::string(time_var) + "_" + mk), 1.0);
                for (int k = 0; k < b; ++k)
                    m.add_term(row, m.var_id(std::string(alpha) + "_" + seg(k)),
                               -f.segment_time(k));
            };
            block("ap", "zp", "qp", "s", 103);
            block("am", "zm", "qm", "d", 108);
        }
        {
            const int row = m.add_con("c113_" + key, Sense::EQ, 0.0);
            m.add_term(row, m.var_id("dlt_" + key), 1.0);
            for (int pos = 0; pos < path.length(); ++pos) {
                m.add_term(row, m.var_id("d_" + mkey(key, pos)), -1.0);
                m.add_term(row, m.var_id("s_" + mkey(key, pos)), 1.0);
            }
        }
        // c114/c116/c117: time links.
        if (i == 0) {
            const int row = m.add_con("c114_" + key, Sense::EQ, 0.0);
            m.add_term(row, m.var_id("tau_" + key), 1.0);
        }
        {
            const int row = m.add_con("c116_" + key, Sense::LE, 0.0);
            m.add_term(row, m.var_id("tau_" + key), 1.0);
            m.add_term(row, m.var_id("x_" + key), -t_max);
        }
        if (j == 0 && i != 0) {
            const int row = m.add_con("c117_" + key, Sense::LE, 0.0);
            m.add_term(row, m.var_id("tau_" + key), 1.0);
            m.add_term(row, m.var_id("dlt_" + key), 1.0);
            m.add_term(row, m.var_id("x_" + key), path.ct - t_max);
        }
        // c118: opening coupling on x.
        for (NodeId h : path.stations) {
            const int row = m.add_con("c118_" + key + "_h" + std::to_string(h), Sense::LE, 0.0);
            m.add_term(row, m.var_id("x_" + key), 1.0);
            m.add_term(row, m.var_id(idx("y", h)), -1.0);
        }
    });
    // c97: customer SoC balance; c101: energy sufficiency home.
    for (NodeId i : co) {
        if (i == 0) continue;
        const int row = m.add_con(idx("c97", i), Sense::EQ, 0.0);
        for (NodeId g : co)
            if (g != i)
                for (size_t p = 0; p < list_of(i, g).size(); ++p)
                    m.add_term(row, m.var_id("q_" + pkey(i, g, p)), 1.0);
        for (NodeId j : co) {
            if (j == i) continue;
            const auto& list = list_of(j, i);
            for (size_t p = 0; p < list.size(); ++p) {
                const std::string key = pkey(j, i, p);
                m.add_term(row, m.var_id("q_" + key), -1.0);
                m.add_term(row, m.var_id("x_" + key), list[p].ce);
                for (int pos = 0; pos < list[p].length(); ++pos) {
                    m.add_term(row, m.var_id("qm_" + mkey(key, pos)), -1.0);
                    m.add_term(row, m.var_id("qp_" + mkey(key, pos)), 1.0);
                }
            }
        }
        const auto& home = list_of(i, 0);
        for (size_t p = 0; p < home.size(); ++p) {
            const std::string key = pkey(i, 0, p);
            const int hrow = m.add_con("c101_" + key, Sense::GE, 0.0);
            m.add_term(hrow, m.var_id("q_" + key), 1.0);
            m.add_term(hrow, m.var_id("x_" + key), -home[p].ce);
            for (int pos = 0; pos < home[p].length(); ++pos) {
                m.add_term(hrow, m.var_id("qm_" + mkey(key, pos)), 1.0);
                m.add_term(hrow, m.var_id("qp_" + mkey(key, pos)), -1.0);
            }
        }
    }
    // c115: departure-time balance at customers.
    for (NodeId i : co) {
        if (i == 0) continue;
        const int row = m.add_con(idx("c115", i), Sense::EQ, inst.nodes[i].service_time);
        for (NodeId g : co)
            if (g != i)
                for (size_t p = 0; p < list_of(i, g).size(); ++p)
                    m.add_term(row, m.var_id("tau_" + pkey(i, g, p)), 1.0);
        for (NodeId j : co) {
            if (j == i) continue;
            const auto& list = list_of(j, i);
            for (size_t p = 0; p < list.size(); ++p) {
                const std::string key = pkey(j, i, p);
                m.add_term(row, m.var_id("tau_" + key), -1.0);
                m.add_term(row, m.var_id("x_" + key), -list[p].ct);
                m.add_term(row, m.var_id("dlt_" + key), -1.0);
            }
        }
    }
    {
        const int row = m.add_con("c119", Sense::LE, inst.max_stations);
        for (NodeId s : inst.stations()) m.add_term(row, m.var_id(idx("y", s)), 1.0);
        const int row2 = m.add_con("c120", Sense::LE, inst.max_routes);
        for (NodeId j : co)
            if (j != 0)
                for (size_t p = 0; p < list_of(0, j).size(); ++p)
                    m.add_term(row2, m.var_id("x_" + pkey(0, j, p)), 1.0);
    }
    return m;
}

MipModel build_linear_variant(FormulationId f, const Instance& inst, int beta, bool strengthen,
                              const PathSet* paths) {
    const Instance lin = with_linearized_charging(inst);
    switch (f) {
        case FormulationId::M1: return build_m1(lin, beta, strengthen);
        case FormulationId::M2: return build_m2(lin, beta, strengthen);
        case FormulationId::M3: return build_m3(lin);
        case FormulationId::M4: {
            if (paths) return build_m4(lin, *paths);
            return build_m4(lin, enumerate_paths(lin, lin.max_stations));
        }
    }
    throw std::invalid_argument("build_linear_variant: bad formulation");
}

}  // namespace elrp::mip
