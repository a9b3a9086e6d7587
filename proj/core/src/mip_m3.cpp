#include "elrp/mip/builders.hpp"
#include "mip_internal.hpp"

namespace elrp::mip {

namespace {

using detail::idx;
using detail::kInf;

// Hop token: station id digits, or "d" for the no-detour hop.
std::string hop(int i, const std::string& h, int j) {
    return std::to_string(i) + "_" + h + "_" + std::to_string(j);
}

}  // namespace

MipModel build_m3(const Instance& inst) {
    MipModel m;
    m.name = "m3-" + inst.name;
    m.formulation = FormulationId::M3;
    const double q_cap = inst.battery_capacity();
    const double t_max = inst.ev.max_route_duration;

    std::vector<NodeId> co{0};
    for (NodeId c : inst.customers()) co.push_back(c);
    const auto stations = inst.stations();
    std::vector<std::string> hops;  // station tokens plus the dummy
    for (NodeId s : stations) hops.push_back(std::to_string(s));
    hops.push_back("d");
    auto is_dummy = [](const std::string& h) { return h == "d"; };
    auto station_of = [&](const std::string& h) { return static_cast<NodeId>(std::stoi(h)); };

    for (NodeId h : stations) m.add_var(idx("y", h), VarKind::Binary, 0.0, 1.0);
    for (NodeId i : co)
        for (NodeId j : co) {
            if (i == j) continue;
            for (const auto& h : hops) {
                const std::string key = hop(i, h, j);
                double travel = is_dummy(h) ? inst.travel_time(i, j)
                                            : inst.travel_time(i, station_of(h)) +
                                                  inst.travel_time(station_of(h), j);
                m.add_var("x_" + key, VarKind::Binary, 0.0, 1.0, travel);
                m.add_var("tau_" + key, VarKind::Continuous, 0.0, kInf);
                m.add_var("q_" + key, VarKind::Continuous, 0.0, kInf);
                if (!is_dummy(h)) {
                    const ChargingFunction& f = inst.function_of(station_of(h));
                    m.add_var("qp_" + key, VarKind::Continuous, 0.0, kInf);
                    m.add_var("qm_" + key, VarKind::Continuous, 0.0, kInf);
                    m.add_var("s_" + key, VarKind::Continuous, 0.0, kInf);
                    m.add_var("d_" + key, VarKind::Continuous, 0.0, kInf);
                    m.add_var("dlt_" + key, VarKind::Continuous, 0.0, kInf, 1.0);
                    for (int k = 0; k < f.segments(); ++k) {
                        const std::string kk = key + "_" + std::to_string(k);
                        m.add_var("ap_" + kk, VarKind::Continuous, 0.0, 1.0);
                        m.add_var("am_" + kk, VarKind::Continuous, 0.0, 1.0);
                        m.add_var("zp_" + kk, VarKind::Binary, 0.0, 1.0);
                        m.add_var("zm_" + kk, VarKind::Binary, 0.0, 1.0);
                    }
                }
            }
        }

    auto for_arcs = [&](auto&& fn) {
        for (NodeId i : co)
            for (NodeId j : co) {
                if (i == j) continue;
                for (const auto& h : hops) fn(i, h, j);
            }
    };

    // c53: each customer leaves once; c54: flow conservation.
    for (NodeId i : co) {
        if (i == 0) continue;
        const int row = m.add_con(idx("c53", i), Sense::EQ, 1.0);
        for (NodeId j : co)
            if (j != i)
                for (const auto& h : hops) m.add_term(row, m.var_id("x_" + hop(i, h, j)), 1.0);
    }
    for (NodeId i : co) {
        const int row = m.add_con(idx("c54", i), Sense::EQ, 0.0);
        for (NodeId j : co) {
            if (j == i) continue;
            for (const auto& h : hops) {
                m.add_term(row, m.var_id("x_" + hop(i, h, j)), 1.0);
                m.add_term(row, m.var_id("x_" + hop(j, h, i)), -1.0);
            }
        }
    }
    // c55: leave the depot full; c56/c57: arrival SoC at the hop station.
    for (NodeId j : co) {
        if (j == 0) continue;
        for (const auto& h : hops) {
            const std::string key = hop(0, h, j);
            const int row = m.add_con("c55_" + key, Sense::EQ, 0.0);
            m.add_term(row, m.var_id("q_" + key), 1.0);
            m.add_term(row, m.var_id("x_" + key), -q_cap);
            if (!is_dummy(h)) {
                const int row2 = m.add_con("c56_" + key, Sense::EQ, 0.0);
                m.add_term(row2, m.var_id("qp_" + key), 1.0);
                m.add_term(row2, m.var_id("x_" + key),
                           -q_cap + inst.energy(0, station_of(h)));
            }
        }
    }
    for (NodeId i : co) {
        if (i == 0) continue;
        for (NodeId j : co) {
            if (j == i || j == 0) continue;
            for (const auto& h : hops) {
                if (is_dummy(h)) continue;
                const std::string key = hop(i, h, j);
                const int row = m.add_con("c57_" + key, Sense::EQ, 0.0);
                m.add_term(row, m.var_id("qp_" + key), 1.0);
                m.add_term(row, m.var_id("q_" + key), -1.0);
                m.add_term(row, m.var_id("x_" + key), inst.energy(i, station_of(h)));
            }
        }
    }
    // c58/c59: x-links on SoC; c60: charging-time big-M per station hop.
    for_arcs([&](NodeId i, const std::string& h, NodeId j) {
        const std::string key = hop(i, h, j);
        if (!is_dummy(h)) {
            int row = m.add_con("c58_" + key, Sense::LE, 0.0);
            m.add_term(row, m.var_id("qp_" + key), 1.0);
            m.add_term(row, m.var_id("x_" + key), -q_cap);
            row = m.add_con("c60_" + key, Sense::LE, 0.0);
            m.add_term(row, m.var_id("dlt_" + key), 1.0);
            m.add_term(row, m.var_id("x_" + key),
                       -inst.function_of(station_of(h)).max_charge_duration());
        } else {
            const int row = m.add_con("c59_" + key, Sense::LE, 0.0);
            m.add_term(row, m.var_id("q_" + key), 1.0);
            m.add_term(row, m.var_id("x_" + key), -q_cap);
        }
    });
    // c61: customer SoC balance.
    for (NodeId i : co) {
        if (i == 0) continue;
        const int row = m.add_con(idx("c61", i), Sense::EQ, 0.0);
        for (NodeId l : co)
            if (l != i)
                for (const auto& h : hops) m.add_term(row, m.var_id("q_" + hop(i, h, l)), 1.0);
        for (NodeId j : co) {
            if (j == i) continue;
            for (const auto& h : hops) {
                const std::string key = hop(j, h, i);
                m.add_term(row, m.var_id("q_" + key), -1.0);
                if (is_dummy(h)) {
                    m.add_term(row, m.var_id("x_" + key), inst.energy(j, i));
                } else {
                    const NodeId s = station_of(h);
                    m.add_term(row, m.var_id("x_" + key),
                               inst.energy(j, s) + inst.energy(s, i));
                    m.add_term(row, m.var_id("qm_" + key), -1.0);
                    m.add_term(row, m.var_id("qp_" + key), 1.0);
                }
            }
        }
    }
    // c62/c63: energy sufficiency on the way home.
    for (NodeId i : co) {
        if (i == 0) continue;
        for (const auto& h : hops) {
            const std::string key = hop(i, h, 0);
            if (!is_dummy(h)) {
                const NodeId s = station_of(h);
                const int row = m.add_con("c62_" + key, Sense::GE, 0.0);
                m.add_term(row, m.var_id("q_" + key), 1.0);
                m.add_term(row, m.var_id("x_" + key),
                           -(inst.energy(i, s) + inst.energy(s, 0)));
                m.add_term(row, m.var_id("qm_" + key), 1.0);
                m.add_term(row, m.var_id("qp_" + key), -1.0);
            } else {
                const int row = m.add_con("c63_" + key, Sense::GE, 0.0);
                m.add_term(row, m.var_id("q_" + key), 1.0);
                m.add_term(row, m.var_id("x_" + key), -inst.energy(i, 0));
            }
        }
    }
    // c64: SoC can flow through an opened station only.
    for_arcs([&](NodeId i, const std::string& h, NodeId j) {
        if (is_dummy(h)) return;
        const std::string key = hop(i, h, j);
        const int row = m.add_con("c64_" + key, Sense::LE, 0.0);
        m.add_term(row, m.var_id("q_" + key), 1.0);
        m.add_term(row, m.var_id(idx("y", station_of(h))), -q_cap);
    });
    // c65..c75: piecewise charging blocks per station hop.
    for_arcs([&](NodeId i, const std::string& h, NodeId j) {
        if (is_dummy(h)) return;
        const std::string key = hop(i, h, j);
        const ChargingFunction& f = inst.function_of(station_of(h));
        const int b = f.segments();
        auto seg = [&](int k) { return key + "_" + std::to_string(k); };
        auto block = [&](const char* alpha, const char* z, const char* total_q,
                         const char* time_var, int base) {
            int row = m.add_con("c" + std::to_string(base) + "_" + key, Sense::EQ, 0.0);
            m.add_term(row, m.var_id(std::string(total_q) + "_" + key), 1.0);
            for (int k = 0; k < b; ++k)
                m.add_term(row, m.var_id(std::string(alpha) + "_" + seg(k)),
                           -f.segment_energy(k));
            for (int k = 0; k + 1 < b; ++k) {
                row = m.add_con("c" + std::to_string(base + 1) + "_" + seg(k), Sense::LE, 0.0);
                m.add_term(row, m.var_id(std::string(alpha) + "_" + seg(k + 1)), 1.0);
                m.add_term(row, m.var_id(std::string(alpha) + "_" + seg(k)), -1.0);
                row = m.add_con("c" + std::to_string(base + 2) + "_" + seg(k), Sense::LE, 0.0);
                m.add_term(row, m.var_id(std::string(z) + "_" + seg(k + 1)), 1.0);
                m.add_term(row, m.var_id(std::string(alpha) + "_" + seg(k)), -1.0);
            }
            for (int k = 0; k < b; ++k) {
                row = m.add_con("c" + std::to_string(base + 3) + "_" + seg(k), Sense::LE, 0.0);
                m.add_term(row, m.var_id(std::string(alpha) + "_" + seg(k)), 1.0);
                m.add_term(row, m.var_id(std::string(z) + "_" + seg(k)), -1.0);
            }
            row = m.add_con("c" + std::to_string(base + 4) + "_" + key, Sense::EQ, 0.0);
            m.add_term(row, m.var_id(std::string(time_var) + "_" + key), 1.0);
            for (int k = 0; k < b; ++k)
                m.add_term(row, m.var_id(std::string(alpha) + "_" + seg(k)),
                           -f.segment_time(k));
        };
        block("ap", "zp", "qp", "s", 65);
        block("am", "zm", "qm", "d", 70);
        const int row = m.add_con("c75_" + key, Sense::EQ, 0.0);
        m.add_term(row, m.var_id("dlt_" + key), 1.0);
        m.add_term(row, m.var_id("d_" + key), -1.0);
        m.add_term(row, m.var_id("s_" + key), 1.0);
        // x-link cleanup: unused hops carry no alpha/z mass.
        for (int k = 0; k < b; ++k) {
            for (const char* v : {"ap", "am"}) {
                const int lrow = m.add_con(std::string("xl") + v + "_" + seg(k), Sense::LE, 0.0);
                m.add_term(lrow, m.var_id(std::string(v) + "_" + seg(k)), 1.0);
                m.add_term(lrow, m.var_id("x_" + key), -1.0);
            }
            for (const char* v : {"zp", "zm"}) {
                const int lrow = m.add_con(std::string("xl") + v + "_" + seg(k), Sense::LE, 0.0);
                m.add_term(lrow, m.var_id(std::string(v) + "_" + seg(k)), 1.0);
                m.add_term(lrow, m.var_id("x_" + key), -1.0);
            }
        }
    });
    // c76: departure-time balance at customers.
    for (NodeId i : co) {
        if (i == 0) continue;
        const int row = m.add_con(idx("c76", i), Sense::EQ, inst.nodes[i].service_time);
        for (NodeId l : co)
            if (l != i)
                for (const auto& h : hops) m.add_term(row, m.var_id("tau_" + hop(i, h, l)), 1.0);
        for (NodeId j : co) {
            if (j == i) continue;
            for (const auto& h : hops) {
                const std::string key = hop(j, h, i);
                m.add_term(row, m.var_id("tau_" + key), -1.0);
                if (is_dummy(h)) {
                    m.add_term(row, m.var_id("x_" + key), -inst.travel_time(j, i));
                } else {
                    const NodeId s = station_of(h);
                    m.add_term(row, m.var_id("dlt_" + key), -1.0);
                    m.add_term(row, m.var_id("x_" + key),
                               -(inst.travel_time(j, s) + inst.travel_time(s, i)));
                }
            }
        }
    }
    // c77: x-link on tau; c78/c79: route deadline.
    for_arcs([&](NodeId i, const std::string& h, NodeId j) {
        const std::string key = hop(i, h, j);
        const int row = m.add_con("c77_" + key, Sense::LE, 0.0);
        m.add_term(row, m.var_id("tau_" + key), 1.0);
        m.add_term(row, m.var_id("x_" + key), -t_max);
    });
    for (NodeId i : co) {
        if (i == 0) continue;
        for (const auto& h : hops) {
            const std::string key = hop(i, h, 0);
            if (!is_dummy(h)) {
                const NodeId s = station_of(h);
                const int row = m.add_con("c78_" + key, Sense::LE, 0.0);
                m.add_term(row, m.var_id("tau_" + key), 1.0);
                m.add_term(row, m.var_id("dlt_" + key), 1.0);
                m.add_term(row, m.var_id("x_" + key),
                           -(t_max - inst.travel_time(i, s) - inst.travel_time(s, 0)));
            } else {
                const int row = m.add_con("c79_" + key, Sense::LE, 0.0);
                m.add_term(row, m.var_id("tau_" + key), 1.0);
                m.add_term(row, m.var_id("x_" + key), -(t_max - inst.travel_time(i, 0)));
            }
        }
    }
    // c80: hops through closed stations are forbidden.
    for_arcs([&](NodeId i, const std::string& h, NodeId j) {
        if (is_dummy(h)) return;
        const std::string key = hop(i, h, j);
        const int row = m.add_con("c80_" + key, Sense::LE, 0.0);
        m.add_term(row, m.var_id("x_" + key), 1.0);
        m.add_term(row, m.var_id(idx("y", station_of(h))), -1.0);
    });
    {
        const int row = m.add_con("c81", Sense::LE, inst.max_stations);
        for (NodeId s : stations) m.add_term(row, m.var_id(idx("y", s)), 1.0);
        const int row2 = m.add_con("c82", Sense::LE, inst.max_routes);
        for (NodeId j : co)
            if (j != 0)
                for (const auto& h : hops) m.add_term(row2, m.var_id("x_" + hop(0, h, j)), 1.0);
    }
    return m;
}

}  // namespace elrp::mip
