#include "elrp/paths.hpp"

#include <algorithm>
#include <cmath>
#include <functional>
#include <set>
#include <stdexcept>

namespace elrp {

namespace {
// Strictness margin for dominance comparisons: ties are never dominated.
constexpr double kStrict = 1e-9;
}

RechargePath make_path(const Instance& inst, NodeId from, NodeId to,
                       std::vector<NodeId> stations) {
    RechargePath p;
    p.from = from;
    p.to = to;
    p.stations = std::move(stations);
    NodeId prev = from;
    bool first = true;
    for (NodeId s : p.stations) {
        const double e = inst.energy(prev, s);
        p.ct += inst.travel_time(prev, s);
        p.ce += e;
        if (first) p.cf = e;
        first = false;
        prev = s;
    }
    const double e_last = inst.energy(prev, to);
    p.ct += inst.travel_time(prev, to);
    p.ce += e_last;
    if (p.stations.empty()) {
        p.cf = p.ce;
        p.cl = p.ce;
    } else {
        p.cl = e_last;
    }
    return p;
}

PathSet enumerate_paths(const Instance& inst, int max_stations) {
    if (max_stations > inst.max_stations)
        throw std::invalid_argument("enumerate_paths: max_stations above instance limit");
    const double q_cap = inst.battery_capacity();
    std::vector<NodeId> endpoints;
    endpoints.push_back(0);
    for (NodeId c : inst.customers()) endpoints.push_back(c);
    const auto stations = inst.stations();

    PathSet out;
    for (NodeId i : endpoints)
        for (NodeId j : endpoints) {
            if (i == j) continue;
            auto& list = out[{i, j}];
            std::vector<NodeId> seq;
            // Depth-first over distinct station sequences, shorter first at
            // each level; overall order is enforced by a final stable sort.
            std::function<void(NodeId)> grow = [&](NodeId last) {
                if (inst.energy(last, j) <= q_cap + kFeasTol) {
                    RechargePath p = make_path(inst, i, j, seq);
                    list.push_back(std::move(p));
                }
                if (static_cast<int>(seq.size()) >= max_stations) return;
                for (NodeId s : stations) {
                    if (std::find(seq.begin(), seq.end(), s) != seq.end()) continue;
                    if (inst.energy(last, s) > q_cap + kFeasTol) continue;
                    seq.push_back(s);
                    grow(s);
                    seq.pop_back();
                }
            };
            grow(i);
            std::stable_sort(list.begin(), list.end(),
                             [](const RechargePath& a, const RechargePath& b) {
                                 if (a.length() != b.length()) return a.length() < b.length();
                                 return a.stations < b.stations;
                             });
        }
    return out;
}

GapWindow gap_window(const Instance& inst, const RechargePath& p, const RechargePath& p_prime) {
    GapWindow w;
    w.entry_shift = p_prime.cf - p.cf;
    w.exit_shift = p_prime.cl - p.cl;
    w.time_shift = p_prime.ct - p.ct;
    w.entry_hi = inst.battery_capacity() - p_prime.cf;
    w.exit_lo = p_prime.cl;
    return w;
}

namespace {

std::vector<double> clipped(std::vector<double> vals, double lo, double hi) {
    std::vector<double> out;
    if (hi < lo - 1e-12) return out;
    for (double v : vals) {
        v = std::clamp(v, lo, hi);
        out.push_back(v);
    }
    out.push_back(lo);
    out.push_back(hi);
    std::sort(out.begin(), out.end());
    out.erase(std::unique(out.begin(), out.end(),
                          [](double a, double b) { return std::abs(a - b) < 1e-12; }),
              out.end());
    return out;
}

std::vector<double> bp_energies(const ChargingFunction& f) {
    std::vector<double> out;
    for (const auto& [e, t] : f.breakpoints()) out.push_back(e);
    return out;
}

std::vector<double> bp_times(const ChargingFunction& f) {
    std::vector<double> out;
    for (const auto& [e, t] : f.breakpoints()) out.push_back(t);
    return out;
}

}  // namespace

GapBound max_time_gap(const ChargingFunction& slow, const ChargingFunction& fast,
                      const GapWindow& w) {
    const double q_cap = fast.capacity();
    if (w.entry_hi < -1e-12 || w.exit_lo > q_cap + 1e-12) return {0.0, true};

    // Entry SoC a' at the fast station; the slow station of p is entered at
    // a = a' + entry_shift. Equal delivered SoC at the destination pins the
    // exit pair b = b' - exit_shift. The objective is piecewise linear in
    // (a', b'), so the maximum sits on the breakpoint grid of both
    // functions (shifted into a'/b' coordinates) plus the constraint lines.
    std::vector<double> a_cand = bp_energies(fast);
    for (double e : bp_energies(slow)) a_cand.push_back(e - w.entry_shift);
    a_cand = clipped(std::move(a_cand), 0.0, w.entry_hi);

    std::vector<double> b_base = bp_energies(fast);
    for (double e : bp_energies(slow)) b_base.push_back(e + w.exit_shift);

    if (a_cand.empty()) return {0.0, true};

    bool any = false;
    double best = 0.0;
    const double slow_cap = slow.capacity();
    for (double a_prime : a_cand) {
        std::vector<double> b_cand = b_base;
        b_cand.push_back(a_prime);
        b_cand.push_back(a_prime + w.entry_shift + w.exit_shift);  // where b crosses a
        b_cand = clipped(std::move(b_cand), std::max(a_prime, w.exit_lo), q_cap);
        const double a = std::clamp(a_prime + w.entry_shift, 0.0, slow_cap);
        for (double b_prime : b_cand) {
            const double b = std::clamp(b_prime - w.exit_shift, 0.0, slow_cap);
            const double dt_slow = b > a ? slow.charge_duration(a, b) : 0.0;
            const double dt_fast = fast.charge_duration(a_prime, b_prime);
            best = any ? std::max(best, dt_slow - dt_fast) : dt_slow - dt_fast;
            any = true;
        }
    }
    if (!any) return {0.0, true};
    return {std::max(best, 0.0), false};
}

GapBound max_energy_gap(const ChargingFunction& slow, const ChargingFunction& fast,
                        const GapWindow& w) {
    const double q_cap = fast.capacity();
    if (w.entry_hi < -1e-12 || w.exit_lo > q_cap + 1e-12) return {0.0, true};

    // Equal arrival times force the slow station to charge for
    // u + time_shift whenever the fast one charges for u. Parameterize by
    // alpha = entry time on the fast curve and the fast charging span u;
    // kink loci of the piecewise-linear objective are the function
    // breakpoints in both coordinates plus their pairwise crossings.
    const double es = w.entry_shift;
    const double dt = w.time_shift;
    const double slow_cap = slow.capacity();
    const double alpha_max = fast.time_at_soc(std::clamp(w.entry_hi, 0.0, q_cap));
    if (w.entry_hi < -1e-12) return {0.0, true};

    auto slow_entry_time = [&](double alpha) {
        const double a = std::clamp(fast.soc_at_time(alpha) + es, 0.0, slow_cap);
        return slow.time_at_soc(a);
    };

    std::vector<double> alpha_cand = bp_times(fast);
    for (double e : bp_energies(slow)) {
        const double a_prime = e - es;
        if (a_prime >= -1e-12 && a_prime <= q_cap + 1e-12)
            alpha_cand.push_back(fast.time_at_soc(std::clamp(a_prime, 0.0, q_cap)));
    }
    // Crossings of fast-diagonal (alpha + u = c1) with slow-diagonal
    // (slow_entry_time(alpha) + u + dt = c2) loci, solved per linear piece.
    {
        std::vector<double> grid = alpha_cand;
        grid = clipped(std::move(grid), 0.0, alpha_max);
        for (size_t g = 0; g + 1 < grid.size(); ++g) {
            const double lo = grid[g], hi = grid[g + 1];
            const double slo = slow_entry_time(lo), shi = slow_entry_time(hi);
            const double denom = (hi - lo) - (shi - slo);
            if (std::abs(denom) < 1e-12) continue;
            for (double c1 : bp_times(fast))
                for (double c2 : bp_times(slow)) {
                    // alpha - slow_entry_time(alpha) = c1 - c2 + dt on [lo, hi]
                    const double target = c1 - c2 + dt;
                    const double base = lo - slo;
                    const double t = (target - base) / denom;
                    if (t >= -1e-9 && t <= 1.0 + 1e-9)
                        alpha_cand.push_back(lo + std::clamp(t, 0.0, 1.0) * (hi - lo));
                }
        }
    }
    alpha_cand = clipped(std::move(alpha_cand), 0.0, alpha_max);
    if (alpha_cand.empty()) return {0.0, true};

    bool any = false;
    double best = 0.0;
    for (double alpha : alpha_cand) {
        const double a_prime = fast.soc_at_time(alpha);
        const double a = std::clamp(a_prime + es, 0.0, slow_cap);
        const double beta = slow.time_at_soc(a);
        const double u_hi =
            std::min(fast.time_to_full() - alpha, slow.time_to_full() - beta - dt);
        const double u_lo =
            std::max(0.0, fast.time_at_soc(std::clamp(w.exit_lo, 0.0, q_cap)) - alpha);
        if (u_hi < u_lo - 1e-12) continue;
        std::vector<double> u_cand;
        for (double t : bp_times(fast)) u_cand.push_back(t - alpha);
        for (double t : bp_times(slow)) u_cand.push_back(t - beta - dt);
        u_cand = clipped(std::move(u_cand), u_lo, u_hi);
        for (double u : u_cand) {
            const double dq_fast = fast.soc_at_time(alpha + u) - a_prime;
            const double dq_slow =
                slow.soc_at_time(std::clamp(beta + u + dt, 0.0, slow.time_to_full())) - a;
            best = any ? std::max(best, dq_fast - dq_slow) : dq_fast - dq_slow;
            any = true;
        }
    }
    if (!any) return {0.0, true};
    return {std::max(best, 0.0), false};
}

namespace {

bool strictly_less(double a, double b) { return a < b - kStrict; }

// p "at least as fast" as p': every station on p charges any window no
// slower than every station on p'. For single-station pairs this is the
// plain speed comparison of the two stations.
bool all_pairs_at_least_as_fast(const Instance& inst, const RechargePath& p,
                                const RechargePath& p_prime) {
    for (NodeId a : p.stations)
        for (NodeId b : p_prime.stations)
            if (!inst.function_of(a).at_least_as_fast_as(inst.function_of(b))) return false;
    return true;
}

}  // namespace

bool dominates(const Instance& inst, const RechargePath& p, const RechargePath& p_prime) {
    if (p.from != p_prime.from || p.to != p_prime.to)
        throw std::invalid_argument("dominates: paths must share endpoints");
    if (p.direct() || p_prime.direct())
        throw std::invalid_argument("dominates: direct paths are not compared");

    if (!(strictly_less(p.cf, p_prime.cf) && strictly_less(p.cl, p_prime.cl) &&
          strictly_less(p.ct, p_prime.ct) && strictly_less(p.ce, p_prime.ce)))
        return false;

    if (all_pairs_at_least_as_fast(inst, p, p_prime)) return true;  // Case 1

    // Case 2: p charges slower. Only the single-station base case is proved;
    // multi-station pairs with interleaved speeds stay non-dominated.
    if (p.length() != 1 || p_prime.length() != 1) return false;
    const ChargingFunction& f_slow = inst.function_of(p.stations[0]);
    const ChargingFunction& f_fast = inst.function_of(p_prime.stations[0]);
    const GapWindow w = gap_window(inst, p, p_prime);
    const GapBound dt_bar = max_time_gap(f_slow, f_fast, w);
    const GapBound dq_bar = max_energy_gap(f_slow, f_fast, w);
    return strictly_less(p.ct + dt_bar.value, p_prime.ct) &&
           strictly_less(p.ce + dq_bar.value, p_prime.ce);
}

PathSet prune_dominated(const Instance& inst, const PathSet& all) {
    PathSet out;
    for (const auto& [key, paths] : all) {
        std::vector<char> dead(paths.size(), 0);
        for (int k = 1; k <= inst.max_stations; ++k) {
            bool changed = true;
            while (changed) {
                changed = false;
                std::vector<int> idx;
                for (size_t i = 0; i < paths.size(); ++i)
                    if (!dead[i] && !paths[i].direct() && paths[i].length() <= k)
                        idx.push_back(static_cast<int>(i));
                std::sort(idx.begin(), idx.end(), [&](int a, int b) {
                    if (paths[a].ct != paths[b].ct) return paths[a].ct < paths[b].ct;
                    return paths[a].stations < paths[b].stations;
                });
                for (size_t ai = 0; ai < idx.size(); ++ai) {
                    if (dead[idx[ai]]) continue;
                    for (size_t bi = ai + 1; bi < idx.size(); ++bi) {
                        if (dead[idx[bi]]) continue;
                        if (dominates(inst, paths[idx[ai]], paths[idx[bi]])) {
                            dead[idx[bi]] = 1;
                            changed = true;
                        }
                    }
                }
            }
        }
        auto& survivors = out[key];
        for (size_t i = 0; i < paths.size(); ++i)
            if (!dead[i]) survivors.push_back(paths[i]);
    }
    return out;
}

PathSet prune_dominated(const Instance& inst) {
    return prune_dominated(inst, enumerate_paths(inst, inst.max_stations));
}

}  // namespace elrp
