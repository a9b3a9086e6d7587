// Acceptance suite: runs every acceptance criterion at its stated tolerance
// and prints one PASS/FAIL line per criterion. Exit code = number of
// failures.

#include <chrono>
#include <cmath>
#include <cstdio>
#include <cstdlib>
#include <fstream>
#include <iostream>
#include <sstream>
#include <vector>

#include "elrp/exact.hpp"
#include "elrp/instance_io.hpp"
#include "elrp/mip/builders.hpp"
#include "elrp/preprocess.hpp"
#include "elrp/random.hpp"
#include "elrp/simulate.hpp"
#include "elrp/study.hpp"
#include "../support/helpers.hpp"

using namespace elrp;
using Clock = std::chrono::steady_clock;

namespace {

int failures = 0;

void report(int criterion, bool pass, const std::string& what, const std::string& detail) {
    std::printf("[%s] criterion %d: %s (%s)\n", pass ? "PASS" : "FAIL", criterion, what.c_str(),
                detail.c_str());
    if (!pass) ++failures;
}

double seconds_since(Clock::time_point t0) {
    return std::chrono::duration<double>(Clock::now() - t0).count();
}

// ---- criterion 1: charging roundtrip -------------------------------------
void criterion1() {
    const auto t0 = Clock::now();
    Rng rng(1001);
    double worst = 0.0;
    int functions = 0;
    bool ok = true;
    std::vector<ChargingFunction> fs{test::example_function()};
    for (int i = 0; i < 4; ++i) fs.push_back(test::random_function(rng, 16.0, "f"));
    for (const auto& f : fs) {
        ++functions;
        for (int i = 0; i < 1000; ++i) {
            const double q = rng.uniform(0.0, f.capacity());
            const double err = std::abs(f.soc_at_time(f.time_at_soc(q)) - q);
            worst = std::max(worst, err);
            if (err >= 1e-9) ok = false;
        }
    }
    const double dt = seconds_since(t0);
    std::ostringstream d;
    d << functions << " functions x 1000 samples, max error " << worst << ", " << dt << " s";
    report(1, ok && dt < 1.0, "SoC/time roundtrip within 1e-9 in under 1 s", d.str());
}

// ---- criterion 2: cross-formulation agreement -----------------------------
void criterion2() {
    const auto t0 = Clock::now();
    io::GenParams p;
    p.n_customers = 5;
    p.n_stations = 2;
    bool ok = true;
    int done = 0, charged = 0;
    std::ostringstream why;
    for (uint64_t seed = 1; done < 20 && seed < 200; ++seed) {
        const Instance inst = io::generate_synthetic(p, seed);
        const ExactResult res = brute_force(inst);
        if (!res.found) continue;
        ++done;
        const ValidationReport rep = validate_solution(inst, res.solution);
        for (const auto& r : res.solution.routes)
            if (!r.charges.empty()) ++charged;
        const mip::MipModel models[4] = {
            mip::build_m1(inst, 1, false), mip::build_m2(inst, 1, false), mip::build_m3(inst),
            mip::build_m4(inst, enumerate_paths(inst, inst.max_stations))};
        for (const auto& m : models) {
            try {
                const mip::Assignment a = mip::solution_to_assignment(m, inst, res.solution);
                const mip::EvalResult ev = mip::evaluate_assignment(m, a);
                if (!ev.feasible || std::abs(ev.objective - rep.objective) > 1e-6) {
                    ok = false;
                    why << " " << m.name << "@seed" << seed;
                    if (!ev.row_violations.empty())
                        why << "(" << ev.row_violations.front().row << ")";
                }
            } catch (const std::exception& e) {
                ok = false;
                why << " " << m.name << "@seed" << seed << "(" << e.what() << ")";
            }
        }
    }
    const double dt = seconds_since(t0);
    std::ostringstream d;
    d << done << " instances, " << charged << " charged routes, " << dt << " s" << why.str();
    report(2, ok && done == 20 && dt < 300.0,
           "exact optima feasible in M1/M2/M3/M4 with identical objective", d.str());
}

// ---- criterion 3: solve_exact equals brute force ---------------------------
void criterion3() {
    io::GenParams p;
    p.n_customers = 5;
    p.n_stations = 2;
    bool ok = true;
    int done = 0;
    double worst_time = 0.0;
    for (uint64_t seed = 500; done < 20 && seed < 700; ++seed) {
        const Instance inst = io::generate_synthetic(p, seed);
        const auto t0 = Clock::now();
        const ExactResult bf = brute_force(inst);
        const ExactResult bb = solve_exact(inst);
        const double dt = seconds_since(t0);
        worst_time = std::max(worst_time, dt);
        if (!bf.found) continue;
        ++done;
        if (!bb.found || !bb.optimal || std::abs(bb.objective - bf.objective) > 1e-6) ok = false;
        if (dt > 60.0) ok = false;
    }
    std::ostringstream d;
    d << done << " instances, slowest pair " << worst_time << " s";
    report(3, ok && done == 20, "solve_exact matches brute_force within 1e-6", d.str());
}

// ---- criterion 4: dominance safety + gap bounds vs grid oracle -------------
void criterion4() {
    io::GenParams p;
    p.n_customers = 4;
    p.n_stations = 3;
    bool ok = true;
    int done = 0, pruned_something = 0;
    for (uint64_t seed = 900; done < 20 && seed < 1100; ++seed) {
        const Instance inst = io::generate_synthetic(p, seed);
        const ExactResult full = brute_force(inst, {});
        ExactOptions opts;
        opts.use_pruned_paths = true;
        const ExactResult pruned = brute_force(inst, opts);
        if (!full.found) continue;
        ++done;
        const PathSet all = enumerate_paths(inst, inst.max_stations);
        const PathSet kept = prune_dominated(inst, all);
        size_t n_all = 0, n_kept = 0;
        for (const auto& [k, v] : all) n_all += v.size();
        for (const auto& [k, v] : kept) n_kept += v.size();
        if (n_kept < n_all) ++pruned_something;
        if (!pruned.found || std::abs(full.objective - pruned.objective) > 1e-6) ok = false;
    }
    Rng rng(4004);
    double worst_gap_err = 0.0;
    for (int trial = 0; trial < 50; ++trial) {
        const ChargingFunction a = test::random_function(rng, 16.0, "a");
        const ChargingFunction b = test::random_function(rng, 16.0, "b");
        const ChargingFunction& slow = a.time_to_full() >= b.time_to_full() ? a : b;
        const ChargingFunction& fast = a.time_to_full() >= b.time_to_full() ? b : a;
        GapWindow w;
        w.entry_shift = rng.uniform(0.0, 3.0);
        w.exit_shift = rng.uniform(0.0, 3.0);
        w.time_shift = rng.uniform(0.0, 0.5);
        w.entry_hi = 16.0 - rng.uniform(0.0, 4.0);
        w.exit_lo = rng.uniform(0.0, 3.0);
        worst_gap_err = std::max(worst_gap_err,
                                 std::abs(max_time_gap(slow, fast, w).value -
                                          test::grid_time_gap(slow, fast, w)));
        worst_gap_err = std::max(worst_gap_err,
                                 std::abs(max_energy_gap(slow, fast, w).value -
                                          test::grid_energy_gap(slow, fast, w)));
    }
    if (worst_gap_err > 1e-6) ok = false;
    std::ostringstream d;
    d << done << " instances (" << pruned_something
      << " with actual pruning), worst gap-bound error " << worst_gap_err;
    report(4, ok && done == 20, "dominance pruning is optimum-safe; gap bounds exact", d.str());
}

// ---- criterion 5: preprocessing safety -------------------------------------
void criterion5() {
    io::GenParams p;
    p.n_customers = 4;
    p.n_stations = 3;
    bool ok = true;
    int done = 0;
    for (uint64_t seed = 900; done < 20 && seed < 1100; ++seed) {
        const Instance inst = io::generate_synthetic(p, seed);
        const ExactResult plain = brute_force(inst, {});
        ExactOptions opts;
        opts.use_infeasible_arcs = true;
        opts.use_soc_floors = true;
        const ExactResult strong = brute_force(inst, opts);
        if (!plain.found) continue;
        ++done;
        if (!strong.found || std::abs(plain.objective - strong.objective) > 1e-6) ok = false;
    }
    report(5, ok && done == 20, "arc removal and SoC floors preserve the optimum",
           std::to_string(done) + " instances");
}

// ---- criterion 6: SEC separation completeness ------------------------------
void criterion6() {
    test::InstanceBuilder b;
    for (int i = 0; i < 5; ++i) b.customer(10.0 * (i + 1), 3.0 * i);
    const Instance inst = b.build();
    Rng rng(6006);
    bool ok = true;
    int with_violation = 0;
    for (int trial = 0; trial < 50; ++trial) {
        std::map<std::pair<NodeId, NodeId>, double> x;
        for (int i = 0; i < 6; ++i)
            for (int j = 0; j < 6; ++j) {
                if (i == j) continue;
                if (rng.next_double() < 0.45) x[{i, j}] = rng.next_double();
            }
        const auto found = separate_sec(x, inst);
        for (const auto& cut : found)
            if (sec_violation(cut, x) <= 1e-6) ok = false;
        const auto all = test::scan_all_cuts(x, 6);
        if (!all.empty()) {
            ++with_violation;
            if (found.empty()) ok = false;
        }
    }
    report(6, ok && with_violation >= 10, "min-cut separation complete on 6-node graphs",
           std::to_string(with_violation) + "/50 vectors had violated cuts");
}

// ---- criterion 7: NL-G study ------------------------------------------------
void criterion7() {
    io::GenParams p;
    p.n_customers = 5;
    p.n_stations = 3;
    p.max_stations = 2;
    std::vector<Instance> instances;
    for (uint64_t seed = 7000; instances.size() < 22 && seed < 7200; ++seed) {
        const Instance inst = io::generate_synthetic(p, seed);
        instances.push_back(inst);
    }
    StudyOptions opts;
    opts.engine = "exact";
    opts.limits.time_budget_s = 60.0;
    const auto rows = run_study(instances, opts);
    int usable = 0, differing = 0, with_big_gap = 0;
    double mean = 0.0;
    for (const auto& r : rows) {
        if (r.status != "ok") continue;
        ++usable;
        mean += r.nl_gap_pct;
        if (r.nl_gap_pct >= 5.0) ++with_big_gap;
        if (r.stations_differ) ++differing;
    }
    if (usable > 0) mean /= usable;
    const bool ok = usable >= 20 && mean > 0.0 && with_big_gap >= 1 && differing >= 1;
    std::ostringstream d;
    d << usable << " instances, mean NL-G " << mean << "%, " << with_big_gap
      << " with NL-G >= 5%, " << differing << " with differing station sets";
    report(7, ok, "linear-charging study reproduces the qualitative findings", d.str());
    std::printf("        note: exact published study-table objectives are reproducible only "
                "with the original instance files and an external MIP backend (not bundled); "
                "that extension is conditional by design.\n");
}

// ---- criterion 8: gap formula ------------------------------------------------
void criterion8() {
    bool ok = true;
    try {
        ok = std::abs(mip::mip_gap(20.0, 15.0) - 25.0) < 1e-12 &&
             std::abs(mip::mip_gap(7.5, 7.5)) < 1e-12 &&
             std::abs(mip::mip_gap(10.466, 7.912) - 24.4) < 0.05;
        mip::mip_gap(0.0, 1.0);
        ok = false;  // must throw
    } catch (const std::domain_error&) {
    }
    report(8, ok, "mip_gap implements 100*|bound-value|/|value|", "spot values verified");
}

// ---- criterion 9: export fidelity --------------------------------------------
void criterion9() {
    io::GenParams p;
    p.n_customers = 5;
    p.n_stations = 2;
    const Instance inst = io::generate_synthetic(p, 42);
    const ExactResult res = brute_force(inst);
    bool ok = res.found;
    std::ostringstream d;
    const mip::MipModel models[4] = {
        mip::build_m1(inst, 1, false), mip::build_m2(inst, 1, false), mip::build_m3(inst),
        mip::build_m4(inst, enumerate_paths(inst, inst.max_stations))};
    for (const auto& m : models) {
        const std::string mps = mip::export_mps(m);
        const std::string path = "/tmp/elrp-acceptance-" + mip::to_string(m.formulation) + ".mps";
        std::ofstream(path) << mps;
        // toolkit round trip with matching verdicts
        try {
            const mip::MipModel back = mip::read_mps(mps);
            const mip::Assignment a = mip::solution_to_assignment(m, inst, res.solution);
            const mip::EvalResult e1 = mip::evaluate_assignment(m, a);
            const mip::EvalResult e2 = mip::evaluate_assignment(back, a);
            if (e1.feasible != e2.feasible ||
                std::abs(e1.objective - e2.objective) > 1e-9) {
                ok = false;
                d << " verdict-mismatch:" << m.name;
            }
            if (!e1.feasible) {
                ok = false;
                d << " not-feasible:" << m.name;
            }
        } catch (const std::exception& e) {
            ok = false;
            d << " reimport-failed:" << m.name;
        }
        // external reference reader: GLPK via ctypes (bundled with cvxopt)
        const std::string py =
            "import ctypes, glob, sys\n"
            "libs = sorted(glob.glob('/usr/local/lib/python3*/dist-packages/cvxopt.libs/*.so*'))\n"
            "loaded = {}\n"
            "for _ in range(4):\n"
            "    for f in libs:\n"
            "        if f in loaded: continue\n"
            "        try: loaded[f] = ctypes.CDLL(f, mode=ctypes.RTLD_GLOBAL)\n"
            "        except OSError: pass\n"
            "glpk = [l for f, l in loaded.items() if 'glpk' in f]\n"
            "if not glpk: sys.exit(3)\n"
            "lib = glpk[0]\n"
            "lib.glp_create_prob.restype = ctypes.c_void_p\n"
            "lib.glp_term_out(0)\n"
            "p = lib.glp_create_prob()\n"
            "ret = lib.glp_read_mps(ctypes.c_void_p(p), 2, None, sys.argv[1].encode())\n"
            "sys.exit(0 if ret == 0 else 4)\n";
        std::ofstream("/tmp/elrp-acceptance-readmps.py") << py;
        const int rc = std::system(
            ("python3 /tmp/elrp-acceptance-readmps.py '" + path + "' >/dev/null 2>&1").c_str());
        if (WEXITSTATUS(rc) != 0) {
            ok = false;
            d << " glpk-parse-failed:" << m.name << "(rc=" << WEXITSTATUS(rc) << ")";
        }
    }
    report(9, ok, "MPS exports re-read by the toolkit and by GLPK",
           d.str().empty() ? "4 formulations round-tripped" : d.str());
}

}  // namespace

int main() {
    std::printf("ELRP acceptance suite\n");
    criterion1();
    criterion2();
    criterion3();
    criterion4();
    criterion5();
    criterion6();
    criterion7();
    criterion8();
    criterion9();
    std::printf("%d criteria failed\n", failures);
    return failures;
}
