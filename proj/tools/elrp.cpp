// elrp: batch front door for instance generation, preprocessing, model
// export, desk-scale exact solving, validation and the linear-vs-nonlinear
// charging study. Exit codes: 0 success, 1 domain error, 2 usage error.

#include <cstdio>
#include <filesystem>
#include <fstream>
#include <iostream>
#include <sstream>

#include "CLI11.hpp"
#include "elrp/exact.hpp"
#include "elrp/instance_io.hpp"
#include "elrp/mip/backend.hpp"
#include "elrp/mip/builders.hpp"
#include "elrp/preprocess.hpp"
#include "elrp/simulate.hpp"
#include "elrp/study.hpp"

namespace fs = std::filesystem;
using namespace elrp;

namespace {

void write_file(const std::string& path, const std::string& content) {
    if (path == "-") {
        std::cout << content;
        return;
    }
    std::ofstream out(path);
    if (!out) throw std::runtime_error("cannot write " + path);
    out << content;
}

std::string num3(double v) {
    char buf[32];
    std::snprintf(buf, sizeof(buf), "%.3f", v);
    return buf;
}

std::string preprocess_csv(const Instance& inst) {
    const PreprocessReport rep = preprocess(inst);
    std::ostringstream os;
    os << "kind,i,j,value_kwh\n";
    for (const auto& [i, j] : rep.infeasible_arcs) os << "infeasible_arc," << i << "," << j << ",\n";
    for (const auto& [i, v] : rep.customer_escape)
        os << "customer_floor," << i << ",," << num3(v) << "\n";
    for (const auto& [i, v] : rep.station_escape)
        os << "station_floor," << i << ",," << num3(v) << "\n";
    return os.str();
}

std::string paths_csv(const Instance& inst) {
    const PathSet all = enumerate_paths(inst, inst.max_stations);
    const PathSet pruned = prune_dominated(inst, all);
    std::ostringstream os;
    os << "from,to,paths,paths_after_pruning\n";
    for (const auto& [key, list] : all) {
        const auto it = pruned.find(key);
        os << key.first << "," << key.second << "," << list.size() << ","
           << (it == pruned.end() ? 0 : it->second.size()) << "\n";
    }
    return os.str();
}

int cmd_validate(const std::string& instance_path, const std::string& solution_path) {
    const Instance inst = io::load_instance(instance_path);
    const RouteSolution sol = load_solution(solution_path);
    const ValidationReport rep = validate_solution(inst, sol);
    if (rep.feasible()) {
        std::cout << "feasible, objective " << num3(rep.objective) << "\n";
        return 0;
    }
    std::cout << "infeasible (" << rep.violations.size() << " violations):\n";
    for (const auto& v : rep.violations)
        std::cout << "  route " << v.route << " node " << v.node << ": " << v.detail << "\n";
    return 1;
}

}  // namespace

int main(int argc, char** argv) {
    CLI::App app{"ELRP toolkit: nonlinear-charging location routing models and tools"};
    app.require_subcommand(1);

    // gen
    auto* gen = app.add_subcommand("gen", "Generate a synthetic instance");
    io::GenParams gp;
    uint64_t seed = 1;
    std::string out = "-";
    gen->add_option("--customers", gp.n_customers, "Number of customers")->required();
    gen->add_option("--stations", gp.n_stations, "Number of station candidates")->required();
    gen->add_option("--seed", seed, "RNG seed");
    gen->add_option("--area", gp.area, "Square side in km");
    gen->add_option("--service-time", gp.service_time, "Customer service time in hours");
    gen->add_option("--speed", gp.speed, "EV speed in km/h");
    gen->add_option("--max-routes", gp.max_routes, "Route limit (default: customers)");
    gen->add_option("--max-stations", gp.max_stations, "Opened-station limit (default: stations)");
    gen->add_option("--techs", gp.n_techs, "Number of charger speed tiers (1-3)");
    gen->add_option("--out", out, "Output file (- for stdout)");

    // import
    auto* imp = app.add_subcommand("import", "Import EVRP-style text instances");
    std::string import_dir, import_file, out_dir = ".";
    imp->add_option("--dir", import_dir, "Directory of .txt instances");
    imp->add_option("--file", import_file, "Single .txt instance");
    imp->add_option("--out-dir", out_dir, "Destination for canonical .json files");

    // extend
    auto* ext = app.add_subcommand("extend", "Extend an EVRP instance with co-located candidates");
    std::string instance_path, solution_path, model_name = "m1", format = "mps";
    ext->add_option("--instance", instance_path, "Canonical instance")->required();
    ext->add_option("--seed", seed, "RNG seed");
    ext->add_option("--out", out, "Output file (- for stdout)");

    // preprocess
    auto* pre = app.add_subcommand("preprocess", "Infeasible arcs and SoC floors as CSV");
    pre->add_option("--instance", instance_path, "Canonical instance")->required();
    pre->add_option("--out", out, "Output CSV (- for stdout)");

    // paths
    auto* pth = app.add_subcommand("paths", "Recharge-path counts before/after pruning");
    pth->add_option("--instance", instance_path, "Canonical instance")->required();
    pth->add_option("--out", out, "Output CSV (- for stdout)");

    // build-mip
    auto* bld = app.add_subcommand("build-mip", "Emit a formulation as MPS or LP");
    int beta = 0;
    bool strengthen = false, linear = false, prune = false;
    bld->add_option("--instance", instance_path, "Canonical instance")->required();
    bld->add_option("--model", model_name, "m1|m2|m3|m4")->required();
    bld->add_option("--beta", beta, "Dummy copies per station (m1/m2)");
    bld->add_flag("--strengthen", strengthen, "Add preprocess rows (m1/m2)");
    bld->add_flag("--linear", linear, "Linearize the charging functions first");
    bld->add_flag("--prune-paths", prune, "Dominance-prune the m4 path set");
    bld->add_option("--format", format, "mps|lp");
    bld->add_option("--out", out, "Output file (- for stdout)");

    // solve-exact
    auto* sx = app.add_subcommand("solve-exact", "Desk-scale exact solve");
    double time_limit = 60.0;
    std::string sol_out = "solution.json";
    sx->add_option("--instance", instance_path, "Canonical instance")->required();
    sx->add_option("--time-limit", time_limit, "Seconds");
    sx->add_option("--out", sol_out, "Solution JSON path");

    // validate
    auto* val = app.add_subcommand("validate", "Check a solution file");
    val->add_option("--instance", instance_path, "Canonical instance")->required();
    val->add_option("--solution", solution_path, "Solution JSON")->required();

    // solve-mip
    auto* smp = app.add_subcommand("solve-mip", "Solve through the external backend");
    bool escalate = false;
    smp->add_option("--instance", instance_path, "Canonical instance")->required();
    smp->add_option("--model", model_name, "m1|m2|m3|m4");
    smp->add_option("--beta", beta, "Dummy copies per station (m1/m2)");
    smp->add_flag("--strengthen", strengthen, "Add preprocess rows");
    smp->add_flag("--escalate-beta", escalate, "Increase beta while the incumbent improves");
    smp->add_option("--time-limit", time_limit, "Seconds per solve");

    // compare-charging
    auto* cmp = app.add_subcommand("compare-charging", "Linear vs nonlinear charging study");
    std::vector<std::string> instance_files;
    std::string engine = "exact";
    int jobs = 1;
    cmp->add_option("--instance", instance_files, "Instance file (repeatable)")
        ->required()
        ->take_all();
    cmp->add_option("--engine", engine, "exact|backend");
    cmp->add_option("--time-limit", time_limit, "Seconds per solve");
    cmp->add_option("--jobs", jobs, "Parallel instances");
    cmp->add_option("--out", out, "Output CSV (- for stdout)");

    try {
        app.parse(argc, argv);
    } catch (const CLI::ParseError& e) {
        if (e.get_exit_code() == 0) return app.exit(e);  // --help
        app.exit(e);
        return 2;
    }

    try {
        if (gen->parsed()) {
            write_file(out, io::serialize_instance(io::generate_synthetic(gp, seed)));
        } else if (imp->parsed()) {
            std::vector<fs::path> files;
            if (!import_file.empty()) files.push_back(import_file);
            if (!import_dir.empty())
                for (const auto& e : fs::directory_iterator(import_dir))
                    if (e.path().extension() == ".txt") files.push_back(e.path());
            std::sort(files.begin(), files.end());
            if (files.empty()) throw std::runtime_error("nothing to import");
            fs::create_directories(out_dir);
            for (const auto& f : files) {
                std::ifstream in(f);
                std::ostringstream ss;
                ss << in.rdbuf();
                const Instance inst = io::import_evrp_text(ss.str(), f.stem().string());
                const fs::path dest = fs::path(out_dir) / (f.stem().string() + ".json");
                io::save_instance(inst, dest.string());
                std::cout << f.string() << " -> " << dest.string() << "\n";
            }
        } else if (ext->parsed()) {
            const Instance evrp = io::load_instance(instance_path);
            write_file(out, io::serialize_instance(io::extend_to_elrp(evrp, seed)));
        } else if (pre->parsed()) {
            write_file(out, preprocess_csv(io::load_instance(instance_path)));
        } else if (pth->parsed()) {
            write_file(out, paths_csv(io::load_instance(instance_path)));
        } else if (bld->parsed()) {
            Instance inst = io::load_instance(instance_path);
            if (linear) inst = with_linearized_charging(inst);
            const auto f = mip::formulation_from_string(model_name);
            mip::MipModel model;
            switch (f) {
                case mip::FormulationId::M1: model = mip::build_m1(inst, beta, strengthen); break;
                case mip::FormulationId::M2: model = mip::build_m2(inst, beta, strengthen); break;
                case mip::FormulationId::M3: model = mip::build_m3(inst); break;
                case mip::FormulationId::M4:
                    model = mip::build_m4(inst, prune ? prune_dominated(inst)
                                                      : enumerate_paths(inst, inst.max_stations));
                    break;
            }
            if (format == "mps") write_file(out, mip::export_mps(model));
            else if (format == "lp") write_file(out, mip::export_lp(model));
            else throw std::runtime_error("unknown format '" + format + "'");
        } else if (sx->parsed()) {
            const Instance inst = io::load_instance(instance_path);
            SearchLimits limits;
            limits.time_budget_s = time_limit;
            const ExactResult res = solve_exact(inst, limits);
            std::cout << "instance,objective,bound,gap_pct,nodes,time_s\n";
            if (res.found) {
                save_solution(res.solution, sol_out);
                const double gap = res.optimal ? 0.0 : mip::mip_gap(res.objective, res.bound);
                std::cout << inst.name << "," << num3(res.objective) << "," << num3(res.bound)
                          << "," << num3(gap) << "," << res.nodes << "," << num3(res.wall_time_s)
                          << "\n";
            } else {
                std::cout << inst.name << ",,,," << res.nodes << "," << num3(res.wall_time_s)
                          << "\n";
                std::cerr << "no feasible solution found\n";
                for (const auto& r : res.infeasibility) std::cerr << "  " << r << "\n";
                return 1;
            }
        } else if (val->parsed()) {
            return cmd_validate(instance_path, solution_path);
        } else if (smp->parsed()) {
            const Instance inst = io::load_instance(instance_path);
            mip::BackendConfig config;
            config.time_limit_s = time_limit;
            if (!mip::backend_available(config))
                throw std::runtime_error("no backend configured (set ELRP_BACKEND)");
            const auto f = mip::formulation_from_string(model_name);
            if (escalate) {
                const auto r = mip::solve_with_beta_escalation(inst, f, config, strengthen);
                std::cout << "beta,status,objective\n";
                for (const auto& t : r.trail)
                    std::cout << t.beta << "," << mip::to_string(t.status) << ","
                              << (t.has_objective ? num3(t.objective) : "") << "\n";
                std::cout << "chosen beta " << r.beta << ", status "
                          << mip::to_string(r.best.status) << "\n";
            } else {
                mip::MipModel model;
                switch (f) {
                    case mip::FormulationId::M1:
                        model = mip::build_m1(inst, beta, strengthen);
                        break;
                    case mip::FormulationId::M2:
                        model = mip::build_m2(inst, beta, strengthen);
                        break;
                    case mip::FormulationId::M3: model = mip::build_m3(inst); break;
                    case mip::FormulationId::M4:
                        model = mip::build_m4(inst, enumerate_paths(inst, inst.max_stations));
                        break;
                }
                const mip::SolveResult r = mip::backend_solve(model, config);
                std::cout << "status " << mip::to_string(r.status);
                if (r.has_objective) std::cout << ", objective " << num3(r.objective);
                if (r.has_bound) std::cout << ", bound " << num3(r.bound);
                std::cout << "\n";
                if (!r.diagnostics.empty()) std::cerr << r.diagnostics << "\n";
            }
        } else if (cmp->parsed()) {
            std::vector<Instance> instances;
            for (const auto& f : instance_files) instances.push_back(io::load_instance(f));
            StudyOptions opts;
            opts.engine = engine;
            opts.limits.time_budget_s = time_limit;
            opts.jobs = jobs;
            write_file(out, study_csv(run_study(instances, opts)));
        }
    } catch (const std::exception& e) {
        std::cerr << "error: " << e.what() << "\n";
        return 1;
    }
    return 0;
}
