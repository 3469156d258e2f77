#include "tefdtd/cli.hpp"

#include <cstdio>
#include <filesystem>
#include <fstream>
#include <iostream>

#include <CLI11.hpp>

#include "tefdtd/builtins.hpp"
#include "tefdtd/descriptor.hpp"
#include "tefdtd/dissipativity.hpp"
#include "tefdtd/error.hpp"
#include "tefdtd/scenario.hpp"

namespace tefdtd {

namespace {

SimulationConfig load_target(const std::string& target) {
    if (is_builtin(target)) return builtin_config(target);
    return parse_config_file(target);
}

void print_ps(const char* label, double seconds) {
    std::printf("  %s %.6e s = %.4g ps\n", label, seconds, seconds * 1e12);
}

int do_analyze(const std::string& target, const std::string& dump_dir,
               const std::string& export_path) {
    SimulationConfig cfg = load_target(target);
    Simulation sim(cfg.setup);
    const TimeStep ts{sim.dt()};

    std::printf("scenario: %s\n", cfg.name.c_str());
    std::printf("dt: %.6e s = %.4g ps (%s)\n", sim.dt(), sim.dt() * 1e12,
                cfg.setup.dt > 0.0 ? "explicit"
                                   : "cfl_fraction x per-cell limit over all patches");
    std::printf("patches: %zu\n", sim.patch_count());
    bool all_ok = true;
    for (std::size_t p = 0; p < sim.patch_count(); ++p) {
        const Patch& pa = sim.patch(p);
        std::printf("patch %zu: %d x %d cells, dx = %.6e m, dy = %.6e m\n", p, pa.g.nx, pa.g.ny,
                    pa.g.dx, pa.g.dy);
        print_ps("per-cell dt limit:", cfl_per_cell_min(pa.mat, pa.g));
        const DescriptorSystem sys = assemble_descriptor(pa.g, pa.mat, ts);
        const StabilityReport rep = verify_theorem1(sys, pa.mat, pa.g, ts);
        print_ps("global dt limit:  ", rep.dt_max_global);
        std::printf("  power iteration: %d iterations, seed 0x%llx\n", rep.power_iterations,
                    static_cast<unsigned long long>(rep.seed));
        std::printf("  R positive definite at dt: %s\n", rep.r_spd ? "yes" : "no");
        std::printf("  conductive losses passive: %s\n", rep.losses_ok ? "yes" : "no");
        std::printf("  port identity B = L(L^T B): %s\n", rep.ports_ok ? "exact" : "BROKEN");
        std::printf("  dissipative one-step form: %s\n", rep.dissipative() ? "yes" : "no");
        all_ok = all_ok && rep.dissipative();
        if (!dump_dir.empty()) {
            std::filesystem::create_directories(dump_dir);
            const std::string base = dump_dir + "/patch" + std::to_string(p) + "_";
            const std::pair<const char*, const SparseMat*> mats[] = {
                {"R", &sys.r_mat}, {"F", &sys.f_mat}, {"B", &sys.b_mat}, {"L", &sys.l_mat}};
            for (const auto& [name, m] : mats) {
                std::ofstream f(base + name + ".txt");
                dump_matrix_triplets(*m, f);
            }
        }
    }
    std::printf("verdict: %s\n", all_ok ? "dissipative below the stability limit"
                                        : "NOT dissipative at this dt");
    if (!export_path.empty()) {
        std::ofstream f(export_path);
        if (!f) throw Error(ErrorKind::config, "cannot write " + export_path);
        write_config(f, cfg);
        std::printf("config written to %s\n", export_path.c_str());
    }
    return 0;
}

void print_report_brief(const RunReport& r) {
    std::printf("%s: %ld/%ld steps, dt %.6e s%s\n", r.name.c_str(), r.steps_done,
                r.steps_requested, r.dt, r.diverged ? " [DIVERGED]" : "");
    if (r.ledger_rows > 0)
        std::printf("  ledger: %ld rows, %ld violations, min slack %.3e J/m\n", r.ledger_rows,
                    r.ledger_violations, r.min_slack);
    std::printf("  max |H_z|: %.6e A/m (prefix window %.6e A/m)\n", r.max_hz, r.max_hz_prefix);
    if (r.max_interface_supply_abs > 0.0)
        std::printf("  interface supply: max abs %.3e J/m, max rel %.3e\n",
                    r.max_interface_supply_abs, r.max_interface_supply_rel);
    for (const auto& [name, peak] : r.probe_peaks)
        std::printf("  probe %s peak: %.6e\n", name.c_str(), peak);
}

int run_builtin(const std::string& name, const std::string& out_dir, long steps, int threads,
                bool extended) {
    if (name == "cavity-stability") {
        long n = steps > 0 ? steps : (extended ? 1000000 : 100000);
        const CavityOutcome oc = run_cavity_stability(out_dir, n, threads);
        print_report_brief(oc.report);
        const double ratio =
            oc.report.max_hz_prefix > 0.0 ? oc.report.max_hz / oc.report.max_hz_prefix : 0.0;
        std::printf("  late/early |H_z| ratio: %.3f\n", ratio);
        return oc.report.diverged ? 3 : 0;
    }
    if (name == "material-traverse") {
        int rc = 0;
        for (const double sigma : {5.0, 5.8e7}) {
            const TraverseOutcome oc = run_traverse(sigma, out_dir, threads);
            std::printf("material-traverse (slab sigma = %g S/m, dt %.6e s):\n", sigma, oc.dt);
            for (const TraverseCase& c : oc.placements)
                if (c.report.diverged) rc = 3;
            std::printf("  placements pairwise max rel L2: %.6f\n", oc.pairwise_max_rel);
            std::printf("  vs uniformly fine max rel L2: %.6f\n", oc.vs_fine_max_rel);
        }
        return rc;
    }
    if (name == "four-rod") {
        const FourRodOutcome oc = run_four_rod(out_dir, threads);
        std::printf("four-rod: reflection over %.0f-%.0f GHz, %zu bins\n",
                    oc.freq_hz.front() / 1e9, oc.freq_hz.back() / 1e9, oc.freq_hz.size());
        double max_iface = 0.0, min_rod = 1e300;
        for (std::size_t k = 0; k < oc.freq_hz.size(); ++k) {
            max_iface = std::max(max_iface, oc.iface_ratio[k]);
            min_rod = std::min(min_rod, oc.rod_ratio[k]);
        }
        std::printf("  interface-only below rods in every bin: %s\n",
                    oc.iface_below_rods ? "yes" : "NO");
        std::printf("  max interface ratio: %.3e, min rod ratio: %.3e\n", max_iface, min_rod);
        std::printf("  refined run %.3f s, uniformly fine %.3f s, speedup %.2fx\n",
                    oc.subgrid_seconds, oc.fine_seconds, oc.speedup);
        return (oc.subgrid_report.diverged || oc.fine_report.diverged) ? 3 : 0;
    }
    if (name == "synthetic-sar") {
        const SarOutcome oc = run_synthetic_sar(out_dir, threads);
        std::printf("synthetic-sar: absorption integrals (W m^2/kg)\n");
        std::printf("  refined patch: %.6e\n", oc.subgrid_integral);
        std::printf("  uniformly fine: %.6e\n", oc.fine_integral);
        std::printf("  uniformly coarse: %.6e\n", oc.coarse_integral);
        std::printf("  refined vs fine: %.2f%%, coarse vs fine: %.2f%%\n",
                    oc.subgrid_vs_fine_rel * 100.0, oc.coarse_vs_fine_rel * 100.0);
        return 0;
    }
    throw Error(ErrorKind::argument, "unknown builtin scenario: " + name);
}

int do_run(const std::string& target, const std::string& out_dir, long steps, double dt,
           int threads, long seed, bool extended) {
    if (is_builtin(target)) return run_builtin(target, out_dir, steps, threads, extended);
    SimulationConfig cfg = load_target(target);
    if (!out_dir.empty()) cfg.out_dir = out_dir;
    if (steps > 0) cfg.setup.steps = steps;
    if (dt > 0.0) cfg.setup.dt = dt;
    if (threads > 0) cfg.setup.threads = threads;
    if (seed >= 0) cfg.setup.seed = std::uint64_t(seed);
    const RunReport r = run_scenario(cfg);
    write_report(std::cout, r);
    return r.diverged ? 3 : 0;
}

} // namespace

int cli_entry(const std::vector<std::string>& args) {
    CLI::App app{"2D TE field solver with grid refinement patches and per-step energy audits"};
    app.require_subcommand(1);

    CLI::App* sc = app.add_subcommand("scenarios", "list the built-in scenarios");

    std::string an_target, dump_dir, export_path;
    CLI::App* an = app.add_subcommand("analyze",
                                      "stability and dissipativity analysis of a config/builtin");
    an->add_option("config", an_target, "config file path or builtin name")->required();
    an->add_option("--dump-matrices", dump_dir, "write one-step form matrices (triplets) here");
    an->add_option("--export-config", export_path, "write the resolved config to this file");

    std::string run_target, out_dir;
    long steps = 0, seed = -1;
    double dt = 0.0;
    int threads = 1;
    bool extended = false;
    CLI::App* rn = app.add_subcommand("run", "run a config file or builtin scenario");
    rn->add_option("config", run_target, "config file path or builtin name")->required();
    rn->add_option("--out", out_dir, "output directory");
    rn->add_option("--steps", steps, "override the step count");
    rn->add_option("--dt", dt, "override the time step (seconds)");
    rn->add_option("--threads", threads, "worker threads for the update loops");
    rn->add_option("--seed", seed, "seed recorded in reports");
    rn->add_flag("--extended", extended, "long variant of a builtin (10x steps)");

    std::vector<std::string> argv_s;
    argv_s.push_back("tefdtd");
    argv_s.insert(argv_s.end(), args.begin(), args.end());
    std::vector<const char*> argv;
    for (const std::string& a : argv_s) argv.push_back(a.c_str());
    try {
        app.parse(int(argv.size()), argv.data());
    } catch (const CLI::ParseError& e) {
        return app.exit(e);
    }

    try {
        if (sc->parsed()) {
            for (const BuiltinInfo& b : builtin_list())
                std::printf("%-18s %s\n", b.name.c_str(), b.summary.c_str());
            return 0;
        }
        if (an->parsed()) return do_analyze(an_target, dump_dir, export_path);
        return do_run(run_target, out_dir, steps, dt, threads, seed, extended);
    } catch (const Error& e) {
        std::fprintf(stderr, "error: %s\n", e.what());
        return 2;
    } catch (const std::exception& e) {
        std::fprintf(stderr, "error: %s\n", e.what());
        return 2;
    }
}

} // namespace tefdtd
