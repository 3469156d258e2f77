#include "tefdtd/builtins.hpp"

#include <algorithm>
#include <cmath>

#include "tefdtd/constants.hpp"
#include "tefdtd/error.hpp"

namespace tefdtd {

namespace {

SourceSpec gaussian_at(double x, double y, double f0, double hwhm) {
    SourceSpec s;
    s.kind = SourceSpec::Kind::gaussian;
    s.x = x;
    s.y = y;
    s.amplitude = 1.0;
    s.f0 = f0;
    s.hwhm = hwhm;
    return s;
}

ProbeSpec hz_probe(double x, double y, const std::string& name) {
    ProbeSpec p;
    p.field = ProbeSpec::Field::hz;
    p.x = x;
    p.y = y;
    p.stride = 1;
    p.name = name;
    return p;
}

double square_cfl(double delta) { return delta / (c0 * std::sqrt(2.0)); }

SimulationConfig cavity_cfg() {
    SimulationConfig c;
    c.name = "cavity-stability";
    SimulationSetup& su = c.setup;
    su.grid = GridSpec{60, 20, 1.0e-3, 2.0e-3};
    su.subgrids = {SubgridRegion{10, 5, 50, 15, 4}};
    su.sources = {gaussian_at(5.5e-3, 5.0e-3, 3.75e9, 0.74e9)};
    su.probes = {hz_probe(55.5e-3, 35.0e-3, "corner"), hz_probe(30.1e-3, 20.2e-3, "centre")};
    su.probes[0].stride = 10;
    su.probes[1].stride = 10;
    su.steps = 100000;
    su.cfl_fraction = 0.99;
    su.audit.enabled = true;
    su.audit.interface_check = true;
    return c;
}

// Slab crossing: 100 x 80 mm box behind absorbers, a 16 x 16 mm slab in the
// middle, pulse from the west, through probe on the east. The refinement
// placements all contain the slab with at least 3 mm to spare.
SimulationConfig traverse_cfg(double slab_sigma, int placement) {
    SimulationConfig c;
    SimulationSetup& su = c.setup;
    su.grid = GridSpec{100, 80, 1.0e-3, 1.0e-3};
    su.boundaries = BoundarySpec{BoundaryKind::pml, BoundaryKind::pml, BoundaryKind::pml,
                                 BoundaryKind::pml};
    su.pml.thickness = 10;
    MaterialRegion slab;
    slab.shape = MaterialRegion::Shape::rect;
    slab.x0 = 42e-3;
    slab.y0 = 32e-3;
    slab.x1 = 58e-3;
    slab.y1 = 48e-3;
    slab.eps_r = slab_sigma >= 1e6 ? 1.0 : 4.0;
    slab.sigma = slab_sigma;
    su.materials = {slab};
    su.sources = {gaussian_at(20.5e-3, 40.5e-3, 10e9, 4e9)};
    su.probes = {hz_probe(75.5e-3, 40.5e-3, "through")};
    su.dt = 0.467e-12;
    su.steps = 4500;
    su.audit.enabled = false;
    switch (placement) {
    case 0: su.subgrids = {SubgridRegion{37, 27, 63, 53, 5}}; break;
    case 1: su.subgrids = {SubgridRegion{39, 29, 65, 55, 5}}; break;
    case 2: su.subgrids = {SubgridRegion{35, 25, 61, 51, 5}}; break;
    default: break; // uniformly fine reference, no patch
    }
    if (placement == 3) {
        su.grid = GridSpec{500, 400, 0.2e-3, 0.2e-3};
        su.pml.thickness = 50;
    }
    const char* names[] = {"traverse-a", "traverse-b", "traverse-c", "traverse-fine"};
    c.name = names[placement >= 0 && placement <= 3 ? placement : 0];
    return c;
}

// Parallel-plate guide (PEC top and bottom, absorbers west and east) with a
// full-height source column, probe between source and the rod cluster.
SimulationConfig four_rod_cfg(bool with_subgrid, bool with_rods, bool all_fine) {
    SimulationConfig c;
    SimulationSetup& su = c.setup;
    if (all_fine) {
        su.grid = GridSpec{264, 160, 0.25e-3, 0.25e-3};
        su.pml.thickness = 60;
    } else {
        su.grid = GridSpec{66, 40, 1.0e-3, 1.0e-3};
        su.pml.thickness = 15;
    }
    su.boundaries.west = BoundaryKind::pml;
    su.boundaries.east = BoundaryKind::pml;
    if (with_rods) {
        const double cxs[] = {31e-3, 31e-3, 35e-3, 35e-3};
        const double cys[] = {18e-3, 22e-3, 18e-3, 22e-3};
        for (int r = 0; r < 4; ++r) {
            MaterialRegion rod;
            rod.shape = MaterialRegion::Shape::disc;
            rod.cx = cxs[r];
            rod.cy = cys[r];
            rod.radius = 1e-3;
            rod.sigma = 5.8e7;
            su.materials.push_back(rod);
        }
    }
    if (with_subgrid) su.subgrids = {SubgridRegion{29, 16, 37, 24, 4}};
    for (int j = 0; j < 40; ++j)
        su.sources.push_back(gaussian_at(18.5e-3, (j + 0.5) * 1e-3, 16e9, 10e9));
    su.probes = {hz_probe(24.5e-3, 20.5e-3, "port")};
    su.dt = 0.99 * square_cfl(0.25e-3);
    su.steps = 2600;
    su.audit.enabled = false;
    c.name = all_fine ? "four-rod-fine"
             : with_rods ? (with_subgrid ? "four-rod" : "four-rod-empty")
                         : (with_subgrid ? "four-rod-iface" : "four-rod-empty");
    return c;
}

// Two-tissue disc (outer shell stiffer and less lossy than the core) in a
// 0.8 x 0.6 m box, pulsed from 0.335 m away. kind: 0 refined patch over the
// tissue, 1 uniformly fine, 2 uniformly coarse.
SimulationConfig sar_cfg(int kind) {
    SimulationConfig c;
    SimulationSetup& su = c.setup;
    if (kind == 1) {
        su.grid = GridSpec{400, 300, 2e-3, 2e-3};
        su.pml.thickness = 50;
    } else {
        su.grid = GridSpec{80, 60, 10e-3, 10e-3};
        su.pml.thickness = 10;
    }
    su.boundaries = BoundarySpec{BoundaryKind::pml, BoundaryKind::pml, BoundaryKind::pml,
                                 BoundaryKind::pml};
    // The shell is thinner than one coarse cell and the core wavelength at the
    // centre frequency spans under three coarse cells, so the uniformly coarse
    // run cannot resolve either feature while the refined patch can.
    MaterialRegion shell;
    shell.shape = MaterialRegion::Shape::disc;
    shell.cx = 0.5;
    shell.cy = 0.3;
    shell.radius = 0.08;
    shell.eps_r = 12.0;
    shell.sigma = 0.14;
    shell.rho = 1900.0;
    MaterialRegion core = shell;
    core.radius = 0.073;
    core.eps_r = 55.0;
    core.sigma = 0.94;
    core.rho = 1050.0;
    su.materials = {shell, core}; // later region wins inside the core
    if (kind == 0) su.subgrids = {SubgridRegion{41, 21, 59, 39, 5}};
    SourceSpec s = gaussian_at(0.165, 0.305, 1.5e9, 0.8e9);
    s.delay = 2e-9;
    su.sources = {s};
    if (kind == 2) {
        su.dt = 0.99 * square_cfl(10e-3);
        su.steps = 180;
    } else {
        su.dt = 0.99 * square_cfl(2e-3);
        su.steps = 900;
    }
    su.audit.enabled = false;
    su.track_peaks = true;
    su.peak_window_start = 2.8e-9;
    su.peak_window_end = 4.0e-9;
    const char* names[] = {"synthetic-sar", "sar-fine", "sar-coarse"};
    c.name = names[kind];
    return c;
}

std::string sub_out(const std::string& out_dir, const std::string& leaf) {
    return out_dir.empty() ? std::string{} : out_dir + "/" + leaf;
}

} // namespace

const std::vector<BuiltinInfo>& builtin_list() {
    static const std::vector<BuiltinInfo> list = {
        {"cavity-stability", "refined cavity ring-down with per-step energy audit"},
        {"material-traverse", "slab crossing with the refinement patch at three offsets"},
        {"four-rod", "rod cluster in a guide: interface vs physical reflections, timing"},
        {"synthetic-sar", "absorption integral over a two-tissue disc on three grids"},
    };
    return list;
}

bool is_builtin(const std::string& name) {
    for (const BuiltinInfo& b : builtin_list())
        if (b.name == name) return true;
    return false;
}

SimulationConfig builtin_config(const std::string& name) {
    if (name == "cavity-stability") return cavity_cfg();
    if (name == "material-traverse") return traverse_cfg(5.0, 0);
    if (name == "four-rod") return four_rod_cfg(true, true, false);
    if (name == "synthetic-sar") return sar_cfg(0);
    throw Error(ErrorKind::argument, "unknown builtin scenario: " + name);
}

CavityOutcome run_cavity_stability(const std::string& out_dir, long steps, int threads) {
    SimulationConfig cfg = cavity_cfg();
    if (steps > 0) cfg.setup.steps = steps;
    cfg.setup.threads = threads;
    cfg.out_dir = sub_out(out_dir, "cavity-stability");
    return CavityOutcome{run_scenario(cfg)};
}

TraverseOutcome run_traverse(double slab_sigma, const std::string& out_dir, int threads) {
    TraverseOutcome out;
    out.sigma = slab_sigma;
    const std::string tag = slab_sigma >= 1e6 ? "metal" : "lossy";
    for (int p = 0; p < 4; ++p) {
        SimulationConfig cfg = traverse_cfg(slab_sigma, p);
        cfg.setup.threads = threads;
        cfg.out_dir = sub_out(out_dir, cfg.name + "-" + tag);
        Simulation sim(cfg.setup);
        TraverseCase tc;
        tc.label = cfg.name;
        tc.report = run_scenario(cfg, sim);
        tc.probe = sim.probe_series()[0].value;
        if (p < 3) out.placements.push_back(std::move(tc));
        else out.all_fine = std::move(tc);
        out.dt = cfg.setup.dt;
    }
    for (const TraverseCase& a : out.placements)
        for (const TraverseCase& b : out.placements) {
            if (&a == &b) continue;
            out.pairwise_max_rel = std::max(out.pairwise_max_rel, rel_l2(a.probe, b.probe));
        }
    for (const TraverseCase& a : out.placements)
        out.vs_fine_max_rel = std::max(out.vs_fine_max_rel, rel_l2(a.probe, out.all_fine.probe));
    return out;
}

FourRodOutcome run_four_rod(const std::string& out_dir, int threads) {
    FourRodOutcome out;
    const auto run_case = [&](bool sg, bool rods, bool fine, RunReport* rep) {
        SimulationConfig cfg = four_rod_cfg(sg, rods, fine);
        cfg.setup.threads = threads;
        cfg.out_dir = sub_out(out_dir, cfg.name);
        Simulation sim(cfg.setup);
        RunReport r = run_scenario(cfg, sim);
        if (rep) *rep = r;
        return sim.probe_series()[0].value;
    };
    const std::vector<double> incident = run_case(false, false, false, nullptr);
    const std::vector<double> iface = run_case(true, false, false, nullptr);
    const std::vector<double> rods = run_case(true, true, false, &out.subgrid_report);
    run_case(false, true, true, &out.fine_report);

    const double dt = four_rod_cfg(true, true, false).setup.dt;
    const ReflectionSpectrum rs = compute_reflection(rods, incident, dt, 2e9, 30e9, 29);
    const ReflectionSpectrum is = compute_reflection(iface, incident, dt, 2e9, 30e9, 29);
    out.freq_hz = rs.freq_hz;
    out.rod_ratio = rs.ratio;
    out.iface_ratio = is.ratio;
    out.iface_below_rods = true;
    for (std::size_t k = 0; k < rs.ratio.size(); ++k)
        if (!(is.ratio[k] < rs.ratio[k])) out.iface_below_rods = false;
    out.subgrid_seconds = out.subgrid_report.wall_seconds;
    out.fine_seconds = out.fine_report.wall_seconds;
    out.speedup = out.subgrid_seconds > 0.0 ? out.fine_seconds / out.subgrid_seconds : 0.0;
    return out;
}

SarOutcome run_synthetic_sar(const std::string& out_dir, int threads) {
    SarOutcome out;
    double integ[3] = {0.0, 0.0, 0.0};
    for (int kind = 0; kind < 3; ++kind) {
        SimulationConfig cfg = sar_cfg(kind);
        cfg.setup.threads = threads;
        cfg.out_dir = sub_out(out_dir, cfg.name);
        Simulation sim(cfg.setup);
        run_scenario(cfg, sim);
        integ[kind] = sar_total(sim);
    }
    out.subgrid_integral = integ[0];
    out.fine_integral = integ[1];
    out.coarse_integral = integ[2];
    if (integ[1] > 0.0) {
        out.subgrid_vs_fine_rel = std::abs(integ[0] - integ[1]) / integ[1];
        out.coarse_vs_fine_rel = std::abs(integ[2] - integ[1]) / integ[1];
    }
    return out;
}

} // namespace tefdtd
