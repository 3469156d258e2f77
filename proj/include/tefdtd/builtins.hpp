#pragma once

#include <string>
#include <vector>

#include "tefdtd/scenario.hpp"

namespace tefdtd {

struct BuiltinInfo {
    std::string name;
    std::string summary;
};

/// The packaged scenarios: cavity-stability, material-traverse, four-rod,
/// synthetic-sar.
const std::vector<BuiltinInfo>& builtin_list();
bool is_builtin(const std::string& name);

/// The representative single-run config for a builtin (what `analyze` and
/// config export operate on). `run` executes the full orchestration instead.
SimulationConfig builtin_config(const std::string& name);

/// Refined cavity ring-down with the energy audit on: a pulsed source rings a
/// closed cavity whose centre is covered by a refinement patch, and every
/// step's dissipation slack is checked.
struct CavityOutcome {
    RunReport report;
};
CavityOutcome run_cavity_stability(const std::string& out_dir, long steps, int threads);

/// A lossy slab is crossed by a pulse while the refinement patch that
/// contains it is parked at three different offsets; the through probe must
/// not care where the patch sits, and must track the uniformly fine
/// reference.
struct TraverseCase {
    std::string label;
    std::vector<double> probe;
    RunReport report;
};
struct TraverseOutcome {
    double sigma = 0.0;
    double dt = 0.0;
    std::vector<TraverseCase> placements;
    TraverseCase all_fine;
    double pairwise_max_rel = 0.0;
    double vs_fine_max_rel = 0.0;
};
TraverseOutcome run_traverse(double slab_sigma, const std::string& out_dir, int threads);

/// Four conducting rods inside a refinement patch in a parallel-plate guide.
/// Reflection off the patch alone (rods removed) is compared bin by bin
/// against reflection off the rods, and the refined run is timed against the
/// uniformly fine one.
struct FourRodOutcome {
    std::vector<double> freq_hz;
    std::vector<double> rod_ratio;
    std::vector<double> iface_ratio;
    bool iface_below_rods = false;
    double subgrid_seconds = 0.0;
    double fine_seconds = 0.0;
    double speedup = 0.0;
    RunReport subgrid_report;
    RunReport fine_report;
};
FourRodOutcome run_four_rod(const std::string& out_dir, int threads);

/// A pulsed source illuminates a two-tissue disc; local absorption is
/// integrated from tracked field peaks on three discretizations of the same
/// problem: refined patch over the tissue, uniformly fine, uniformly coarse.
struct SarOutcome {
    double subgrid_integral = 0.0;
    double fine_integral = 0.0;
    double coarse_integral = 0.0;
    double subgrid_vs_fine_rel = 0.0;
    double coarse_vs_fine_rel = 0.0;
};
SarOutcome run_synthetic_sar(const std::string& out_dir, int threads);

} // namespace tefdtd
