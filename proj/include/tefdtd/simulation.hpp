#pragma once

#include <cstdint>
#include <string>
#include <vector>

#include "tefdtd/absorbing.hpp"
#include "tefdtd/dissipativity.hpp"
#include "tefdtd/grid.hpp"
#include "tefdtd/subgrid.hpp"

namespace tefdtd {

/// Painted material patch; later regions overwrite earlier ones, background
/// is vacuum. rho > 0 marks tissue cells for SAR accounting.
struct MaterialRegion {
    enum class Shape { rect, disc };
    Shape shape = Shape::rect;
    double x0 = 0, y0 = 0, x1 = 0, y1 = 0; // rect corners, meters
    double cx = 0, cy = 0, radius = 0;     // disc
    double eps_r = 1.0;
    double mu_r = 1.0;
    double sigma = 0.0;
    double rho = 0.0; // kg/m^3

    bool contains(double x, double y) const;
    void validate(int index) const;
};

struct AuditSpec {
    bool enabled = true;
    bool interface_check = true;
    double tol_rel = 1e-10;
    double tol_abs = 1e-20;
};

struct SimulationSetup {
    GridSpec grid; // coarse grid
    std::vector<MaterialRegion> materials;
    std::vector<SubgridRegion> subgrids;
    BoundarySpec boundaries;
    PmlSpec pml;
    std::vector<SourceSpec> sources;
    std::vector<ProbeSpec> probes;
    long steps = 0;
    double dt = 0.0;           // explicit when > 0
    double cfl_fraction = 0.99; // used when dt == 0, applied to the per-cell minimum
    AuditSpec audit;
    bool track_peaks = false;
    double peak_window_start = 0.0, peak_window_end = 0.0;
    int threads = 1;
    std::uint64_t seed = 1; // recorded in reports; stepping itself is deterministic
};

/// Edge/node classification inside a patch.
enum : std::uint8_t {
    node_interior = 0,  // standard update
    node_pinned = 1,    // PEC boundary row, held at zero
    node_masked = 2,    // coarse entry covered by a fine region
    node_interface = 3, // coarse edge on a refinement boundary (merged update)
    node_view = 4       // fine boundary edge, copy of the coarse interface E
};

/// One rectangular grid patch: the coarse grid (index 0) or a fine region.
struct Patch {
    GridSpec g;
    double ox = 0.0, oy = 0.0; // origin of node (0,0), meters
    MaterialMap mat;
    std::vector<double> eps_cell, mu_cell, sigma_cell, rho_cell;

    std::vector<double> ex, ey, hz;
    std::vector<double> hz_prev; // audit only

    // Precomputed update weights: e = cax e + ccx (dh) + cbx psi, hz += ch curl.
    std::vector<double> cax, ccx, cbx;
    std::vector<double> cay, ccy, cby;
    std::vector<double> ch;
    std::vector<double> lpy, lpx; // transverse dual lengths

    std::vector<std::uint8_t> excls, eycls;
    std::vector<std::uint8_t> hzmask; // 1 = active

    // Storage weights (0 where masked): 1/2 eps dx l'y, 1/2 eps dy l'x, 1/2 mu dx dy.
    std::vector<double> wex, wey, wh;

    PmlData pml;
    bool has_pml = false;

    std::vector<double> ex_peak, ey_peak;
};

/// Coupled time stepper over the coarse patch and its fine regions.
///
/// Step phases: (1) H update everywhere from the current E; (2) soft source
/// injection; (3) interior E updates; (4) merged updates of the coarse
/// interface E edges against the coarse H below and the mean fine H above;
/// (5) copy of interface E onto the fine boundary views. Both grids share the
/// same dt. The energy ledger runs alongside when enabled: storage uses the
/// half-step H product, supply is the exact discrete energy injected by the
/// sources, and the per-step slack is the dissipated energy, which must be
/// non-negative below the stability limit.
class Simulation {
public:
    explicit Simulation(const SimulationSetup& setup);

    void step();
    /// Runs setup.steps (or n) steps; stops early if a field diverges.
    void run();
    void run(long n);

    double dt() const { return dt_; }
    long steps_done() const { return steps_done_; }
    bool diverged() const { return diverged_; }

    const EnergyLedger& ledger() const { return ledger_; }
    const std::vector<ProbeSeries>& probe_series() const { return probe_series_; }

    std::size_t patch_count() const { return patches_.size(); }
    const Patch& patch(std::size_t i) const { return patches_[i]; }
    /// Direct state access for seeding initial conditions before stepping.
    Patch& patch_mut(std::size_t i) { return patches_[i]; }

    double max_hz() const { return max_hz_; }
    /// Running max of |H_z| over the first `prefix_steps` steps (default 10^4).
    double max_hz_prefix() const { return max_hz_prefix_; }
    void set_prefix_steps(long n) { prefix_steps_ = n; }

    /// Largest |sum of per-edge interface supply| seen in a step, absolute
    /// and relative to that step's storage.
    double max_interface_supply_abs() const { return max_iface_abs_; }
    double max_interface_supply_rel() const { return max_iface_rel_; }

    /// Storage of the current state; needs one extra curl-only H half step,
    /// so it is only available when auditing (last audited value otherwise 0).
    double last_storage() const { return storage_prev_; }

    const SimulationSetup& setup() const { return setup_; }

private:
    struct IfaceEdge {
        std::size_t patch;  // fine patch index (>= 1)
        std::uint8_t side;  // 0 S, 1 N, 2 W, 3 E (fine-region side)
        double fine_sign;   // +1 when the fine mean enters the curl positively
        std::size_t ce;     // coarse edge index (ex for S/N, ey for W/E)
        std::size_t chn;    // coarse interior H neighbour
        std::size_t fh0, fhs;
        std::size_t fe0, fes;
        double c_keep, c_drive;
        double cap_c, cam_c;         // coarse half-cell equation factors
        double capf_mean, camf_mean; // fine half-cell factors, averaged over r
        double edge_len;
    };

    struct SourceBinding {
        SourceSpec spec;
        std::size_t patch;
        std::size_t node;
        double cell_area;
    };

    struct ProbeBinding {
        ProbeSpec spec;
        std::size_t patch;
        std::size_t index;
        int series;
    };

    void build_patch(Patch& p, const BoundarySpec& sides);
    void classify_coarse();
    void build_interfaces();
    void resolve_points();
    void h_pass(Patch& p);
    void h_pml_pass(Patch& p);
    void e_pass(Patch& p);
    void e_pml_pass(Patch& p);
    void interface_pass();
    void view_pass();
    void observe();

    SimulationSetup setup_;
    double dt_ = 0.0;
    long steps_done_ = 0;
    bool diverged_ = false;
    int threads_ = 1;

    std::vector<Patch> patches_; // [0] = coarse
    std::vector<IfaceEdge> iface_;
    std::vector<SourceBinding> sources_;
    std::vector<ProbeBinding> probes_;
    std::vector<ProbeSeries> probe_series_;

    EnergyLedger ledger_;
    bool have_prev_ = false;
    double storage_prev_ = 0.0;
    double supply_prev_ = 0.0;

    double max_hz_ = 0.0;
    double max_hz_prefix_ = 0.0;
    long prefix_steps_ = 10000;
    double max_iface_abs_ = 0.0;
    double max_iface_rel_ = 0.0;
    double iface_step_sum_ = 0.0;
};

/// Paints per-cell material values for a patch grid at the given origin.
void paint_cells(const GridSpec& g, double ox, double oy,
                 const std::vector<MaterialRegion>& regions, std::vector<double>& eps_cell,
                 std::vector<double>& mu_cell, std::vector<double>& sigma_cell,
                 std::vector<double>& rho_cell);

} // namespace tefdtd
