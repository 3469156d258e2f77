#pragma once

#include <cstdint>
#include <iosfwd>
#include <limits>
#include <span>
#include <vector>

#include "tefdtd/grid.hpp"

namespace tefdtd {

struct DescriptorSystem;

/// Discrete stored energy per unit length (J/m) of the state (E^n, H^{n-1/2}),
/// evaluated with the companion half-step H^{n+1/2}:
///
///   E = 1/2 sum eps lx l'y Ex^2 + 1/2 sum eps ly l'x Ey^2
///     + 1/2 sum mu dx dy Hz^{n-1/2} Hz^{n+1/2}
///
/// The cross product in the H term is what makes the quantity decay exactly
/// monotonically for lossy, source-free stepping; it equals (dt/2) x^T R x
/// when hz_next comes from the curl-only H update.
double storage_energy(const FieldState& state, std::span<const double> hz_next,
                      const MaterialMap& mat, const GridSpec& g, TimeStep ts);

/// Energy absorbed through the ports over one step (J/m), trapezoidal in the
/// boundary E outputs:
///
///   s = dt * avg(y^n, y^{n+1})^T (L^T B) u^{n+1/2}
///
/// with L^T B = diag(-dx I, +dx I, +dy I, -dy I) in (south, north, west, east)
/// port order. y and u are stacked in that order.
double supply_rate(std::span<const double> y_n, std::span<const double> y_np1,
                   std::span<const double> u, const GridSpec& g, TimeStep ts);

struct LedgerRecord {
    long step = 0;
    double time_s = 0.0;
    double storage = 0.0; // E(x^n), J/m
    double supply = 0.0;  // s over n -> n+1, J/m
    double slack = 0.0;   // supply - (E(x^{n+1}) - E(x^n)); >= 0 when dissipative
    bool violation = false;
};

/// Per-step energy accounting. A step is flagged when the dissipation
/// inequality fails beyond tolerance: slack < -(tol_abs + tol_rel * E(x^n)).
struct EnergyLedger {
    double tol_rel = 1e-10;
    double tol_abs = 1e-20; // J/m
    std::vector<LedgerRecord> records;
    long violations = 0;
    double min_slack = std::numeric_limits<double>::infinity();

    /// Appends the record for step n and returns its violation flag.
    bool audit_step(long step, double time_s, double storage_before, double storage_after,
                    double supply);
    void write_csv(std::ostream& os) const;
};

/// Per-cell time step limits (seconds, one per primary cell):
///
///   dt < [ (1/(2 dx^2 mu)) (1/eps_y,left + 1/eps_y,right)
///        + (1/(2 dy^2 mu)) (1/eps_x,bottom + 1/eps_x,top) ]^{-1/2}
///
/// Satisfying the minimum over all cells is sufficient for a positive
/// definite R (it is the local, conservative bound).
std::vector<double> cfl_per_cell(const MaterialMap& mat, const GridSpec& g);
double cfl_per_cell_min(const MaterialMap& mat, const GridSpec& g);

inline constexpr std::uint64_t default_power_seed = 0x7e0fd7d5u;

struct CflResult {
    double dt_max = 0.0;    // 2 / sigma_max
    double sigma_max = 0.0; // largest singular value of the scaled curl map
    int iterations = 0;
    bool converged = false;
    std::uint64_t seed = default_power_seed;
};

/// Exact global stability limit: dt_max = 2 / sigma_max(S) where S is the
/// symmetrically scaled curl map whose largest singular value controls the
/// positive definiteness of R. Found by power iteration on S S^T, matrix
/// free (S S^T is never formed), from a fixed seeded start vector, stopping
/// at relative eigenvalue change <= tol. Always >= the per-cell bound.
CflResult cfl_global(const GridSpec& g, const MaterialMap& mat, double tol = 1e-10,
                     int max_iterations = 100000, std::uint64_t seed = default_power_seed);

struct StabilityReport {
    double dt = 0.0;
    double dt_max_global = 0.0;
    double dt_max_percell = 0.0;
    std::vector<double> percell;
    double sigma_max = 0.0;
    int power_iterations = 0;
    std::uint64_t seed = 0;
    bool r_spd = false;     // dt strictly below the global limit
    bool losses_ok = false; // all conductivities >= 0
    bool ports_ok = false;  // B == L (L^T B) exactly
    bool dissipative() const { return r_spd && losses_ok && ports_ok; }
};

/// Checks the three dissipativity conditions for the assembled one-step form:
/// R symmetric positive definite (via the global dt limit), losses positive
/// semidefinite (entrywise sigma >= 0), and the port coupling identity
/// B = L (L^T B) (exact, the assembly uses exact +-1 selections).
StabilityReport verify_theorem1(const DescriptorSystem& sys, const MaterialMap& mat,
                                const GridSpec& g, TimeStep ts);

} // namespace tefdtd
