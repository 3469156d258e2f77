#pragma once

#include <span>
#include <vector>

#include "tefdtd/grid.hpp"

namespace tefdtd {

/// Boundary handling for the four sides of a rectangular region.
///  - pec: boundary E is pinned to zero; the side's hanging H is never read.
///  - port: boundary E updates against the side's hanging H variables, which
///    the caller supplies per step (inputs at n+1/2).
enum class SideMode { pec, port };

struct BoundaryModes {
    SideMode south = SideMode::pec;
    SideMode north = SideMode::pec;
    SideMode west = SideMode::pec;
    SideMode east = SideMode::pec;

    static BoundaryModes all_pec() { return {}; }
    static BoundaryModes all_port() {
        return {SideMode::port, SideMode::port, SideMode::port, SideMode::port};
    }
};

/// Advances H_z from n-1/2 to n+1/2 using E at n:
///   hz += (dt/mu) * [ (ex_above - ex_below)/dy - (ey_right - ey_left)/dx ]
/// Every H node has all four E neighbours inside the region, so no boundary
/// cases arise here.
void update_hz(FieldState& state, const MaterialMap& mat, const GridSpec& g, TimeStep ts);

/// Advances E from n to n+1 using H_z at n+1/2:
///   (eps/dt + sigma/2) e_next = (eps/dt - sigma/2) e + (curl H)/l'
/// where l' is the transverse dual length (halved on boundary rows). Boundary
/// rows on port sides consume the hanging H values with the same curl sign as
/// the interior stencil; PEC rows are written as zero.
void update_e(FieldState& state, const MaterialMap& mat, const GridSpec& g, TimeStep ts,
              const BoundaryModes& modes);

/// One full leapfrog step: update_hz then update_e. Increments step_index.
void leapfrog_step(FieldState& state, const MaterialMap& mat, const GridSpec& g, TimeStep ts,
                   const BoundaryModes& modes);

/// Boundary E samples stacked in port order (south, north, west, east);
/// these are the system outputs paired with the hanging-H inputs.
std::vector<double> boundary_outputs(const FieldState& state, const GridSpec& g);

/// Hanging H values stacked in port order (south, north, west, east).
std::vector<double> port_inputs(const FieldState& state, const GridSpec& g);

/// State vector [ex; ey; hz] used by the descriptor form.
std::vector<double> pack_state(const FieldState& state, const GridSpec& g);
void unpack_state(std::span<const double> x, FieldState& state, const GridSpec& g);

} // namespace tefdtd
