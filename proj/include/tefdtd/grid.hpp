#pragma once

#include <cstddef>
#include <vector>

namespace tefdtd {

/// Staggered 2D TE grid (E_x, E_y in-plane, H_z out of plane).
///
/// Primary cells are nx-by-ny with spacings dx, dy. Row-major, x fastest:
///   E_x edge (i,j): i in [0,nx),   j in [0,ny],  index i + j*nx,     at ((i+1/2)dx, j dy)
///   E_y edge (i,j): i in [0,nx],   j in [0,ny),  index i + j*(nx+1), at (i dx, (j+1/2)dy)
///   H_z node (i,j): i in [0,nx),   j in [0,ny),  index i + j*nx,     at ((i+1/2)dx, (j+1/2)dy)
/// H_z samples live on half-integer time steps, E on integer steps.
struct GridSpec {
    int nx = 1;
    int ny = 1;
    double dx = 1.0;
    double dy = 1.0;

    std::size_t n_ex() const { return std::size_t(nx) * std::size_t(ny + 1); }
    std::size_t n_ey() const { return std::size_t(nx + 1) * std::size_t(ny); }
    std::size_t n_hz() const { return std::size_t(nx) * std::size_t(ny); }
    std::size_t n_state() const { return n_ex() + n_ey() + n_hz(); }
    /// Hanging H ports, ordered south, north, west, east.
    std::size_t n_ports() const { return 2 * std::size_t(nx) + 2 * std::size_t(ny); }

    std::size_t ex_index(int i, int j) const { return std::size_t(i) + std::size_t(j) * nx; }
    std::size_t ey_index(int i, int j) const { return std::size_t(i) + std::size_t(j) * (nx + 1); }
    std::size_t hz_index(int i, int j) const { return std::size_t(i) + std::size_t(j) * nx; }

    /// Throws Error(argument) unless nx,ny >= 1 and dx,dy > 0.
    void validate() const;
};

/// Edge/cell material samples. E-edge permittivity and conductivity are the
/// arithmetic mean of the one or two adjacent primary cells; mu is sampled at
/// the cell (H node) itself.
struct MaterialMap {
    std::vector<double> eps_x;   // per E_x edge
    std::vector<double> sigma_x; // per E_x edge
    std::vector<double> eps_y;   // per E_y edge
    std::vector<double> sigma_y; // per E_y edge
    std::vector<double> mu;      // per H_z node

    static MaterialMap vacuum(const GridSpec& g);
    /// Builds edge/node samples from per-cell values (size n_hz each).
    static MaterialMap from_cells(const GridSpec& g,
                                  const std::vector<double>& eps_cell,
                                  const std::vector<double>& mu_cell,
                                  const std::vector<double>& sigma_cell);

    /// Throws Error(material) on size mismatch, eps/mu <= 0 or sigma < 0.
    void validate(const GridSpec& g) const;
};

struct TimeStep {
    double dt = 0.0; // seconds
};

/// Field state: E at step n, H_z at n-1/2, plus the hanging H variables just
/// outside each boundary (half a cell out, aligned with the boundary E rows).
/// Hanging values act as inputs u^{n+1/2}; they are consumed by boundary E
/// updates on ports and ignored entirely on PEC sides.
struct FieldState {
    std::vector<double> ex;
    std::vector<double> ey;
    std::vector<double> hz;
    std::vector<double> hang_s; // size nx
    std::vector<double> hang_n; // size nx
    std::vector<double> hang_w; // size ny
    std::vector<double> hang_e; // size ny
    long step_index = 0;

    static FieldState zeros(const GridSpec& g);
    /// Throws Error(state) on any size mismatch.
    void validate(const GridSpec& g) const;
};

/// Transverse dual length per E_x edge: dy, halved on the j=0 and j=ny rows
/// (the grid owns only half a cell beyond its boundary edges).
std::vector<double> dual_length_y(const GridSpec& g);
/// Transverse dual length per E_y edge: dx, halved on the i=0 and i=nx columns.
std::vector<double> dual_length_x(const GridSpec& g);

} // namespace tefdtd
