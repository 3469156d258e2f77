#include "tefdtd/grid.hpp"

#include <string>

#include "tefdtd/constants.hpp"
#include "tefdtd/error.hpp"

namespace tefdtd {

void GridSpec::validate() const {
    if (nx < 1 || ny < 1)
        throw Error(ErrorKind::argument, "grid: nx and ny must be >= 1 (got " +
                                             std::to_string(nx) + "x" + std::to_string(ny) + ")");
    if (!(dx > 0.0) || !(dy > 0.0))
        throw Error(ErrorKind::argument, "grid: dx and dy must be positive");
}

MaterialMap MaterialMap::vacuum(const GridSpec& g) {
    MaterialMap m;
    m.eps_x.assign(g.n_ex(), eps0);
    m.sigma_x.assign(g.n_ex(), 0.0);
    m.eps_y.assign(g.n_ey(), eps0);
    m.sigma_y.assign(g.n_ey(), 0.0);
    m.mu.assign(g.n_hz(), mu0);
    return m;
}

MaterialMap MaterialMap::from_cells(const GridSpec& g,
                                    const std::vector<double>& eps_cell,
                                    const std::vector<double>& mu_cell,
                                    const std::vector<double>& sigma_cell) {
    if (eps_cell.size() != g.n_hz() || mu_cell.size() != g.n_hz() || sigma_cell.size() != g.n_hz())
        throw Error(ErrorKind::argument, "from_cells: per-cell arrays must have nx*ny entries");
    MaterialMap m;
    m.eps_x.resize(g.n_ex());
    m.sigma_x.resize(g.n_ex());
    m.eps_y.resize(g.n_ey());
    m.sigma_y.resize(g.n_ey());
    m.mu = mu_cell;
    // E_x edge (i,j) borders cells (i,j-1) below and (i,j) above.
    for (int j = 0; j <= g.ny; ++j) {
        for (int i = 0; i < g.nx; ++i) {
            const std::size_t e = g.ex_index(i, j);
            double eps = 0.0, sig = 0.0;
            int cnt = 0;
            if (j > 0) {
                eps += eps_cell[g.hz_index(i, j - 1)];
                sig += sigma_cell[g.hz_index(i, j - 1)];
                ++cnt;
            }
            if (j < g.ny) {
                eps += eps_cell[g.hz_index(i, j)];
                sig += sigma_cell[g.hz_index(i, j)];
                ++cnt;
            }
            m.eps_x[e] = eps / cnt;
            m.sigma_x[e] = sig / cnt;
        }
    }
    // E_y edge (i,j) borders cells (i-1,j) left and (i,j) right.
    for (int j = 0; j < g.ny; ++j) {
        for (int i = 0; i <= g.nx; ++i) {
            const std::size_t e = g.ey_index(i, j);
            double eps = 0.0, sig = 0.0;
            int cnt = 0;
            if (i > 0) {
                eps += eps_cell[g.hz_index(i - 1, j)];
                sig += sigma_cell[g.hz_index(i - 1, j)];
                ++cnt;
            }
            if (i < g.nx) {
                eps += eps_cell[g.hz_index(i, j)];
                sig += sigma_cell[g.hz_index(i, j)];
                ++cnt;
            }
            m.eps_y[e] = eps / cnt;
            m.sigma_y[e] = sig / cnt;
        }
    }
    return m;
}

void MaterialMap::validate(const GridSpec& g) const {
    if (eps_x.size() != g.n_ex() || sigma_x.size() != g.n_ex() || eps_y.size() != g.n_ey() ||
        sigma_y.size() != g.n_ey() || mu.size() != g.n_hz())
        throw Error(ErrorKind::material, "material map: array sizes do not match grid");
    for (double v : eps_x)
        if (!(v > 0.0)) throw Error(ErrorKind::material, "material map: eps_x must be positive");
    for (double v : eps_y)
        if (!(v > 0.0)) throw Error(ErrorKind::material, "material map: eps_y must be positive");
    for (double v : mu)
        if (!(v > 0.0)) throw Error(ErrorKind::material, "material map: mu must be positive");
    for (double v : sigma_x)
        if (v < 0.0) throw Error(ErrorKind::material, "material map: sigma_x must be non-negative");
    for (double v : sigma_y)
        if (v < 0.0) throw Error(ErrorKind::material, "material map: sigma_y must be non-negative");
}

FieldState FieldState::zeros(const GridSpec& g) {
    FieldState s;
    s.ex.assign(g.n_ex(), 0.0);
    s.ey.assign(g.n_ey(), 0.0);
    s.hz.assign(g.n_hz(), 0.0);
    s.hang_s.assign(std::size_t(g.nx), 0.0);
    s.hang_n.assign(std::size_t(g.nx), 0.0);
    s.hang_w.assign(std::size_t(g.ny), 0.0);
    s.hang_e.assign(std::size_t(g.ny), 0.0);
    return s;
}

void FieldState::validate(const GridSpec& g) const {
    if (ex.size() != g.n_ex() || ey.size() != g.n_ey() || hz.size() != g.n_hz() ||
        hang_s.size() != std::size_t(g.nx) || hang_n.size() != std::size_t(g.nx) ||
        hang_w.size() != std::size_t(g.ny) || hang_e.size() != std::size_t(g.ny))
        throw Error(ErrorKind::state, "field state: array sizes do not match grid");
}

std::vector<double> dual_length_y(const GridSpec& g) {
    std::vector<double> l(g.n_ex(), g.dy);
    for (int i = 0; i < g.nx; ++i) {
        l[g.ex_index(i, 0)] = 0.5 * g.dy;
        l[g.ex_index(i, g.ny)] = 0.5 * g.dy;
    }
    return l;
}

std::vector<double> dual_length_x(const GridSpec& g) {
    std::vector<double> l(g.n_ey(), g.dx);
    for (int j = 0; j < g.ny; ++j) {
        l[g.ey_index(0, j)] = 0.5 * g.dx;
        l[g.ey_index(g.nx, j)] = 0.5 * g.dx;
    }
    return l;
}

} // namespace tefdtd
