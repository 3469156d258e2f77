#include "tefdtd/update.hpp"

#include <algorithm>
#include <cstring>

#include "tefdtd/error.hpp"

namespace tefdtd {

void update_hz(FieldState& state, const MaterialMap& mat, const GridSpec& g, TimeStep ts) {
    const double inv_dy = 1.0 / g.dy;
    const double inv_dx = 1.0 / g.dx;
    for (int j = 0; j < g.ny; ++j) {
        for (int i = 0; i < g.nx; ++i) {
            const std::size_t c = g.hz_index(i, j);
            const double curl = (state.ex[g.ex_index(i, j + 1)] - state.ex[g.ex_index(i, j)]) * inv_dy -
                                (state.ey[g.ey_index(i + 1, j)] - state.ey[g.ey_index(i, j)]) * inv_dx;
            state.hz[c] += ts.dt / mat.mu[c] * curl;
        }
    }
}

namespace {

inline double advance_e(double e, double eps, double sigma, double dt, double curl_over_l) {
    const double a = eps / dt;
    const double b = 0.5 * sigma;
    return ((a - b) * e + curl_over_l) / (a + b);
}

} // namespace

void update_e(FieldState& state, const MaterialMap& mat, const GridSpec& g, TimeStep ts,
              const BoundaryModes& modes) {
    const double dt = ts.dt;
    const double inv_dy = 1.0 / g.dy;
    const double inv_dx = 1.0 / g.dx;
    const double inv_hdy = 2.0 / g.dy;
    const double inv_hdx = 2.0 / g.dx;

    // Interior rows first, then boundary rows (fixed order for determinism).
    for (int j = 1; j < g.ny; ++j) {
        for (int i = 0; i < g.nx; ++i) {
            const std::size_t e = g.ex_index(i, j);
            const double curl = (state.hz[g.hz_index(i, j)] - state.hz[g.hz_index(i, j - 1)]) * inv_dy;
            state.ex[e] = advance_e(state.ex[e], mat.eps_x[e], mat.sigma_x[e], dt, curl);
        }
    }
    for (int j = 0; j < g.ny; ++j) {
        for (int i = 1; i < g.nx; ++i) {
            const std::size_t e = g.ey_index(i, j);
            const double curl = (state.hz[g.hz_index(i - 1, j)] - state.hz[g.hz_index(i, j)]) * inv_dx;
            state.ey[e] = advance_e(state.ey[e], mat.eps_y[e], mat.sigma_y[e], dt, curl);
        }
    }

    if (modes.south == SideMode::pec) {
        for (int i = 0; i < g.nx; ++i) state.ex[g.ex_index(i, 0)] = 0.0;
    } else {
        for (int i = 0; i < g.nx; ++i) {
            const std::size_t e = g.ex_index(i, 0);
            const double curl = (state.hz[g.hz_index(i, 0)] - state.hang_s[i]) * inv_hdy;
            state.ex[e] = advance_e(state.ex[e], mat.eps_x[e], mat.sigma_x[e], dt, curl);
        }
    }
    if (modes.north == SideMode::pec) {
        for (int i = 0; i < g.nx; ++i) state.ex[g.ex_index(i, g.ny)] = 0.0;
    } else {
        for (int i = 0; i < g.nx; ++i) {
            const std::size_t e = g.ex_index(i, g.ny);
            const double curl = (state.hang_n[i] - state.hz[g.hz_index(i, g.ny - 1)]) * inv_hdy;
            state.ex[e] = advance_e(state.ex[e], mat.eps_x[e], mat.sigma_x[e], dt, curl);
        }
    }
    if (modes.west == SideMode::pec) {
        for (int j = 0; j < g.ny; ++j) state.ey[g.ey_index(0, j)] = 0.0;
    } else {
        for (int j = 0; j < g.ny; ++j) {
            const std::size_t e = g.ey_index(0, j);
            const double curl = (state.hang_w[j] - state.hz[g.hz_index(0, j)]) * inv_hdx;
            state.ey[e] = advance_e(state.ey[e], mat.eps_y[e], mat.sigma_y[e], dt, curl);
        }
    }
    if (modes.east == SideMode::pec) {
        for (int j = 0; j < g.ny; ++j) state.ey[g.ey_index(g.nx, j)] = 0.0;
    } else {
        for (int j = 0; j < g.ny; ++j) {
            const std::size_t e = g.ey_index(g.nx, j);
            const double curl = (state.hz[g.hz_index(g.nx - 1, j)] - state.hang_e[j]) * inv_hdx;
            state.ey[e] = advance_e(state.ey[e], mat.eps_y[e], mat.sigma_y[e], dt, curl);
        }
    }
}

void leapfrog_step(FieldState& state, const MaterialMap& mat, const GridSpec& g, TimeStep ts,
                   const BoundaryModes& modes) {
    if (!(ts.dt > 0.0)) throw Error(ErrorKind::argument, "leapfrog_step: dt must be positive");
    update_hz(state, mat, g, ts);
    update_e(state, mat, g, ts, modes);
    ++state.step_index;
}

std::vector<double> boundary_outputs(const FieldState& state, const GridSpec& g) {
    std::vector<double> y;
    y.reserve(g.n_ports());
    for (int i = 0; i < g.nx; ++i) y.push_back(state.ex[g.ex_index(i, 0)]);
    for (int i = 0; i < g.nx; ++i) y.push_back(state.ex[g.ex_index(i, g.ny)]);
    for (int j = 0; j < g.ny; ++j) y.push_back(state.ey[g.ey_index(0, j)]);
    for (int j = 0; j < g.ny; ++j) y.push_back(state.ey[g.ey_index(g.nx, j)]);
    return y;
}

std::vector<double> port_inputs(const FieldState& state, const GridSpec& g) {
    std::vector<double> u;
    u.reserve(g.n_ports());
    u.insert(u.end(), state.hang_s.begin(), state.hang_s.end());
    u.insert(u.end(), state.hang_n.begin(), state.hang_n.end());
    u.insert(u.end(), state.hang_w.begin(), state.hang_w.end());
    u.insert(u.end(), state.hang_e.begin(), state.hang_e.end());
    return u;
}

std::vector<double> pack_state(const FieldState& state, const GridSpec& g) {
    std::vector<double> x;
    x.reserve(g.n_state());
    x.insert(x.end(), state.ex.begin(), state.ex.end());
    x.insert(x.end(), state.ey.begin(), state.ey.end());
    x.insert(x.end(), state.hz.begin(), state.hz.end());
    return x;
}

void unpack_state(std::span<const double> x, FieldState& state, const GridSpec& g) {
    if (x.size() != g.n_state())
        throw Error(ErrorKind::argument, "unpack_state: vector size does not match grid");
    std::copy_n(x.begin(), g.n_ex(), state.ex.begin());
    std::copy_n(x.begin() + g.n_ex(), g.n_ey(), state.ey.begin());
    std::copy_n(x.begin() + g.n_ex() + g.n_ey(), g.n_hz(), state.hz.begin());
}

} // namespace tefdtd
