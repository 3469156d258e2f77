#include "tefdtd/simulation.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <string>

#include "tefdtd/constants.hpp"
#include "tefdtd/dissipativity.hpp"
#include "tefdtd/error.hpp"

namespace tefdtd {

bool MaterialRegion::contains(double x, double y) const {
    if (shape == Shape::rect) return x >= x0 && x <= x1 && y >= y0 && y <= y1;
    const double rx = x - cx, ry = y - cy;
    return rx * rx + ry * ry <= radius * radius;
}

void MaterialRegion::validate(int index) const {
    const std::string at = "material[" + std::to_string(index) + "]";
    if (!(eps_r > 0.0)) throw Error(ErrorKind::config, at + ".eps_r: must be > 0");
    if (!(mu_r > 0.0)) throw Error(ErrorKind::config, at + ".mu_r: must be > 0");
    if (sigma < 0.0) throw Error(ErrorKind::config, at + ".sigma: must be >= 0");
    if (rho < 0.0) throw Error(ErrorKind::config, at + ".rho: must be >= 0");
    if (shape == Shape::rect) {
        if (x1 <= x0 || y1 <= y0)
            throw Error(ErrorKind::config, at + ": rect needs x1 > x0 and y1 > y0");
    } else if (!(radius > 0.0)) {
        throw Error(ErrorKind::config, at + ".radius: must be > 0");
    }
}

void paint_cells(const GridSpec& g, double ox, double oy,
                 const std::vector<MaterialRegion>& regions, std::vector<double>& eps_cell,
                 std::vector<double>& mu_cell, std::vector<double>& sigma_cell,
                 std::vector<double>& rho_cell) {
    const std::size_t n = g.n_hz();
    eps_cell.assign(n, eps0);
    mu_cell.assign(n, mu0);
    sigma_cell.assign(n, 0.0);
    rho_cell.assign(n, 0.0);
    for (int j = 0; j < g.ny; ++j) {
        const double y = oy + (j + 0.5) * g.dy;
        for (int i = 0; i < g.nx; ++i) {
            const double x = ox + (i + 0.5) * g.dx;
            const std::size_t k = g.hz_index(i, j);
            for (const MaterialRegion& r : regions) {
                if (!r.contains(x, y)) continue;
                eps_cell[k] = r.eps_r * eps0;
                mu_cell[k] = r.mu_r * mu0;
                sigma_cell[k] = r.sigma;
                rho_cell[k] = r.rho;
            }
        }
    }
}

namespace {

void build_coeffs(Patch& p, double dt) {
    const GridSpec& g = p.g;
    const std::size_t nex = g.n_ex(), ney = g.n_ey(), nhz = g.n_hz();
    p.cax.resize(nex);
    p.ccx.resize(nex);
    p.cbx.resize(nex);
    p.wex.resize(nex);
    for (std::size_t k = 0; k < nex; ++k) {
        const double cap = p.mat.eps_x[k] / dt + 0.5 * p.mat.sigma_x[k];
        const double cam = p.mat.eps_x[k] / dt - 0.5 * p.mat.sigma_x[k];
        p.cax[k] = cam / cap;
        p.ccx[k] = 1.0 / (p.lpy[k] * cap);
        p.cbx[k] = 1.0 / cap;
        p.wex[k] = p.excls[k] == node_masked ? 0.0 : 0.5 * g.dx * p.lpy[k] * p.mat.eps_x[k];
    }
    p.cay.resize(ney);
    p.ccy.resize(ney);
    p.cby.resize(ney);
    p.wey.resize(ney);
    for (std::size_t k = 0; k < ney; ++k) {
        const double cap = p.mat.eps_y[k] / dt + 0.5 * p.mat.sigma_y[k];
        const double cam = p.mat.eps_y[k] / dt - 0.5 * p.mat.sigma_y[k];
        p.cay[k] = cam / cap;
        p.ccy[k] = 1.0 / (p.lpx[k] * cap);
        p.cby[k] = 1.0 / cap;
        p.wey[k] = p.eycls[k] == node_masked ? 0.0 : 0.5 * g.dy * p.lpx[k] * p.mat.eps_y[k];
    }
    p.ch.resize(nhz);
    p.wh.resize(nhz);
    for (std::size_t k = 0; k < nhz; ++k) {
        p.ch[k] = dt / p.mat.mu[k];
        p.wh[k] = p.hzmask[k] ? 0.5 * g.dx * g.dy * p.mat.mu[k] : 0.0;
    }
}

} // namespace

Simulation::Simulation(const SimulationSetup& setup) : setup_(setup) {
    setup_.grid.validate();
    if (setup_.steps < 0) throw Error(ErrorKind::argument, "steps: must be >= 0");
    if (setup_.threads < 1) setup_.threads = 1;
    threads_ = setup_.threads;
    if (!(setup_.cfl_fraction > 0.0) || setup_.cfl_fraction > 1.0)
        throw Error(ErrorKind::config, "cfl_fraction: must be in (0, 1]");
    for (std::size_t i = 0; i < setup_.materials.size(); ++i)
        setup_.materials[i].validate(int(i));
    for (const SubgridRegion& r : setup_.subgrids) r.validate(setup_.grid);
    for (std::size_t a = 0; a < setup_.subgrids.size(); ++a)
        for (std::size_t b = a + 1; b < setup_.subgrids.size(); ++b)
            if (setup_.subgrids[a].conflicts(setup_.subgrids[b]))
                throw Error(ErrorKind::config,
                            "subgrid: regions " + std::to_string(a) + " and " + std::to_string(b) +
                                " must be separated by at least one coarse cell");
    for (const SourceSpec& s : setup_.sources) s.validate();
    for (const ProbeSpec& p : setup_.probes) p.validate();
    if (setup_.track_peaks && !(setup_.peak_window_end > setup_.peak_window_start))
        throw Error(ErrorKind::config, "peak window: end must be after start");

    patches_.resize(1 + setup_.subgrids.size());
    patches_[0].g = setup_.grid;
    for (std::size_t r = 0; r < setup_.subgrids.size(); ++r) {
        const SubgridRegion& sg = setup_.subgrids[r];
        Patch& f = patches_[r + 1];
        f.g = sg.fine_grid(setup_.grid);
        f.ox = sg.i0 * setup_.grid.dx;
        f.oy = sg.j0 * setup_.grid.dy;
    }

    for (Patch& p : patches_) {
        paint_cells(p.g, p.ox, p.oy, setup_.materials, p.eps_cell, p.mu_cell, p.sigma_cell,
                    p.rho_cell);
        p.mat = MaterialMap::from_cells(p.g, p.eps_cell, p.mu_cell, p.sigma_cell);
        p.lpy = dual_length_y(p.g);
        p.lpx = dual_length_x(p.g);
        p.excls.assign(p.g.n_ex(), node_interior);
        p.eycls.assign(p.g.n_ey(), node_interior);
        p.hzmask.assign(p.g.n_hz(), 1);
        p.ex.assign(p.g.n_ex(), 0.0);
        p.ey.assign(p.g.n_ey(), 0.0);
        p.hz.assign(p.g.n_hz(), 0.0);
    }

    classify_coarse();
    for (std::size_t r = 0; r < setup_.subgrids.size(); ++r) {
        Patch& f = patches_[r + 1];
        const int fnx = f.g.nx, fny = f.g.ny;
        for (int i = 0; i < fnx; ++i) {
            f.excls[f.g.ex_index(i, 0)] = node_view;
            f.excls[f.g.ex_index(i, fny)] = node_view;
        }
        for (int j = 0; j < fny; ++j) {
            f.eycls[f.g.ey_index(0, j)] = node_view;
            f.eycls[f.g.ey_index(fnx, j)] = node_view;
        }
    }

    if (setup_.dt > 0.0) {
        dt_ = setup_.dt;
    } else {
        double lim = std::numeric_limits<double>::infinity();
        for (std::size_t pi = 0; pi < patches_.size(); ++pi) {
            const Patch& p = patches_[pi];
            const std::vector<double> percell = cfl_per_cell(p.mat, p.g);
            for (std::size_t k = 0; k < percell.size(); ++k) {
                if (pi == 0 && !p.hzmask[k]) continue;
                lim = std::min(lim, percell[k]);
            }
        }
        dt_ = setup_.cfl_fraction * lim;
    }
    if (!(dt_ > 0.0)) throw Error(ErrorKind::config, "dt: must resolve to a positive value");

    for (Patch& p : patches_) build_coeffs(p, dt_);

    if (setup_.boundaries.any_pml()) {
        setup_.pml.validate();
        const int th = setup_.pml.thickness;
        const GridSpec& g = setup_.grid;
        for (const SubgridRegion& r : setup_.subgrids) {
            const bool bad = (setup_.boundaries.west == BoundaryKind::pml && r.i0 <= th) ||
                             (setup_.boundaries.east == BoundaryKind::pml && r.i1 >= g.nx - th) ||
                             (setup_.boundaries.south == BoundaryKind::pml && r.j0 <= th) ||
                             (setup_.boundaries.north == BoundaryKind::pml && r.j1 >= g.ny - th);
            if (bad)
                throw Error(ErrorKind::config,
                            "subgrid: region must stay clear of the absorbing layers");
        }
        Patch& c = patches_[0];
        c.pml = build_pml(c.g, setup_.boundaries, setup_.pml, TimeStep{dt_}, c.excls, c.eycls);
        c.has_pml = c.pml.any();
    }

    build_interfaces();
    resolve_points();

    ledger_.tol_rel = setup_.audit.tol_rel;
    ledger_.tol_abs = setup_.audit.tol_abs;
    if (setup_.audit.enabled)
        for (Patch& p : patches_) p.hz_prev.assign(p.g.n_hz(), 0.0);
    if (setup_.track_peaks)
        for (Patch& p : patches_) {
            p.ex_peak.assign(p.g.n_ex(), 0.0);
            p.ey_peak.assign(p.g.n_ey(), 0.0);
        }
}

void Simulation::classify_coarse() {
    Patch& c = patches_[0];
    const GridSpec& g = c.g;
    for (int i = 0; i < g.nx; ++i) {
        c.excls[g.ex_index(i, 0)] = node_pinned;
        c.excls[g.ex_index(i, g.ny)] = node_pinned;
    }
    for (int j = 0; j < g.ny; ++j) {
        c.eycls[g.ey_index(0, j)] = node_pinned;
        c.eycls[g.ey_index(g.nx, j)] = node_pinned;
    }
    for (const SubgridRegion& r : setup_.subgrids) {
        for (int j = r.j0; j < r.j1; ++j)
            for (int i = r.i0; i < r.i1; ++i) c.hzmask[g.hz_index(i, j)] = 0;
        for (int j = r.j0 + 1; j < r.j1; ++j)
            for (int i = r.i0; i < r.i1; ++i) c.excls[g.ex_index(i, j)] = node_masked;
        for (int j = r.j0; j < r.j1; ++j)
            for (int i = r.i0 + 1; i < r.i1; ++i) c.eycls[g.ey_index(i, j)] = node_masked;
        // Interface rows: the fine side replaces the covered cell, so the edge
        // keeps only its outer half cell and that cell's material sample.
        for (int i = r.i0; i < r.i1; ++i) {
            std::size_t k = g.ex_index(i, r.j0);
            std::size_t cell = g.hz_index(i, r.j0 - 1);
            c.excls[k] = node_interface;
            c.mat.eps_x[k] = c.eps_cell[cell];
            c.mat.sigma_x[k] = c.sigma_cell[cell];
            c.lpy[k] = 0.5 * g.dy;
            k = g.ex_index(i, r.j1);
            cell = g.hz_index(i, r.j1);
            c.excls[k] = node_interface;
            c.mat.eps_x[k] = c.eps_cell[cell];
            c.mat.sigma_x[k] = c.sigma_cell[cell];
            c.lpy[k] = 0.5 * g.dy;
        }
        for (int j = r.j0; j < r.j1; ++j) {
            std::size_t k = g.ey_index(r.i0, j);
            std::size_t cell = g.hz_index(r.i0 - 1, j);
            c.eycls[k] = node_interface;
            c.mat.eps_y[k] = c.eps_cell[cell];
            c.mat.sigma_y[k] = c.sigma_cell[cell];
            c.lpx[k] = 0.5 * g.dx;
            k = g.ey_index(r.i1, j);
            cell = g.hz_index(r.i1, j);
            c.eycls[k] = node_interface;
            c.mat.eps_y[k] = c.eps_cell[cell];
            c.mat.sigma_y[k] = c.sigma_cell[cell];
            c.lpx[k] = 0.5 * g.dx;
        }
    }
}

void Simulation::build_interfaces() {
    const TimeStep ts{dt_};
    const Patch& c = patches_[0];
    const GridSpec& g = c.g;
    for (std::size_t ri = 0; ri < setup_.subgrids.size(); ++ri) {
        const SubgridRegion& r = setup_.subgrids[ri];
        const Patch& f = patches_[ri + 1];
        const int rr = r.refine, fnx = f.g.nx, fny = f.g.ny;
        std::vector<double> ef(rr), sf(rr);
        const auto add = [&](std::uint8_t side, std::size_t ce, std::size_t chn, std::size_t fh0,
                             std::size_t fhs, std::size_t fe0, std::size_t fes, double sign,
                             double eps_c, double sig_c, double transverse, double edge_len) {
            for (int m = 0; m < rr; ++m) {
                const std::size_t fk = fe0 + std::size_t(m) * fes;
                ef[m] = side <= 1 ? f.mat.eps_x[fk] : f.mat.eps_y[fk];
                sf[m] = side <= 1 ? f.mat.sigma_x[fk] : f.mat.sigma_y[fk];
            }
            const InterfaceCoeffs ic = make_interface_coeffs(eps_c, sig_c, ef, sf, rr, transverse, ts);
            double am = 0.0, mm = 0.0;
            for (int m = 0; m < rr; ++m) {
                am += ic.cap_f[m];
                mm += ic.cam_f[m];
            }
            iface_.push_back(IfaceEdge{ri + 1, side, sign, ce, chn, fh0, fhs, fe0, fes, ic.c_keep,
                                       ic.c_drive, ic.cap_c, ic.cam_c, am / rr, mm / rr, edge_len});
        };
        for (int i = r.i0; i < r.i1; ++i) {
            const std::size_t k0 = std::size_t(i - r.i0) * rr;
            std::size_t ce = g.ex_index(i, r.j0);
            add(0, ce, g.hz_index(i, r.j0 - 1), k0, 1, k0, 1, +1.0, c.mat.eps_x[ce],
                c.mat.sigma_x[ce], g.dy, g.dx);
            ce = g.ex_index(i, r.j1);
            add(1, ce, g.hz_index(i, r.j1), k0 + std::size_t(fny - 1) * fnx, 1,
                k0 + std::size_t(fny) * fnx, 1, -1.0, c.mat.eps_x[ce], c.mat.sigma_x[ce], g.dy,
                g.dx);
        }
        for (int j = r.j0; j < r.j1; ++j) {
            const std::size_t k0 = std::size_t(j - r.j0) * rr;
            std::size_t ce = g.ey_index(r.i0, j);
            add(2, ce, g.hz_index(r.i0 - 1, j), k0 * fnx, fnx, k0 * (fnx + 1), fnx + 1, -1.0,
                c.mat.eps_y[ce], c.mat.sigma_y[ce], g.dx, g.dy);
            ce = g.ey_index(r.i1, j);
            add(3, ce, g.hz_index(r.i1, j), std::size_t(fnx - 1) + k0 * fnx, fnx,
                std::size_t(fnx) + k0 * (fnx + 1), fnx + 1, +1.0, c.mat.eps_y[ce],
                c.mat.sigma_y[ce], g.dx, g.dy);
        }
    }
}

namespace {

int clamp_idx(double v, int lo, int hi) {
    const int i = int(std::llround(v));
    return std::max(lo, std::min(hi, i));
}

} // namespace

void Simulation::resolve_points() {
    const auto find_patch = [&](double x, double y, const std::string& what) -> std::size_t {
        for (std::size_t p = patches_.size(); p-- > 1;) {
            const Patch& f = patches_[p];
            if (x >= f.ox && x <= f.ox + f.g.nx * f.g.dx && y >= f.oy &&
                y <= f.oy + f.g.ny * f.g.dy)
                return p;
        }
        const Patch& c = patches_[0];
        if (x < 0.0 || x > c.g.nx * c.g.dx || y < 0.0 || y > c.g.ny * c.g.dy)
            throw Error(ErrorKind::config, what + ": point lies outside the domain");
        return 0;
    };
    for (const SourceSpec& s : setup_.sources) {
        const std::size_t pi = find_patch(s.x, s.y, "source");
        const Patch& p = patches_[pi];
        const int i = clamp_idx((s.x - p.ox) / p.g.dx - 0.5, 0, p.g.nx - 1);
        const int j = clamp_idx((s.y - p.oy) / p.g.dy - 0.5, 0, p.g.ny - 1);
        const std::size_t node = p.g.hz_index(i, j);
        if (pi == 0 && !p.hzmask[node])
            throw Error(ErrorKind::config, "source: point lies in a refined-out coarse cell");
        sources_.push_back(SourceBinding{s, pi, node, p.g.dx * p.g.dy});
    }
    for (const ProbeSpec& pr : setup_.probes) {
        const std::size_t pi = find_patch(pr.x, pr.y, "probe " + pr.name);
        const Patch& p = patches_[pi];
        std::size_t idx = 0;
        if (pr.field == ProbeSpec::Field::hz) {
            const int i = clamp_idx((pr.x - p.ox) / p.g.dx - 0.5, 0, p.g.nx - 1);
            const int j = clamp_idx((pr.y - p.oy) / p.g.dy - 0.5, 0, p.g.ny - 1);
            idx = p.g.hz_index(i, j);
            if (pi == 0 && !p.hzmask[idx])
                throw Error(ErrorKind::config,
                            "probe " + pr.name + ": point lies in a refined-out coarse cell");
        } else if (pr.field == ProbeSpec::Field::ex) {
            const int i = clamp_idx((pr.x - p.ox) / p.g.dx - 0.5, 0, p.g.nx - 1);
            const int j = clamp_idx((pr.y - p.oy) / p.g.dy, 0, p.g.ny);
            idx = p.g.ex_index(i, j);
        } else {
            const int i = clamp_idx((pr.x - p.ox) / p.g.dx, 0, p.g.nx);
            const int j = clamp_idx((pr.y - p.oy) / p.g.dy - 0.5, 0, p.g.ny - 1);
            idx = p.g.ey_index(i, j);
        }
        probes_.push_back(ProbeBinding{pr, pi, idx, int(probe_series_.size())});
        probe_series_.push_back(ProbeSeries{pr, {}, {}});
    }
}

void Simulation::h_pass(Patch& p) {
    const int nx = p.g.nx, ny = p.g.ny;
    const double inv_dx = 1.0 / p.g.dx, inv_dy = 1.0 / p.g.dy;
    const double* ex = p.ex.data();
    const double* ey = p.ey.data();
    double* hz = p.hz.data();
#pragma omp parallel for num_threads(threads_) if (threads_ > 1) schedule(static)
    for (int j = 0; j < ny; ++j) {
        const std::size_t rh = std::size_t(j) * nx;
        const std::size_t ry = std::size_t(j) * (nx + 1);
        for (int i = 0; i < nx; ++i) {
            const std::size_t k = rh + i;
            if (!p.hzmask[k]) continue;
            const double curl = (ex[k + nx] - ex[k]) * inv_dy - (ey[ry + i + 1] - ey[ry + i]) * inv_dx;
            hz[k] += p.ch[k] * curl;
        }
    }
}

void Simulation::h_pml_pass(Patch& p) {
    const int nx = p.g.nx;
    const double inv_dx = 1.0 / p.g.dx, inv_dy = 1.0 / p.g.dy;
    PmlSet& hy = p.pml.hy;
    for (std::size_t t = 0; t < hy.size(); ++t) {
        const std::size_t k = hy.idx[t];
        const double d = (p.ex[k + nx] - p.ex[k]) * inv_dy;
        hy.psi[t] = hy.b[t] * hy.psi[t] + hy.a[t] * d;
        p.hz[k] += p.ch[k] * hy.psi[t];
    }
    PmlSet& hx = p.pml.hx;
    for (std::size_t t = 0; t < hx.size(); ++t) {
        const std::size_t k = hx.idx[t];
        const int i = int(k % nx), j = int(k / nx);
        const double d = (p.ey[p.g.ey_index(i + 1, j)] - p.ey[p.g.ey_index(i, j)]) * inv_dx;
        hx.psi[t] = hx.b[t] * hx.psi[t] + hx.a[t] * d;
        p.hz[k] -= p.ch[k] * hx.psi[t];
    }
}

void Simulation::e_pass(Patch& p) {
    const int nx = p.g.nx, ny = p.g.ny;
    const double* hz = p.hz.data();
#pragma omp parallel for num_threads(threads_) if (threads_ > 1) schedule(static)
    for (int j = 1; j < ny; ++j) {
        const std::size_t row = std::size_t(j) * nx;
        for (int i = 0; i < nx; ++i) {
            const std::size_t k = row + i;
            if (p.excls[k] != node_interior) continue;
            const double dh = hz[k] - hz[k - nx];
            p.ex[k] = p.cax[k] * p.ex[k] + p.ccx[k] * dh;
        }
    }
#pragma omp parallel for num_threads(threads_) if (threads_ > 1) schedule(static)
    for (int j = 0; j < ny; ++j) {
        const std::size_t row = std::size_t(j) * (nx + 1);
        const std::size_t h = std::size_t(j) * nx;
        for (int i = 1; i < nx; ++i) {
            const std::size_t k = row + i;
            if (p.eycls[k] != node_interior) continue;
            const double dh = hz[h + i - 1] - hz[h + i];
            p.ey[k] = p.cay[k] * p.ey[k] + p.ccy[k] * dh;
        }
    }
}

void Simulation::e_pml_pass(Patch& p) {
    const int nx = p.g.nx;
    const double inv_dx = 1.0 / p.g.dx, inv_dy = 1.0 / p.g.dy;
    PmlSet& sx = p.pml.ex;
    for (std::size_t t = 0; t < sx.size(); ++t) {
        const std::size_t k = sx.idx[t];
        const double d = (p.hz[k] - p.hz[k - nx]) * inv_dy;
        sx.psi[t] = sx.b[t] * sx.psi[t] + sx.a[t] * d;
        p.ex[k] += p.cbx[k] * sx.psi[t];
    }
    PmlSet& sy = p.pml.ey;
    for (std::size_t t = 0; t < sy.size(); ++t) {
        const std::size_t k = sy.idx[t];
        const int i = int(k % (nx + 1)), j = int(k / (nx + 1));
        const std::size_t h = p.g.hz_index(i, j);
        const double d = (p.hz[h - 1] - p.hz[h]) * inv_dx;
        sy.psi[t] = sy.b[t] * sy.psi[t] + sy.a[t] * d;
        p.ey[k] += p.cby[k] * sy.psi[t];
    }
}

void Simulation::interface_pass() {
    if (iface_.empty()) return;
    const bool audit = setup_.audit.enabled && setup_.audit.interface_check;
    double step_sum = 0.0;
    Patch& c = patches_[0];
    for (const IfaceEdge& e : iface_) {
        const Patch& f = patches_[e.patch];
        const int rr = setup_.subgrids[e.patch - 1].refine;
        double hm = 0.0;
        for (int m = 0; m < rr; ++m) hm += f.hz[e.fh0 + std::size_t(m) * e.fhs];
        hm /= rr;
        double& ec = e.side <= 1 ? c.ex[e.ce] : c.ey[e.ce];
        const double hc = c.hz[e.chn];
        const double eprev = ec;
        const double enext = e.c_keep * eprev + e.c_drive * e.fine_sign * (hm - hc);
        ec = enext;
        if (audit) {
            // Reconstruct the hanging H each side's own boundary equation
            // implies; the merged update is reciprocal exactly when the fine
            // mean matches the coarse value, so their gap is the energy the
            // coupling itself created this step.
            const double hang_c = hc + e.fine_sign * (e.cap_c * enext - e.cam_c * eprev);
            const double hang_f = hm - e.fine_sign * (e.capf_mean * enext - e.camf_mean * eprev);
            step_sum += e.fine_sign * dt_ * e.edge_len * 0.5 * (eprev + enext) * (hang_f - hang_c);
        }
    }
    if (audit) {
        iface_step_sum_ = step_sum;
        const double a = std::abs(step_sum);
        max_iface_abs_ = std::max(max_iface_abs_, a);
        if (have_prev_ && storage_prev_ > 0.0)
            max_iface_rel_ = std::max(max_iface_rel_, a / storage_prev_);
    }
}

void Simulation::view_pass() {
    Patch& c = patches_[0];
    for (const IfaceEdge& e : iface_) {
        Patch& f = patches_[e.patch];
        const int rr = setup_.subgrids[e.patch - 1].refine;
        const double v = e.side <= 1 ? c.ex[e.ce] : c.ey[e.ce];
        double* dst = e.side <= 1 ? f.ex.data() : f.ey.data();
        for (int m = 0; m < rr; ++m) dst[e.fe0 + std::size_t(m) * e.fes] = v;
    }
}

void Simulation::observe() {
    const double t_h = (steps_done_ + 0.5) * dt_;
    const double t_e = (steps_done_ + 1.0) * dt_;
    for (const ProbeBinding& pb : probes_) {
        if (steps_done_ % pb.spec.stride != 0) continue;
        const Patch& p = patches_[pb.patch];
        double v = 0.0, t = t_e;
        switch (pb.spec.field) {
        case ProbeSpec::Field::hz:
            v = p.hz[pb.index];
            t = t_h;
            break;
        case ProbeSpec::Field::ex: v = p.ex[pb.index]; break;
        case ProbeSpec::Field::ey: v = p.ey[pb.index]; break;
        }
        probe_series_[pb.series].time_s.push_back(t);
        probe_series_[pb.series].value.push_back(v);
    }
    if (setup_.track_peaks && t_e >= setup_.peak_window_start && t_e <= setup_.peak_window_end) {
        for (Patch& p : patches_) {
            for (std::size_t k = 0; k < p.ex.size(); ++k)
                p.ex_peak[k] = std::max(p.ex_peak[k], std::abs(p.ex[k]));
            for (std::size_t k = 0; k < p.ey.size(); ++k)
                p.ey_peak[k] = std::max(p.ey_peak[k], std::abs(p.ey[k]));
        }
    }
    double m = 0.0;
    for (const Patch& p : patches_)
        for (const double v : p.hz) m = std::max(m, std::abs(v));
    if (!std::isfinite(m) || m > 1e30) diverged_ = true;
    max_hz_ = std::max(max_hz_, m);
    if (steps_done_ < prefix_steps_) max_hz_prefix_ = std::max(max_hz_prefix_, m);
}

void Simulation::step() {
    if (steps_done_ == 0) view_pass(); // sync seeded coarse interface values onto the views
    const bool audit = setup_.audit.enabled;
    if (audit)
        for (Patch& p : patches_) p.hz_prev = p.hz;

    for (Patch& p : patches_) {
        h_pass(p);
        if (p.has_pml) h_pml_pass(p);
    }

    const double t_half = (steps_done_ + 0.5) * dt_;
    double s_src = 0.0, h_corr = 0.0;
    for (const SourceBinding& sb : sources_) {
        const double gval = sb.spec.value(t_half);
        if (gval == 0.0) continue;
        Patch& p = patches_[sb.patch];
        // Area-normalised injection: the same drive strength radiates the
        // same field regardless of how finely the host patch is gridded.
        const double delta = gval * dt_ / (p.mat.mu[sb.node] * sb.cell_area);
        if (audit) h_corr += p.wh[sb.node] * p.hz_prev[sb.node] * delta;
        p.hz[sb.node] += delta;
    }
    if (audit) {
        // Supply is trapezoidal in the half-step H at the injection node; all
        // injections land before any contribution is priced so shared nodes
        // see the final value.
        for (const SourceBinding& sb : sources_) {
            const double gval = sb.spec.value(t_half);
            if (gval == 0.0) continue;
            const Patch& p = patches_[sb.patch];
            s_src += 0.5 * dt_ * (p.hz_prev[sb.node] + p.hz[sb.node]) * gval;
        }
        // Storage of the state entering this step: E at n against the
        // curl-only half-step H product (injections backed out).
        double en = 0.0;
        for (const Patch& p : patches_) {
            for (std::size_t k = 0; k < p.ex.size(); ++k) en += p.wex[k] * p.ex[k] * p.ex[k];
            for (std::size_t k = 0; k < p.ey.size(); ++k) en += p.wey[k] * p.ey[k] * p.ey[k];
            for (std::size_t k = 0; k < p.hz.size(); ++k) en += p.wh[k] * p.hz_prev[k] * p.hz[k];
        }
        en -= h_corr;
        if (have_prev_)
            ledger_.audit_step(steps_done_ - 1, (steps_done_ - 1) * dt_, storage_prev_, en,
                               supply_prev_);
        storage_prev_ = en;
        supply_prev_ = s_src;
        have_prev_ = true;
    }

    for (Patch& p : patches_) {
        e_pass(p);
        if (p.has_pml) e_pml_pass(p);
    }
    interface_pass();
    view_pass();
    observe();
    ++steps_done_;
}

void Simulation::run() { run(setup_.steps); }

void Simulation::run(long n) {
    for (long s = 0; s < n && !diverged_; ++s) step();
}

} // namespace tefdtd
