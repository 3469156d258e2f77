#include "tefdtd/dissipativity.hpp"

#include <cmath>
#include <cstdio>
#include <ostream>

#include "tefdtd/descriptor.hpp"
#include "tefdtd/error.hpp"

namespace tefdtd {

double storage_energy(const FieldState& state, std::span<const double> hz_next,
                      const MaterialMap& mat, const GridSpec& g, TimeStep ts) {
    (void)ts;
    if (hz_next.size() != g.n_hz())
        throw Error(ErrorKind::argument, "storage_energy: hz_next size does not match grid");
    const std::vector<double> lpy = dual_length_y(g);
    const std::vector<double> lpx = dual_length_x(g);
    double ee = 0.0;
    for (std::size_t e = 0; e < g.n_ex(); ++e)
        ee += 0.5 * g.dx * lpy[e] * mat.eps_x[e] * state.ex[e] * state.ex[e];
    for (std::size_t e = 0; e < g.n_ey(); ++e)
        ee += 0.5 * g.dy * lpx[e] * mat.eps_y[e] * state.ey[e] * state.ey[e];
    double eh = 0.0;
    for (std::size_t c = 0; c < g.n_hz(); ++c)
        eh += 0.5 * g.dx * g.dy * mat.mu[c] * state.hz[c] * hz_next[c];
    return ee + eh;
}

double supply_rate(std::span<const double> y_n, std::span<const double> y_np1,
                   std::span<const double> u, const GridSpec& g, TimeStep ts) {
    const std::size_t np = g.n_ports();
    if (y_n.size() != np || y_np1.size() != np || u.size() != np)
        throw Error(ErrorKind::argument, "supply_rate: port vector sizes do not match grid");
    const std::size_t nx = std::size_t(g.nx), ny = std::size_t(g.ny);
    double s = 0.0;
    std::size_t k = 0;
    for (std::size_t i = 0; i < nx; ++i, ++k) // south
        s -= g.dx * 0.5 * (y_n[k] + y_np1[k]) * u[k];
    for (std::size_t i = 0; i < nx; ++i, ++k) // north
        s += g.dx * 0.5 * (y_n[k] + y_np1[k]) * u[k];
    for (std::size_t j = 0; j < ny; ++j, ++k) // west
        s += g.dy * 0.5 * (y_n[k] + y_np1[k]) * u[k];
    for (std::size_t j = 0; j < ny; ++j, ++k) // east
        s -= g.dy * 0.5 * (y_n[k] + y_np1[k]) * u[k];
    return ts.dt * s;
}

bool EnergyLedger::audit_step(long step, double time_s, double storage_before,
                              double storage_after, double supply) {
    LedgerRecord rec;
    rec.step = step;
    rec.time_s = time_s;
    rec.storage = storage_before;
    rec.supply = supply;
    rec.slack = supply - (storage_after - storage_before);
    rec.violation = rec.slack < -(tol_abs + tol_rel * storage_before);
    if (rec.violation) ++violations;
    if (rec.slack < min_slack) min_slack = rec.slack;
    records.push_back(rec);
    return rec.violation;
}

void EnergyLedger::write_csv(std::ostream& os) const {
    os << "step,time_s,storage_J_per_m,supply_J_per_m,slack_J_per_m,violation\n";
    char buf[160];
    for (const LedgerRecord& r : records) {
        std::snprintf(buf, sizeof buf, "%ld,%.17g,%.17g,%.17g,%.17g,%d\n", r.step, r.time_s,
                      r.storage, r.supply, r.slack, r.violation ? 1 : 0);
        os << buf;
    }
}

std::vector<double> cfl_per_cell(const MaterialMap& mat, const GridSpec& g) {
    std::vector<double> out(g.n_hz());
    for (int j = 0; j < g.ny; ++j) {
        for (int i = 0; i < g.nx; ++i) {
            const std::size_t c = g.hz_index(i, j);
            const double mu_c = mat.mu[c];
            const double tx = (1.0 / mat.eps_y[g.ey_index(i, j)] + 1.0 / mat.eps_y[g.ey_index(i + 1, j)]) /
                              (2.0 * g.dx * g.dx * mu_c);
            const double ty = (1.0 / mat.eps_x[g.ex_index(i, j)] + 1.0 / mat.eps_x[g.ex_index(i, j + 1)]) /
                              (2.0 * g.dy * g.dy * mu_c);
            out[c] = 1.0 / std::sqrt(tx + ty);
        }
    }
    return out;
}

double cfl_per_cell_min(const MaterialMap& mat, const GridSpec& g) {
    const std::vector<double> v = cfl_per_cell(mat, g);
    double m = v[0];
    for (double x : v)
        if (x < m) m = x;
    return m;
}

namespace {

// Deterministic start vector in [-1, 1), bit-exact for a given seed.
std::vector<double> seeded_vector(std::size_t n, std::uint64_t seed) {
    std::vector<double> v(n);
    std::uint64_t s = seed ? seed : 1;
    for (std::size_t k = 0; k < n; ++k) {
        s ^= s << 13;
        s ^= s >> 7;
        s ^= s << 17;
        v[k] = double(s >> 11) * (2.0 / 9007199254740992.0) - 1.0;
    }
    return v;
}

} // namespace

CflResult cfl_global(const GridSpec& g, const MaterialMap& mat, double tol, int max_iterations,
                     std::uint64_t seed) {
    g.validate();
    mat.validate(g);
    const std::vector<double> lpy = dual_length_y(g);
    const std::vector<double> lpx = dual_length_x(g);
    const std::size_t nex = g.n_ex(), ney = g.n_ey(), nh = g.n_hz();

    // S = Dh [ gy Dx , -gx Dy ] with Dh = (dx dy mu)^{-1/2} per cell,
    // Dx = (dx / (l'y eps_x))^{1/2} per E_x edge, Dy likewise for E_y.
    std::vector<double> sh(nh), sx(nex), sy(ney);
    for (std::size_t c = 0; c < nh; ++c) sh[c] = 1.0 / std::sqrt(g.dx * g.dy * mat.mu[c]);
    for (std::size_t e = 0; e < nex; ++e) sx[e] = std::sqrt(g.dx / (lpy[e] * mat.eps_x[e]));
    for (std::size_t e = 0; e < ney; ++e) sy[e] = std::sqrt(g.dy / (lpx[e] * mat.eps_y[e]));

    std::vector<double> v = seeded_vector(nh, seed);
    std::vector<double> t(nh), w1(nex), w2(ney), z(nh);

    auto apply = [&](const std::vector<double>& in, std::vector<double>& out) {
        for (std::size_t c = 0; c < nh; ++c) t[c] = sh[c] * in[c];
        // w1 = Dx gy^T t, w2 = -Dy gx^T t
        for (int j = 0; j <= g.ny; ++j) {
            for (int i = 0; i < g.nx; ++i) {
                const std::size_t e = g.ex_index(i, j);
                double a = 0.0;
                if (j < g.ny) a -= t[g.hz_index(i, j)];
                if (j > 0) a += t[g.hz_index(i, j - 1)];
                w1[e] = sx[e] * a;
            }
        }
        for (int j = 0; j < g.ny; ++j) {
            for (int i = 0; i <= g.nx; ++i) {
                const std::size_t e = g.ey_index(i, j);
                double a = 0.0;
                if (i < g.nx) a -= t[g.hz_index(i, j)];
                if (i > 0) a += t[g.hz_index(i - 1, j)];
                w2[e] = -sy[e] * a;
            }
        }
        // out = Dh (gy Dx w1 - gx Dy w2)
        for (int j = 0; j < g.ny; ++j) {
            for (int i = 0; i < g.nx; ++i) {
                const std::size_t c = g.hz_index(i, j);
                const double ay = sx[g.ex_index(i, j + 1)] * w1[g.ex_index(i, j + 1)] -
                                  sx[g.ex_index(i, j)] * w1[g.ex_index(i, j)];
                const double ax = sy[g.ey_index(i + 1, j)] * w2[g.ey_index(i + 1, j)] -
                                  sy[g.ey_index(i, j)] * w2[g.ey_index(i, j)];
                out[c] = sh[c] * (ay - ax);
            }
        }
    };

    auto norm = [](const std::vector<double>& a) {
        double s = 0.0;
        for (double x : a) s += x * x;
        return std::sqrt(s);
    };

    double nv = norm(v);
    for (double& x : v) x /= nv;

    CflResult res;
    res.seed = seed;
    double lambda_prev = 0.0;
    for (int it = 1; it <= max_iterations; ++it) {
        apply(v, z);
        double lambda = 0.0;
        for (std::size_t c = 0; c < nh; ++c) lambda += v[c] * z[c];
        res.iterations = it;
        if (it > 1 && std::abs(lambda - lambda_prev) <= tol * std::abs(lambda)) {
            lambda_prev = lambda;
            res.converged = true;
            break;
        }
        lambda_prev = lambda;
        const double nz = norm(z);
        if (nz == 0.0) break; // start vector in the null space; eps/mu > 0 makes this impossible
        for (std::size_t c = 0; c < nh; ++c) v[c] = z[c] / nz;
    }
    res.sigma_max = std::sqrt(std::max(lambda_prev, 0.0));
    res.dt_max = res.sigma_max > 0.0 ? 2.0 / res.sigma_max : 0.0;
    return res;
}

StabilityReport verify_theorem1(const DescriptorSystem& sys, const MaterialMap& mat,
                                const GridSpec& g, TimeStep ts) {
    StabilityReport rep;
    rep.dt = ts.dt;
    rep.percell = cfl_per_cell(mat, g);
    rep.dt_max_percell = rep.percell[0];
    for (double v : rep.percell)
        if (v < rep.dt_max_percell) rep.dt_max_percell = v;

    const CflResult glob = cfl_global(g, mat);
    rep.dt_max_global = glob.dt_max;
    rep.sigma_max = glob.sigma_max;
    rep.power_iterations = glob.iterations;
    rep.seed = glob.seed;
    rep.r_spd = ts.dt < glob.dt_max;

    rep.losses_ok = true;
    for (double s : mat.sigma_x)
         if (s < 0.0) rep.losses_ok = false;
    for (double s : mat.sigma_y)
        if (s < 0.0) rep.losses_ok = false;

    // B = L (L^T B) must hold exactly; all factors are exact +-1 selections
    // scaled by dx or dy, so the products are exact in floating point.
    SparseMat recon = SparseMat(sys.l_mat * port_product(sys));
    SparseMat diff = SparseMat(recon - sys.b_mat);
    diff.prune(0.0, 0.0);
    rep.ports_ok = diff.nonZeros() == 0;
    return rep;
}

} // namespace tefdtd
