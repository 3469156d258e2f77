#include "tefdtd/subgrid.hpp"

#include <string>

#include "tefdtd/error.hpp"

namespace tefdtd {

GridSpec SubgridRegion::fine_grid(const GridSpec& coarse) const {
    GridSpec f;
    f.nx = cells_x() * refine;
    f.ny = cells_y() * refine;
    f.dx = coarse.dx / refine;
    f.dy = coarse.dy / refine;
    return f;
}

void SubgridRegion::validate(const GridSpec& coarse) const {
    if (refine < 1) throw Error(ErrorKind::config, "subgrid: refine must be >= 1");
    if (i1 <= i0 || j1 <= j0) throw Error(ErrorKind::config, "subgrid: empty cell range");
    // Strictly inside: every interface edge needs a live coarse H neighbour.
    if (i0 < 1 || j0 < 1 || i1 > coarse.nx - 1 || j1 > coarse.ny - 1)
        throw Error(ErrorKind::config,
                    "subgrid: region [" + std::to_string(i0) + "," + std::to_string(i1) + ")x[" +
                        std::to_string(j0) + "," + std::to_string(j1) +
                        ") must leave at least one coarse cell to every wall");
}

bool SubgridRegion::conflicts(const SubgridRegion& other) const {
    return i0 - 1 < other.i1 + 1 && other.i0 - 1 < i1 + 1 && j0 - 1 < other.j1 + 1 &&
           other.j0 - 1 < j1 + 1;
}

InterfaceCoeffs make_interface_coeffs(double eps_c, double sigma_c, std::span<const double> eps_f,
                                      std::span<const double> sigma_f, int refine,
                                      double transverse, TimeStep ts) {
    if (refine < 1 || eps_f.size() != std::size_t(refine) || sigma_f.size() != std::size_t(refine))
        throw Error(ErrorKind::argument, "make_interface_coeffs: need one fine sample per subedge");
    InterfaceCoeffs c;
    c.cap_c = 0.5 * transverse * (eps_c / ts.dt + 0.5 * sigma_c);
    c.cam_c = 0.5 * transverse * (eps_c / ts.dt - 0.5 * sigma_c);
    c.cap_f.resize(refine);
    c.cam_f.resize(refine);
    double cap = c.cap_c, cam = c.cam_c;
    const double half_fine = 0.5 * transverse / refine;
    for (int k = 0; k < refine; ++k) {
        c.cap_f[k] = half_fine * (eps_f[k] / ts.dt + 0.5 * sigma_f[k]);
        c.cam_f[k] = half_fine * (eps_f[k] / ts.dt - 0.5 * sigma_f[k]);
        cap += c.cap_f[k] / refine;
        cam += c.cam_f[k] / refine;
    }
    // cap/cam are the merged (coarse + mean fine) boundary equations; their
    // ratio is the loss factor and 1/cap scales the curl drive.
    c.c_keep = cam / cap;
    c.c_drive = 1.0 / cap;
    return c;
}

void interpolate_e(double e_coarse, std::span<double> e_fine_out) {
    for (double& v : e_fine_out) v = e_coarse;
}

double interpolate_h(std::span<const double> h_fine) {
    double s = 0.0;
    for (double v : h_fine) s += v;
    return s / double(h_fine.size());
}

double interface_update(double e_prev, double h_coarse_below,
                        std::span<const double> h_fine_above, const InterfaceCoeffs& c) {
    return c.c_keep * e_prev + c.c_drive * (interpolate_h(h_fine_above) - h_coarse_below);
}

double interface_supply(double e_c_n, double e_c_np1, std::span<const double> e_f_n,
                        std::span<const double> e_f_np1, double h_c, std::span<const double> h_f,
                        double edge_len, TimeStep ts) {
    const std::size_t r = h_f.size();
    if (e_f_n.size() != r || e_f_np1.size() != r)
        throw Error(ErrorKind::argument, "interface_supply: mismatched fine sample counts");
    double fine = 0.0;
    for (std::size_t k = 0; k < r; ++k) fine += 0.5 * (e_f_n[k] + e_f_np1[k]) * h_f[k];
    const double coarse = 0.5 * (e_c_n + e_c_np1) * h_c;
    return ts.dt * edge_len * (fine / double(r) - coarse);
}

} // namespace tefdtd
