#pragma once

#include <span>
#include <vector>

#include "tefdtd/grid.hpp"

namespace tefdtd {

/// Axis-aligned refinement patch covering whole coarse primary cells
/// [i0,i1) x [j0,j1), refined by the same integer factor in x and y.
struct SubgridRegion {
    int i0 = 0, j0 = 0, i1 = 0, j1 = 0;
    int refine = 2;

    int cells_x() const { return i1 - i0; }
    int cells_y() const { return j1 - j0; }
    GridSpec fine_grid(const GridSpec& coarse) const;
    /// Requires a non-empty range strictly inside the coarse grid (at least
    /// one coarse cell between the region and every wall) and refine >= 1.
    void validate(const GridSpec& coarse) const;
    /// True when the two regions, each padded by one coarse cell, overlap.
    /// Padded overlap would make regions share interface edges or the
    /// H neighbours just outside them, which the coupling does not support.
    bool conflicts(const SubgridRegion& other) const;
};

/// Coefficients of the merged update for a coarse E edge on a refinement
/// boundary. The coarse half cell on one side and the r fine half cells on
/// the other are combined into a single explicit update
///
///   e^{n+1} = c_keep e^n + c_drive (h_plus_avg - h_minus_avg)
///
/// where the averages are the interior H on either side of the edge (one
/// coarse value, the mean of r fine values) and the sign convention matches
/// the standard curl stencil for the edge's component. The cap/cam factors
/// are the two sides' boundary-row equations, kept for the supply audit:
/// cap,cam = (transverse/2)(eps/dt +- sigma/2), fine entries carry the
/// transverse/(2 refine) half cell.
struct InterfaceCoeffs {
    double c_keep = 1.0;
    double c_drive = 0.0;
    double cap_c = 0.0, cam_c = 0.0;
    std::vector<double> cap_f, cam_f;
};

/// eps_f/sigma_f hold the r fine-side edge samples; transverse is the coarse
/// spacing across the interface (dy for x-directed edges, dx for y-directed).
InterfaceCoeffs make_interface_coeffs(double eps_c, double sigma_c, std::span<const double> eps_f,
                                      std::span<const double> sigma_f, int refine,
                                      double transverse, TimeStep ts);

/// Fine boundary E samples are exact copies of the overlapping coarse edge
/// (piecewise constant along the edge).
void interpolate_e(double e_coarse, std::span<double> e_fine_out);

/// Coarse hanging H is the arithmetic mean of the r fine H samples across it.
double interpolate_h(std::span<const double> h_fine);

/// Merged interface update in the reference orientation (fine region above
/// the edge, coarse below): h_fine_above are the r fine H values just above,
/// h_coarse_below the coarse H just below.
double interface_update(double e_prev, double h_coarse_below,
                        std::span<const double> h_fine_above, const InterfaceCoeffs& c);

/// Energy absorbed by the interpolation rule over one step (J/m), reference
/// orientation, edge of coarse length `edge_len`:
///
///   s = -dt edge_len avg(e_c) h_c + dt (edge_len/r) sum_k avg(e_f,k) h_f,k
///
/// h_c and h_f are the hanging H values on either side. With e_f copied from
/// e_c and h_c the mean of h_f the two terms cancel exactly; any nonzero
/// value measures how far the coupling is from reciprocal.
double interface_supply(double e_c_n, double e_c_np1, std::span<const double> e_f_n,
                        std::span<const double> e_f_np1, double h_c,
                        std::span<const double> h_f, double edge_len, TimeStep ts);

} // namespace tefdtd
