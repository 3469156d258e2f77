#pragma once

#include <Eigen/SparseCore>
#include <iosfwd>

#include "tefdtd/grid.hpp"

namespace tefdtd {

using SparseMat = Eigen::SparseMatrix<double>;

/// n x (n+1) forward difference: row k carries -1 at column k, +1 at k+1.
SparseMat build_difference_matrix(int n);

/// Curl stencils on the staggered grid:
///   gx = I_ny kron W_nx  (n_hz x n_ey), x-differences of E_y
///   gy = W_ny kron I_nx  (n_hz x n_ex), y-differences of E_x
struct DifferenceOperators {
    SparseMat gx;
    SparseMat gy;
};
DifferenceOperators build_difference_operators(const GridSpec& g);

/// Port block offsets within the (south, north, west, east) stacking.
struct PortLayout {
    int nx = 0, ny = 0;
    std::size_t south() const { return 0; }
    std::size_t north() const { return std::size_t(nx); }
    std::size_t west() const { return 2 * std::size_t(nx); }
    std::size_t east() const { return 2 * std::size_t(nx) + std::size_t(ny); }
    std::size_t total() const { return 2 * std::size_t(nx) + 2 * std::size_t(ny); }
};

/// One-step descriptor form of the leapfrog scheme on x = [E_x; E_y; H_z]:
///
///   (R + F) x^{n+1} = (R - F) x^n + B u^{n+1/2},    y^n = L^T x^n
///
/// R is symmetric and defines the stored energy (Delta t/2) x^T R x; it is
/// positive definite exactly when dt is below the mesh's stability limit.
/// F + F^T is the (diagonal, >= 0) conductive loss; B injects the hanging-H
/// inputs scaled by edge lengths; L reads the boundary E outputs. R + F is
/// block triangular with diagonal blocks, which is what makes the scheme
/// explicit. Storage is O(nonzeros).
struct DescriptorSystem {
    GridSpec grid;
    TimeStep ts;
    PortLayout ports;
    SparseMat r_mat; // n_state x n_state
    SparseMat f_mat; // n_state x n_state
    SparseMat b_mat; // n_state x n_ports
    SparseMat l_mat; // n_state x n_ports
};

DescriptorSystem assemble_descriptor(const GridSpec& g, const MaterialMap& mat, TimeStep ts);

/// L^T B: block diagonal (-dx I, +dx I, +dy I, -dy I) in port order; the signs
/// orient the supply rate so inward power flux counts positive.
SparseMat port_product(const DescriptorSystem& sys);

/// Plain-text coordinate triplets "row col value", one per line, ordered by
/// row then column.
void dump_matrix_triplets(const SparseMat& m, std::ostream& os);

} // namespace tefdtd
