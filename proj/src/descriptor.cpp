#include "tefdtd/descriptor.hpp"

#include <ostream>
#include <vector>

#include "tefdtd/error.hpp"

namespace tefdtd {

SparseMat build_difference_matrix(int n) {
    if (n < 1) throw Error(ErrorKind::argument, "build_difference_matrix: n must be >= 1");
    SparseMat w(n, n + 1);
    std::vector<Eigen::Triplet<double>> trip;
    trip.reserve(2 * std::size_t(n));
    for (int k = 0; k < n; ++k) {
        trip.emplace_back(k, k, -1.0);
        trip.emplace_back(k, k + 1, 1.0);
    }
    w.setFromTriplets(trip.begin(), trip.end());
    return w;
}

DifferenceOperators build_difference_operators(const GridSpec& g) {
    g.validate();
    std::vector<Eigen::Triplet<double>> tx, ty;
    tx.reserve(2 * g.n_hz());
    ty.reserve(2 * g.n_hz());
    for (int j = 0; j < g.ny; ++j) {
        for (int i = 0; i < g.nx; ++i) {
            const int c = int(g.hz_index(i, j));
            // I_ny kron W_nx: within row j, difference along i of E_y.
            tx.emplace_back(c, int(g.ey_index(i, j)), -1.0);
            tx.emplace_back(c, int(g.ey_index(i + 1, j)), 1.0);
            // W_ny kron I_nx: difference along j of E_x.
            ty.emplace_back(c, int(g.ex_index(i, j)), -1.0);
            ty.emplace_back(c, int(g.ex_index(i, j + 1)), 1.0);
        }
    }
    DifferenceOperators ops;
    ops.gx.resize(Eigen::Index(g.n_hz()), Eigen::Index(g.n_ey()));
    ops.gy.resize(Eigen::Index(g.n_hz()), Eigen::Index(g.n_ex()));
    ops.gx.setFromTriplets(tx.begin(), tx.end());
    ops.gy.setFromTriplets(ty.begin(), ty.end());
    return ops;
}

DescriptorSystem assemble_descriptor(const GridSpec& g, const MaterialMap& mat, TimeStep ts) {
    g.validate();
    mat.validate(g);
    if (!(ts.dt > 0.0)) throw Error(ErrorKind::argument, "assemble_descriptor: dt must be positive");

    const std::size_t nex = g.n_ex();
    const std::size_t ney = g.n_ey();
    const std::size_t nh = g.n_hz();
    const std::size_t off_ey = nex;
    const std::size_t off_h = nex + ney;
    const std::vector<double> lpy = dual_length_y(g);
    const std::vector<double> lpx = dual_length_x(g);

    DescriptorSystem sys;
    sys.grid = g;
    sys.ts = ts;
    sys.ports = PortLayout{g.nx, g.ny};

    std::vector<Eigen::Triplet<double>> tr, tf;
    tr.reserve(nex + ney + nh + 8 * nh);
    tf.reserve(nex + ney + 16 * nh);

    for (std::size_t e = 0; e < nex; ++e) {
        tr.emplace_back(int(e), int(e), g.dx * lpy[e] * mat.eps_x[e] / ts.dt);
        if (mat.sigma_x[e] != 0.0)
            tf.emplace_back(int(e), int(e), 0.5 * g.dx * lpy[e] * mat.sigma_x[e]);
    }
    for (std::size_t e = 0; e < ney; ++e) {
        tr.emplace_back(int(off_ey + e), int(off_ey + e), g.dy * lpx[e] * mat.eps_y[e] / ts.dt);
        if (mat.sigma_y[e] != 0.0)
            tf.emplace_back(int(off_ey + e), int(off_ey + e), 0.5 * g.dy * lpx[e] * mat.sigma_y[e]);
    }
    for (std::size_t c = 0; c < nh; ++c)
        tr.emplace_back(int(off_h + c), int(off_h + c), g.dx * g.dy * mat.mu[c] / ts.dt);

    // Off-diagonal curl coupling. R holds both halves symmetrically; F repeats
    // the E-rows and negates the H-rows, which is what cancels the curl from
    // F + F^T while keeping R + F block triangular (explicit stepping).
    for (int j = 0; j < g.ny; ++j) {
        for (int i = 0; i < g.nx; ++i) {
            const std::size_t c = g.hz_index(i, j);
            const int hc = int(off_h + c);
            // gy entries: -1 at ex(i,j), +1 at ex(i,j+1); block weight dx/2.
            const struct { std::size_t e; double w; } ye[2] = {
                {g.ex_index(i, j), -0.5 * g.dx}, {g.ex_index(i, j + 1), 0.5 * g.dx}};
            for (const auto& t : ye) {
                tr.emplace_back(int(t.e), hc, t.w);
                tr.emplace_back(hc, int(t.e), t.w);
                tf.emplace_back(int(t.e), hc, t.w);
                tf.emplace_back(hc, int(t.e), -t.w);
            }
            // gx entries: -1 at ey(i,j), +1 at ey(i+1,j); block weight -dy/2.
            const struct { std::size_t e; double w; } xe[2] = {
                {g.ey_index(i, j), 0.5 * g.dy}, {g.ey_index(i + 1, j), -0.5 * g.dy}};
            for (const auto& t : xe) {
                tr.emplace_back(int(off_ey + t.e), hc, t.w);
                tr.emplace_back(hc, int(off_ey + t.e), t.w);
                tf.emplace_back(int(off_ey + t.e), hc, t.w);
                tf.emplace_back(hc, int(off_ey + t.e), -t.w);
            }
        }
    }

    const std::size_t ns = g.n_state();
    const std::size_t np = sys.ports.total();
    sys.r_mat.resize(Eigen::Index(ns), Eigen::Index(ns));
    sys.f_mat.resize(Eigen::Index(ns), Eigen::Index(ns));
    sys.r_mat.setFromTriplets(tr.begin(), tr.end());
    sys.f_mat.setFromTriplets(tf.begin(), tf.end());

    // Hanging-H input scaling and boundary-E output selection, port order
    // (south, north, west, east). The alternating signs match the curl
    // direction each side's hanging H enters with.
    std::vector<Eigen::Triplet<double>> tb, tl;
    tb.reserve(np);
    tl.reserve(np);
    for (int i = 0; i < g.nx; ++i) {
        tb.emplace_back(int(g.ex_index(i, 0)), int(sys.ports.south() + i), -g.dx);
        tb.emplace_back(int(g.ex_index(i, g.ny)), int(sys.ports.north() + i), g.dx);
        tl.emplace_back(int(g.ex_index(i, 0)), int(sys.ports.south() + i), 1.0);
        tl.emplace_back(int(g.ex_index(i, g.ny)), int(sys.ports.north() + i), 1.0);
    }
    for (int j = 0; j < g.ny; ++j) {
        tb.emplace_back(int(off_ey + g.ey_index(0, j)), int(sys.ports.west() + j), g.dy);
        tb.emplace_back(int(off_ey + g.ey_index(g.nx, j)), int(sys.ports.east() + j), -g.dy);
        tl.emplace_back(int(off_ey + g.ey_index(0, j)), int(sys.ports.west() + j), 1.0);
        tl.emplace_back(int(off_ey + g.ey_index(g.nx, j)), int(sys.ports.east() + j), 1.0);
    }
    sys.b_mat.resize(Eigen::Index(ns), Eigen::Index(np));
    sys.l_mat.resize(Eigen::Index(ns), Eigen::Index(np));
    sys.b_mat.setFromTriplets(tb.begin(), tb.end());
    sys.l_mat.setFromTriplets(tl.begin(), tl.end());
    return sys;
}

SparseMat port_product(const DescriptorSystem& sys) {
    return SparseMat(sys.l_mat.transpose() * sys.b_mat);
}

void dump_matrix_triplets(const SparseMat& m, std::ostream& os) {
    Eigen::SparseMatrix<double, Eigen::RowMajor> rm(m);
    char buf[64];
    for (Eigen::Index r = 0; r < rm.outerSize(); ++r) {
        for (Eigen::SparseMatrix<double, Eigen::RowMajor>::InnerIterator it(rm, r); it; ++it) {
            std::snprintf(buf, sizeof buf, "%ld %ld %.17g\n", long(it.row()), long(it.col()),
                          it.value());
            os << buf;
        }
    }
}

} // namespace tefdtd
