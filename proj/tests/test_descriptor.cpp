#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include <Eigen/Dense>
#include <random>
#include <sstream>

#include "oracle.hpp"
#include "tefdtd/constants.hpp"
#include "tefdtd/descriptor.hpp"
#include "tefdtd/update.hpp"

using namespace tefdtd;

TEST_CASE("forward difference matrix") {
    SparseMat w = build_difference_matrix(3);
    REQUIRE(w.rows() == 3);
    REQUIRE(w.cols() == 4);
    Eigen::MatrixXd d = oracle::dense(w);
    Eigen::MatrixXd expect(3, 4);
    expect << -1, 1, 0, 0, 0, -1, 1, 0, 0, 0, -1, 1;
    CHECK((d - expect).norm() == 0.0);
}

TEST_CASE("difference operators take the staggered shapes") {
    GridSpec g{3, 2, 1e-3, 1e-3};
    DifferenceOperators ops = build_difference_operators(g);
    CHECK(ops.gx.rows() == Eigen::Index(g.n_hz()));
    CHECK(ops.gx.cols() == Eigen::Index(g.n_ey()));
    CHECK(ops.gy.rows() == Eigen::Index(g.n_hz()));
    CHECK(ops.gy.cols() == Eigen::Index(g.n_ex()));
    // Row for cell (1,1): x-difference couples ey (1,1) and (2,1).
    Eigen::MatrixXd gx = oracle::dense(ops.gx);
    const auto row = g.hz_index(1, 1);
    CHECK(gx(row, g.ey_index(1, 1)) == -1.0);
    CHECK(gx(row, g.ey_index(2, 1)) == 1.0);
    CHECK(gx.row(row).cwiseAbs().sum() == 2.0);
    Eigen::MatrixXd gy = oracle::dense(ops.gy);
    CHECK(gy(row, g.ex_index(1, 1)) == -1.0);
    CHECK(gy(row, g.ex_index(1, 2)) == 1.0);
    CHECK(gy.row(row).cwiseAbs().sum() == 2.0);
}

TEST_CASE("port layout offsets") {
    PortLayout p{4, 3};
    CHECK(p.south() == 0);
    CHECK(p.north() == 4);
    CHECK(p.west() == 8);
    CHECK(p.east() == 11);
    CHECK(p.total() == 14);
}

TEST_CASE("assembled blocks have the structural properties") {
    GridSpec g{3, 2, 1e-3, 2e-3};
    MaterialMap mat = oracle::random_materials(g, 42, true);
    TimeStep ts{1e-13};
    DescriptorSystem sys = assemble_descriptor(g, mat, ts);

    Eigen::MatrixXd r = oracle::dense(sys.r_mat);
    Eigen::MatrixXd f = oracle::dense(sys.f_mat);
    const auto ne = Eigen::Index(g.n_ex() + g.n_ey());
    const auto nh = Eigen::Index(g.n_hz());

    CHECK((r - r.transpose()).norm() == 0.0);

    // F + F^T is diagonal, nonnegative (the conductive loss).
    Eigen::MatrixXd loss = f + f.transpose();
    Eigen::MatrixXd offdiag = loss;
    offdiag.diagonal().setZero();
    CHECK(offdiag.norm() == 0.0);
    CHECK(loss.diagonal().minCoeff() >= 0.0);

    // R+F has no E coupling in its H rows and diagonal E/H blocks, which is
    // what lets the solve run explicitly (H first, then E).
    Eigen::MatrixXd a = r + f;
    CHECK(a.bottomLeftCorner(nh, ne).norm() == 0.0);
    Eigen::MatrixXd ee = a.topLeftCorner(ne, ne);
    ee.diagonal().setZero();
    CHECK(ee.norm() == 0.0);
    Eigen::MatrixXd hh = a.bottomRightCorner(nh, nh);
    hh.diagonal().setZero();
    CHECK(hh.norm() == 0.0);

    // H diagonal of R carries mu dx dy / dt; no loss on H rows.
    CHECK(r(ne, ne) == doctest::Approx(mat.mu[0] * g.dx * g.dy / ts.dt));
    CHECK(f(ne, ne) == 0.0);
}

TEST_CASE("curl coupling entries carry half edge lengths") {
    GridSpec g{2, 2, 1e-3, 2e-3};
    MaterialMap mat = MaterialMap::vacuum(g);
    DescriptorSystem sys = assemble_descriptor(g, mat, TimeStep{1e-13});
    Eigen::MatrixXd r = oracle::dense(sys.r_mat);
    const std::size_t off_ey = g.n_ex();
    const std::size_t off_h = g.n_ex() + g.n_ey();
    const std::size_t hc = off_h + g.hz_index(0, 0);
    CHECK(r(g.ex_index(0, 0), hc) == doctest::Approx(-0.5 * g.dx));
    CHECK(r(g.ex_index(0, 1), hc) == doctest::Approx(0.5 * g.dx));
    CHECK(r(off_ey + g.ey_index(0, 0), hc) == doctest::Approx(0.5 * g.dy));
    CHECK(r(off_ey + g.ey_index(1, 0), hc) == doctest::Approx(-0.5 * g.dy));
}

TEST_CASE("input and output maps select the boundary rows") {
    GridSpec g{2, 1, 1e-3, 2e-3};
    MaterialMap mat = MaterialMap::vacuum(g);
    DescriptorSystem sys = assemble_descriptor(g, mat, TimeStep{1e-13});
    Eigen::MatrixXd b = oracle::dense(sys.b_mat);
    Eigen::MatrixXd l = oracle::dense(sys.l_mat);
    const std::size_t off_ey = g.n_ex();
    const PortLayout& p = sys.ports;

    CHECK(b(g.ex_index(0, 0), p.south() + 0) == doctest::Approx(-g.dx));
    CHECK(b(g.ex_index(0, g.ny), p.north() + 0) == doctest::Approx(g.dx));
    CHECK(b(off_ey + g.ey_index(0, 0), p.west() + 0) == doctest::Approx(g.dy));
    CHECK(b(off_ey + g.ey_index(g.nx, 0), p.east() + 0) == doctest::Approx(-g.dy));
    CHECK(l(g.ex_index(0, 0), p.south() + 0) == 1.0);
    CHECK(l(g.ex_index(0, g.ny), p.north() + 0) == 1.0);
    CHECK(l(off_ey + g.ey_index(0, 0), p.west() + 0) == 1.0);
    CHECK(l(off_ey + g.ey_index(g.nx, 0), p.east() + 0) == 1.0);
    CHECK(l.cwiseAbs().sum() == double(p.total())); // exactly one selection per port
}

TEST_CASE("port product is the signed edge-length diagonal") {
    GridSpec g{3, 2, 1e-3, 2e-3};
    MaterialMap mat = oracle::random_materials(g, 7);
    DescriptorSystem sys = assemble_descriptor(g, mat, TimeStep{1e-13});
    Eigen::MatrixXd ltb = oracle::dense(port_product(sys));
    const PortLayout& p = sys.ports;
    Eigen::VectorXd expect(p.total());
    for (int i = 0; i < p.nx; ++i) expect[long(p.south()) + i] = -g.dx;
    for (int i = 0; i < p.nx; ++i) expect[long(p.north()) + i] = g.dx;
    for (int j = 0; j < p.ny; ++j) expect[long(p.west()) + j] = g.dy;
    for (int j = 0; j < p.ny; ++j) expect[long(p.east()) + j] = -g.dy;
    CHECK((ltb - Eigen::MatrixXd(expect.asDiagonal())).norm() == 0.0);
}

TEST_CASE("port coupling identity holds exactly") {
    GridSpec g{4, 3, 0.7e-3, 1.3e-3};
    MaterialMap mat = oracle::random_materials(g, 99, true);
    DescriptorSystem sys = assemble_descriptor(g, mat, TimeStep{1e-13});
    Eigen::MatrixXd b = oracle::dense(sys.b_mat);
    Eigen::MatrixXd l = oracle::dense(sys.l_mat);
    Eigen::MatrixXd ltb = oracle::dense(port_product(sys));
    CHECK((b - l * ltb).norm() == 0.0);
}

TEST_CASE("descriptor stepping reproduces the update loops") {
    std::mt19937_64 rng(2026);
    std::uniform_real_distribution<double> uf(-1.0, 1.0);
    for (int trial = 0; trial < 10; ++trial) {
        GridSpec g{2 + trial % 3, 2 + trial % 2, 1e-3, 1.5e-3};
        MaterialMap mat = oracle::random_materials(g, 1000 + trial, true);
        const TimeStep ts{0.8 * cfl_per_cell_min(mat, g)};
        DescriptorSystem sys = assemble_descriptor(g, mat, ts);
        oracle::DenseStepper ds(sys);

        FieldState s = FieldState::zeros(g);
        for (double& v : s.hz) v = uf(rng);
        // Interior E only: boundary rows belong to the ports.
        for (int j = 1; j < g.ny; ++j)
            for (int i = 0; i < g.nx; ++i) s.ex[g.ex_index(i, j)] = uf(rng);
        for (int j = 0; j < g.ny; ++j)
            for (int i = 1; i < g.nx; ++i) s.ey[g.ey_index(i, j)] = uf(rng);

        Eigen::VectorXd x = Eigen::Map<const Eigen::VectorXd>(pack_state(s, g).data(),
                                                              long(g.n_state()));
        for (int n = 0; n < 5; ++n) {
            for (double& v : s.hang_s) v = uf(rng);
            for (double& v : s.hang_n) v = uf(rng);
            for (double& v : s.hang_w) v = uf(rng);
            for (double& v : s.hang_e) v = uf(rng);
            std::vector<double> uv = port_inputs(s, g);
            Eigen::VectorXd u = Eigen::Map<const Eigen::VectorXd>(uv.data(), long(uv.size()));
            x = ds.step(x, u);
            leapfrog_step(s, mat, g, ts, BoundaryModes::all_port());
        }
        Eigen::VectorXd xl = Eigen::Map<const Eigen::VectorXd>(pack_state(s, g).data(),
                                                               long(g.n_state()));
        const double rel = (x - xl).norm() / xl.norm();
        CHECK(rel <= 1e-13);
    }
}

TEST_CASE("triplet dump is row-ordered text") {
    SparseMat w = build_difference_matrix(2);
    std::ostringstream os;
    dump_matrix_triplets(w, os);
    CHECK(os.str() == "0 0 -1\n0 1 1\n1 1 -1\n1 2 1\n");
}
