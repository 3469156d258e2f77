#pragma once

// Dense reference implementations used to cross-check the production code.
// Everything here goes through Eigen's dense solvers and plain loops; none of
// it shares code with the sparse/matrix-free paths under test.

#include <Eigen/Dense>
#include <cstdint>
#include <limits>
#include <random>
#include <vector>

#include "tefdtd/constants.hpp"
#include "tefdtd/descriptor.hpp"
#include "tefdtd/dissipativity.hpp"
#include "tefdtd/grid.hpp"

namespace oracle {

inline Eigen::MatrixXd dense(const tefdtd::SparseMat& m) { return Eigen::MatrixXd(m); }

/// Dense one-step solve of (R+F) x^{n+1} = (R-F) x^n + B u^{n+1/2}.
struct DenseStepper {
    Eigen::MatrixXd a_minus;
    Eigen::MatrixXd b;
    Eigen::PartialPivLU<Eigen::MatrixXd> lu;

    explicit DenseStepper(const tefdtd::DescriptorSystem& sys)
        : a_minus(dense(sys.r_mat) - dense(sys.f_mat)),
          b(dense(sys.b_mat)),
          lu(dense(sys.r_mat) + dense(sys.f_mat)) {}

    Eigen::VectorXd step(const Eigen::VectorXd& x, const Eigen::VectorXd& u) const {
        return lu.solve(a_minus * x + b * u);
    }
};

/// Largest dt keeping R positive semidefinite, from a dense eigensolve.
/// R(dt) = W/dt + A with W = diag(R at dt=1s) and A the off-diagonal part,
/// so the limit is -1/lambda_min(W^{-1/2} A W^{-1/2}).
inline double dense_cfl_limit(const tefdtd::GridSpec& g, const tefdtd::MaterialMap& mat) {
    const tefdtd::DescriptorSystem unit =
        tefdtd::assemble_descriptor(g, mat, tefdtd::TimeStep{1.0});
    const Eigen::MatrixXd r1 = dense(unit.r_mat);
    const Eigen::VectorXd w = r1.diagonal();
    Eigen::MatrixXd a = r1;
    a.diagonal().setZero();
    const Eigen::VectorXd s = w.cwiseSqrt().cwiseInverse();
    const Eigen::MatrixXd scaled = s.asDiagonal() * a * s.asDiagonal();
    Eigen::SelfAdjointEigenSolver<Eigen::MatrixXd> es(scaled, Eigen::EigenvaluesOnly);
    const double lmin = es.eigenvalues().minCoeff();
    return lmin < 0.0 ? -1.0 / lmin : std::numeric_limits<double>::infinity();
}

/// Smallest eigenvalue of R at the given dt.
inline double r_min_eigenvalue(const tefdtd::GridSpec& g, const tefdtd::MaterialMap& mat,
                               tefdtd::TimeStep ts) {
    const tefdtd::DescriptorSystem sys = tefdtd::assemble_descriptor(g, mat, ts);
    Eigen::SelfAdjointEigenSolver<Eigen::MatrixXd> es(dense(sys.r_mat), Eigen::EigenvaluesOnly);
    return es.eigenvalues().minCoeff();
}

/// Random material map with physically admissible values.
inline tefdtd::MaterialMap random_materials(const tefdtd::GridSpec& g, std::uint64_t seed,
                                            bool lossy = false) {
    std::mt19937_64 rng(seed);
    std::uniform_real_distribution<double> re(1.0, 6.0);
    std::uniform_real_distribution<double> rm(1.0, 3.0);
    std::uniform_real_distribution<double> rs(0.0, lossy ? 2.0e-2 : 0.0);
    std::vector<double> eps(g.n_hz()), mu(g.n_hz()), sig(g.n_hz());
    for (std::size_t k = 0; k < g.n_hz(); ++k) {
        eps[k] = re(rng) * tefdtd::eps0;
        mu[k] = rm(rng) * tefdtd::mu0;
        sig[k] = rs(rng);
    }
    return tefdtd::MaterialMap::from_cells(g, eps, mu, sig);
}

} // namespace oracle
