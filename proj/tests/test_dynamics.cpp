#include "lindblad/dynamics.hpp"

#include "helpers.hpp"

#include <catch2/catch_amalgamated.hpp>

#include <random>

using namespace lindblad;
using namespace testutil;

TEST_CASE("evolve basics") {
    auto g = dissipation_qubit();
    std::mt19937_64 rng(2);
    Matrix rho0 = random_density(rng, 2);

    CHECK((evolve(g, rho0, 0.0) - rho0).norm() < 1e-13);

    // relaxation to the completely mixed state
    Matrix late = evolve(g, rho0, 20.0);
    CHECK((late - 0.5 * Matrix::Identity(2, 2)).norm() < 1e-6);
    CHECK(std::abs(late.trace() - Complex(1, 0)) < 1e-10);

    // the cascade empties its top level at unit rate
    auto gc = cascade_four();
    Matrix r1 = evolve(gc, unit(4, 3, 3), 1.0);
    CHECK(std::abs(r1(3, 3).real() - std::exp(-1.0)) < 1e-10);

    CHECK_THROWS_AS(evolve(g, rho0, -1.0), InputError);
}

TEST_CASE("semigroup law and positivity") {
    std::mt19937_64 rng(9);
    for (int k = 0; k < 5; ++k) {
        auto g = random_generator(rng, 3);
        Matrix rho0 = random_density(rng, 3);
        Matrix a = evolve(g, evolve(g, rho0, 0.7), 1.3);
        Matrix b = evolve(g, rho0, 2.0);
        CHECK((a - b).norm() < 1e-9);

        Eigen::SelfAdjointEigenSolver<Matrix> es(hermitize(evolve(g, rho0, 5.0)));
        CHECK(es.eigenvalues().minCoeff() >= -1e-8);
    }
}

TEST_CASE("trajectory sampling and monitors") {
    auto g = dissipation_qubit();
    std::mt19937_64 rng(4);
    DensityMatrix rho0{random_density(rng, 2)};

    Trajectory single = trajectory(g, rho0, 2.0, 1);
    REQUIRE(single.times.size() == 2);
    CHECK(single.times[0] == 0.0);
    CHECK(single.times[1] == 2.0);
    CHECK((single.states[0] - rho0.matrix).norm() == 0.0);
    CHECK((single.states[1] - evolve(g, rho0.matrix, 2.0)).norm() < 1e-12);

    for (const auto& m : single.monitors) {
        CHECK(m.min_eigenvalue >= -1e-8);
        CHECK(m.trace_defect < 1e-10);
    }

    CHECK_THROWS_AS(trajectory(g, rho0, 2.0, 0), InputError);
    CHECK_THROWS_AS(trajectory(g, rho0, -1.0, 5), InputError);
}

TEST_CASE("out-of-phase pair destroys phase relations monotonically") {
    auto g = dephasing_pair();
    // pure state with weight in both enclosures: r13 = 1/2
    Vector psi(4);
    psi << 1, 0, 1, 0;
    psi /= psi.norm();
    DensityMatrix rho0{Matrix(psi * psi.adjoint())};

    Matrix q1 = Matrix::Zero(4, 4), q2 = Matrix::Zero(4, 4);
    q1(0, 0) = q1(1, 1) = 1;
    q2(2, 2) = q2(3, 3) = 1;
    Trajectory traj = trajectory(g, rho0, 8.0, 32, {}, {q1, q2});
    // block_norms layout: (q1,q1), (q1,q2), (q2,q1), (q2,q2)
    for (size_t k = 1; k < traj.monitors.size(); ++k) {
        CHECK(traj.monitors[k].block_norms[1] < traj.monitors[k - 1].block_norms[1] + 1e-12);
    }
    // the whole off-diagonal block decays like e^{-t}
    CHECK(traj.monitors.back().block_norms[1] == Catch::Approx(0.5 * std::exp(-8.0)).margin(1e-9));
}

TEST_CASE("in-phase pair keeps the oscillating phase relation") {
    auto g = undamped_oscillation();
    Vector psi(4);
    psi << 1, 0, 1, 0;
    psi /= psi.norm();
    DensityMatrix rho0{Matrix(psi * psi.adjoint())};

    Trajectory traj = trajectory(g, rho0, 8.0, 40);
    const Complex c0 = traj.states.front()(0, 2) + traj.states.front()(1, 3);
    for (const auto& s : traj.states) {
        CHECK(std::abs(std::abs(s(0, 2) + s(1, 3)) - std::abs(c0)) < 1e-9);
    }
}

TEST_CASE("rank bound monitor") {
    // pure Hamiltonian evolution keeps eigenvalues constant
    auto gh = make_generator(Matrix(sigma_z()), {});
    std::mt19937_64 rng(13);
    DensityMatrix rho{random_density(rng, 2)};
    auto rep = check_rank_bound(gh, trajectory(gh, rho, 3.0, 12));
    CHECK(rep.transfer_norm_sq_sum == 0.0);
    CHECK(rep.pass);
    CHECK(rep.worst_margin >= -1e-10);

    // qubit exchange: sum ||h||^2 = 2 and closed form rho(t) = 1/2 + 0.4 e^{-2t} sigma_z
    auto g = dissipation_qubit();
    Matrix rho0 = Matrix::Zero(2, 2);
    rho0(0, 0) = 0.9;
    rho0(1, 1) = 0.1;
    Trajectory traj = trajectory(g, DensityMatrix{rho0}, 3.0, 30);
    auto rep2 = check_rank_bound(g, traj);
    CHECK(rep2.transfer_norm_sq_sum == Catch::Approx(2.0).margin(1e-12));
    CHECK(rep2.pass);
    for (size_t k = 0; k < traj.times.size(); ++k) {
        const double expected = 0.5 - 0.4 * std::exp(-2.0 * traj.times[k]);
        CHECK(std::abs(traj.monitors[k].min_eigenvalue - expected) < 1e-9);
        CHECK(traj.monitors[k].min_eigenvalue >= 0.1 * std::exp(-2.0 * traj.times[k]) - 1e-8);
    }

    // dense cascade state never violates the bound
    auto gc = cascade_four();
    auto rep3 = check_rank_bound(gc, trajectory(gc, maximally_mixed(4), 5.0, 25));
    CHECK(rep3.pass);
}
