#include "lindblad/perturbation.hpp"

#include "helpers.hpp"

#include <catch2/catch_amalgamated.hpp>

#include <random>

using namespace lindblad;
using namespace testutil;

namespace {

// the worked perturbation of the qubit exchange example: k+ = (1 - sigma_z)/2
PerturbedGenerator qubit_pumped() {
    Matrix kp = Matrix::Zero(2, 2);
    kp(1, 1) = 1.0;
    return make_perturbed(dissipation_qubit(), {}, {}, {kp, Matrix::Zero(2, 2)});
}

// two enclosures merged by one new transfer operator with asymmetric couplings
PerturbedGenerator enclosure_merge() {
    Matrix k = Matrix::Zero(4, 4);
    k(0, 2) = 1.0;
    k(3, 0) = 0.5;
    return make_perturbed(dephasing_pair(), {}, {}, {Matrix::Zero(4, 4), Matrix::Zero(4, 4), k});
}

Matrix brute_force_stationary(const LindbladGenerator& g) {
    auto kernel = null_space(build_superoperator(g).matrix);
    REQUIRE(kernel.size() == 1);
    Matrix rho = hermitize(unvectorize(kernel.front(), g.dim));
    if (rho.norm() < 0.5 * kernel.front().norm()) {
        rho = hermitize(kI * unvectorize(kernel.front(), g.dim));
    }
    rho /= rho.trace().real();
    return rho;
}

} // namespace

TEST_CASE("first and second order superoperators") {
    // no perturbation at all
    auto zero = make_perturbed(dissipation_qubit(), {}, {}, {});
    CHECK(build_E(zero).matrix.norm() < 1e-14);
    CHECK(build_F(zero).matrix.norm() < 1e-14);

    auto pg = qubit_pumped();
    const Matrix omega = 0.5 * Matrix::Identity(2, 2);
    CHECK((build_E(pg).apply(omega) - 0.5 * sigma_x()).norm() < 1e-13);

    // E annihilates traces
    std::mt19937_64 rng(3);
    for (int k = 0; k < 5; ++k) {
        Matrix x = random_matrix(rng, 2);
        CHECK(std::abs(build_E(pg).apply(x).trace()) < 1e-12);
    }
    CHECK(build_E(pg).adjoint().apply(Matrix::Identity(2, 2)).norm() < 1e-12);

    // pure Hamiltonian perturbation commuting with omega gives E(omega) = 0
    auto ph = make_perturbed(dissipation_qubit(), Matrix(sigma_z()), {}, {});
    CHECK(build_E(ph).apply(omega).norm() < 1e-14);

    // F with w only is the Hamiltonian commutator
    auto pw = make_perturbed(dissipation_qubit(), {}, Matrix(sigma_x()), {});
    const Superoperator cw = build_superoperator(make_generator(Matrix(sigma_x()), {}));
    CHECK((build_F(pw).matrix - cw.matrix).norm() < 1e-13);

    // F of the pumped qubit equals the dissipator of k+ alone
    Matrix kp = Matrix::Zero(2, 2);
    kp(1, 1) = 1.0;
    const Superoperator fk = build_superoperator(make_generator(2, {kp}));
    CHECK((build_F(pg).matrix - fk.matrix).norm() < 1e-13);
}

TEST_CASE("quadratic expansion of the perturbed generator is exact") {
    auto pg = enclosure_merge();
    const Superoperator s0 = build_superoperator(pg.base);
    const Superoperator se = build_E(pg);
    const Superoperator sf = build_F(pg);
    for (double lambda : {0.1, 1.0}) {
        const Superoperator direct = build_superoperator(at_lambda(pg, lambda));
        const Matrix assembled = s0.matrix + lambda * se.matrix + lambda * lambda * sf.matrix;
        CHECK((assembled - direct.matrix).norm() < 1e-12);
    }
    // finite-difference consistency: (D_lambda - D_0)/lambda - lambda F = E
    const double l = 1e-4;
    const Matrix fd =
        (build_superoperator(at_lambda(pg, l)).matrix - s0.matrix) / l - l * sf.matrix;
    CHECK((fd - se.matrix).norm() < 1e-9);
}

TEST_CASE("constrained inverse of the generator") {
    Tolerance tol;
    auto g = dissipation_qubit();
    auto inv = constrained_inverse(g, stationary_states(g, tol), tol);

    CHECK(inv.solve(Matrix::Zero(2, 2)).norm() < 1e-12);

    // D0(sigma_x) = -sigma_x, so the preimage of -sigma_x/2 is sigma_x/2
    CHECK((inv.solve(Matrix(-0.5 * sigma_x())) - 0.5 * sigma_x()).norm() < 1e-10);

    // the first-order chain reproduces sigma_1 = sigma_x / 2
    auto pg = qubit_pumped();
    const Matrix omega = 0.5 * Matrix::Identity(2, 2);
    const Matrix sigma1 = -inv.solve(build_E(pg).apply(omega));
    CHECK((sigma1 + 0.5 * sigma_x()).norm() > 0.9); // not the wrong sign
    CHECK((sigma1 - 0.5 * sigma_x()).norm() < 1e-10);

    // solvability signal: difference of the two extremal states is stationary
    auto g2 = decay_two_basins();
    auto inv2 = constrained_inverse(g2, stationary_states(g2, tol), tol);
    Matrix tau = unit(3, 0, 0) - unit(3, 1, 1);
    try {
        inv2.solve(tau);
        FAIL("expected NotInRangeError");
    } catch (const NotInRangeError& e) {
        REQUIRE(e.offending_traces.size() == 2);
        CHECK(std::abs(e.offending_traces[0] - Complex(1, 0)) < 1e-9);
        CHECK(std::abs(e.offending_traces[1] - Complex(-1, 0)) < 1e-9);
    }

    // round trip on matrices inside range(D0)
    std::mt19937_64 rng(8);
    const Superoperator s0 = build_superoperator(g2);
    for (int k = 0; k < 5; ++k) {
        const Matrix tau_in = s0.apply(random_matrix(rng, 3));
        const Matrix sigma = inv2.solve(tau_in);
        CHECK((s0.apply(sigma) - tau_in).norm() < 1e-8 * std::max(1.0, tau_in.norm()));
    }
}

TEST_CASE("series for the pumped qubit") {
    auto pg = qubit_pumped();
    auto series = expand_unique(pg, 11);

    // sigma_{2n+1} = (-2)^{-n} sigma_x / 2, sigma_{2n} = 0 for n >= 1
    for (int n = 0; 2 * n + 1 <= series.order; ++n) {
        const Matrix expected = std::pow(-2.0, -n) * 0.5 * sigma_x();
        CHECK((series.sigmas[static_cast<size_t>(2 * n + 1)] - expected).norm() < 1e-10);
    }
    for (int n = 1; 2 * n <= series.order; ++n) {
        CHECK(series.sigmas[static_cast<size_t>(2 * n)].norm() < 1e-10);
    }

    // resummed closed form at lambda = 1/2
    auto series20 = expand_unique(pg, 20);
    const double lambda = 0.5;
    const Matrix closed = 0.5 * Matrix::Identity(2, 2) +
                          (lambda / (1.0 + lambda * lambda / 2.0)) * 0.5 * sigma_x();
    CHECK((series20.partial_sum(lambda) - closed).norm() < 1e-8);
    CHECK(series_residual(pg, series20, lambda) < 1e-8);

    // convergence radius sqrt(2): ratio test flags divergence at 1.5
    CHECK(series_diverges(series20, 1.5));
    CHECK_FALSE(series_diverges(series20, 0.5));

    // Hermitian and traceless coefficients
    for (size_t n = 1; n < series20.sigmas.size(); ++n) {
        CHECK(hermiticity_defect(series20.sigmas[n]) < 1e-10);
        CHECK(std::abs(series20.sigmas[n].trace()) < 1e-10);
    }

    // zero perturbation keeps the stationary state unchanged
    auto zero = make_perturbed(dissipation_qubit(), {}, {}, {});
    auto zs = expand_unique(zero, 5);
    CHECK((zs.sigmas[0] - 0.5 * Matrix::Identity(2, 2)).norm() < 1e-10);
    for (size_t n = 1; n < zs.sigmas.size(); ++n) {
        CHECK(zs.sigmas[n].norm() < 1e-12);
    }

    // degenerate bases are rejected with a pointer to the other entry point
    auto degenerate = make_perturbed(dephasing_pair(), {}, {}, {});
    CHECK_THROWS_AS(expand_unique(degenerate, 3), InputError);
}

TEST_CASE("empirical residual order of the series") {
    auto pg = qubit_pumped();
    for (int order : {3, 6}) {
        auto series = expand_unique(pg, order);
        // keep lambda^{order+1} above the double-precision floor of the
        // residual evaluation, otherwise the fit flattens out
        const double lmin = std::max(1e-3, std::pow(1e-12, 1.0 / (order + 1)));
        std::vector<double> ls;
        for (int i = 0; i < 5; ++i) {
            ls.push_back(lmin * std::pow(0.1 / lmin, i / 4.0));
        }
        double sx = 0, sy = 0, sxx = 0, sxy = 0;
        for (double l : ls) {
            const double x = std::log(l), y = std::log(series_residual(pg, series, l));
            sx += x;
            sy += y;
            sxx += x * x;
            sxy += x * y;
        }
        const double n = static_cast<double>(ls.size());
        const double slope = (n * sxy - sx * sy) / (n * sxx - sx * sx);
        CHECK(slope >= order + 0.5);
    }
}

TEST_CASE("merging of two enclosures by a direct dissipator") {
    Tolerance tol;
    auto pg = enclosure_merge();

    auto series = expand_degenerate(pg, 6, tol);
    REQUIRE(series.kernel_basis.size() == 2);

    // alpha_0 from the trace formula: Tr[Q1 k rho2 k+ Q1] = 1/2,
    // Tr[Q2 k rho1 k+ Q2] = 1/8, so alpha_0 = (1/2)/(5/8) = 0.8
    CHECK(std::abs(series.alphas[0](0) - Complex(0.8, 0)) < 1e-9);
    CHECK(std::abs(series.alphas[0](1) - Complex(0.2, 0)) < 1e-9);

    // odd orders vanish (E = 0)
    CHECK(series.sigmas[1].norm() < 1e-9);
    CHECK(series.sigmas[3].norm() < 1e-9);

    // order-6 partial sum matches the directly computed stationary state
    const double lambda = 0.05;
    const Matrix brute = brute_force_stationary(at_lambda(pg, lambda));
    CHECK((series.partial_sum(lambda) - brute).norm() < 1e-6);

    // symmetric couplings give the even mixture
    Matrix ks = Matrix::Zero(4, 4);
    ks(0, 2) = 1.0;
    ks(2, 0) = 1.0;
    auto pg_sym = make_perturbed(dephasing_pair(), {}, {},
                                 {Matrix::Zero(4, 4), Matrix::Zero(4, 4), ks});
    auto sym_series = expand_degenerate(pg_sym, 4, tol);
    CHECK(std::abs(sym_series.alphas[0](0) - Complex(0.5, 0)) < 1e-9);
    CHECK(std::abs(sym_series.alphas[0](1) - Complex(0.5, 0)) < 1e-9);
}

TEST_CASE("dephasing pair perturbed by a Hamiltonian") {
    Tolerance tol;
    Matrix v = Matrix::Zero(4, 4);
    v(0, 2) = 1.0;
    v(2, 0) = 1.0;
    auto pg = make_perturbed(dephasing_pair(), v, {}, {});

    auto series = expand_degenerate(pg, 6, tol);
    const Complex alpha0 = series.alphas[0](0);

    // the solvability condition that fixes alpha_0:
    // alpha0 Tr[Q1 E(D0inv(E(rho1 - rho2)))] = -Tr[Q1 E(D0inv(E(rho2)))]
    auto ss = stationary_states(pg.base, tol);
    auto inv = constrained_inverse(pg.base, ss, tol);
    const Superoperator e = build_E(pg);
    const Matrix rho1 = ss.basis_states[0], rho2 = ss.basis_states[1];
    Matrix q1 = Matrix::Zero(4, 4);
    q1(0, 0) = q1(1, 1) = 1;
    const Complex denom = (q1 * e.apply(inv.solve(e.apply(rho1 - rho2)))).trace();
    const Complex num = (q1 * e.apply(inv.solve(e.apply(rho2)))).trace();
    REQUIRE(std::abs(denom) > 1e-9);
    CHECK(std::abs(alpha0 * denom + num) < 1e-9);

    // series against the direct kernel of the perturbed generator
    const double lambda = 0.05;
    const Matrix brute = brute_force_stationary(at_lambda(pg, lambda));
    CHECK((series.partial_sum(lambda) - brute).norm() < 1e-6);
}

TEST_CASE("series agrees with brute force on random perturbed systems") {
    std::mt19937_64 rng(2024);
    int done = 0;
    while (done < 20) {
        const Index d = 2 + static_cast<Index>(done % 3);
        auto base = random_generator(rng, d);
        if (null_space(build_superoperator(base).matrix).size() != 1) continue;
        auto pg = make_perturbed(base, random_hermitian(rng, d, 0.3), {},
                                 {random_matrix(rng, d, 0.3)});
        auto series = expand_unique(pg, 8);
        const double lambda = 0.05;
        const Matrix brute = brute_force_stationary(at_lambda(pg, lambda));
        CHECK((series.partial_sum(lambda) - brute).norm() < 1e-6);
        ++done;
    }
}

TEST_CASE("structure continuity probes") {
    Tolerance tol;

    // zero perturbation: identical structure at every lambda
    auto zero = make_perturbed(decay_two_basins(), {}, {}, {});
    auto rep0 = structure_continuity_probe(zero, {0.0, 0.1, 0.5}, tol);
    CHECK(rep0.transitions.empty());
    CHECK(rep0.one_way_ok);

    // coupling the two basins kills one stationary state
    Matrix k01 = Matrix::Zero(3, 3);
    k01(0, 1) = 1.0;
    auto merge = make_perturbed(decay_two_basins(), {}, {},
                                {Matrix::Zero(3, 3), Matrix::Zero(3, 3), k01});
    auto rep1 = structure_continuity_probe(merge, {0.1}, tol);
    CHECK(rep1.one_way_ok);
    bool drop = false;
    for (const auto& t : rep1.transitions) {
        if (t.kind == "stationary-count-drop") drop = true;
    }
    CHECK(drop);
    CHECK(rep1.points[0].stationary_dim == 2);
    CHECK(rep1.points[1].stationary_dim == 1);

    // detuning the two internal dissipations damps the oscillating relation
    auto g6 = undamped_oscillation();
    auto g5 = dephasing_pair();
    auto detune = make_perturbed(g6, {}, {}, {g5.transfer_ops[0], g5.transfer_ops[1]});
    auto rep2 = structure_continuity_probe(detune, {0.1}, tol);
    bool osc_lost = false;
    for (const auto& t : rep2.transitions) {
        if (t.kind == "oscillating-lost") osc_lost = true;
    }
    CHECK(osc_lost);
    CHECK(rep2.points[1].stationary_dim == 2);

    // leaking a collecting basin into the cascade
    const double s = 1.0 / std::sqrt(2.0);
    Matrix hb = Matrix::Zero(4, 4);
    hb(0, 1) = s;
    hb(2, 3) = s;
    auto base = make_generator(4, {hb, hb});
    Matrix k02 = Matrix::Zero(4, 4);
    k02(0, 2) = 1.0;
    auto leak = make_perturbed(base, {}, {}, {Matrix::Zero(4, 4), Matrix::Zero(4, 4), k02});
    auto rep3 = structure_continuity_probe(leak, {0.1}, tol);
    bool basin_lost = false;
    for (const auto& t : rep3.transitions) {
        if (t.kind == "collecting-basin-lost") basin_lost = true;
    }
    CHECK(basin_lost);
    CHECK(rep3.points[0].collecting_basin_count == 2);
    CHECK(rep3.points[1].collecting_basin_count == 1);
    CHECK(rep3.one_way_ok);
}
