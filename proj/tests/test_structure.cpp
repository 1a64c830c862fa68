#include "lindblad/structure.hpp"

#include "lindblad/asymptotics.hpp"

#include "helpers.hpp"

#include <catch2/catch_amalgamated.hpp>

#include <random>

using namespace lindblad;
using namespace testutil;

TEST_CASE("commutant dimensions") {
    CHECK(commutant(dissipation_qubit()).size() == 1);
    CHECK(commutant(dephasing_pair()).size() == 2);
    CHECK(commutant(make_generator(2, {})).size() == 4); // full matrix algebra

    // block projectors lie in the commutant of the dephasing pair
    auto cb = commutant(dephasing_pair());
    Matrix q1 = Matrix::Zero(4, 4);
    q1(0, 0) = q1(1, 1) = 1;
    CHECK((project_to_span(cb.basis, q1) - q1).norm() < 1e-9);
}

TEST_CASE("minimal conserved projectors") {
    Tolerance tol;

    auto trivial = minimal_conserved_projectors(commutant(dissipation_qubit()), tol);
    REQUIRE(trivial.size() == 1);
    CHECK((trivial[0] - Matrix::Identity(2, 2)).norm() < 1e-9);

    auto pair = minimal_conserved_projectors(commutant(dephasing_pair()), tol);
    REQUIRE(pair.size() == 2);
    Matrix q1 = Matrix::Zero(4, 4), q2 = Matrix::Zero(4, 4);
    q1(0, 0) = q1(1, 1) = 1;
    q2(2, 2) = q2(3, 3) = 1;
    CHECK((pair[0] - q1).norm() < 1e-9);
    CHECK((pair[1] - q2).norm() < 1e-9);

    // full matrix algebra: two orthogonal rank-1 conserved projectors
    auto g_free = make_generator(2, {});
    auto free2 = minimal_conserved_projectors(commutant(g_free), tol);
    REQUIRE(free2.size() == 2);
    for (const auto& p : free2) {
        CHECK(projector_defect(p) < 1e-9);
        CHECK(numeric_rank(p, tol.rank_tol) == 1);
        CHECK(apply_heisenberg(g_free, p).norm() < 1e-10);
    }
    CHECK((free2[0] * free2[1]).norm() < 1e-9);

    // conservation of every minimal projector
    auto gd = dephasing_pair();
    auto gp = decay_with_phase();
    for (const auto* g : {&gd, &gp}) {
        for (const auto& p : minimal_conserved_projectors(commutant(*g), tol)) {
            CHECK(apply_heisenberg(*g, p).norm() < 1e-10);
        }
    }
}

TEST_CASE("lazy and collecting certificates") {
    Tolerance tol;
    auto g2 = decay_two_basins();
    Matrix p12 = Matrix::Zero(3, 3);
    p12(0, 0) = p12(1, 1) = 1;
    CHECK(lazy_certificate(g2, p12, tol).pass);

    auto g1 = dissipation_qubit();
    CHECK_FALSE(lazy_certificate(g1, unit(2, 0, 0), tol).pass);
    CHECK(lazy_certificate(g1, Matrix::Identity(2, 2), tol).pass);

    auto g3 = decay_with_phase();
    CHECK(collecting_certificate(g3, p12, tol).pass);

    auto gc = cascade_four();
    CHECK(collecting_certificate(gc, unit(4, 0, 0), tol).pass);
    CHECK_FALSE(collecting_certificate(gc, unit(4, 1, 1), tol).pass);
    CHECK_FALSE(lazy_certificate(gc, unit(4, 1, 1), tol).pass);

    CHECK_THROWS_AS(lazy_certificate(g1, Matrix(0.3 * Matrix::Identity(2, 2)), tol), DimensionError);
}

TEST_CASE("cascade of the four-level decay example") {
    auto rep = cascade(cascade_four());
    REQUIRE(rep.levels.size() == 3);
    REQUIRE(rep.levels[0].size() == 1);
    REQUIRE(rep.levels[1].size() == 2);
    REQUIRE(rep.levels[2].size() == 1);
    CHECK((rep.levels[0][0] - unit(4, 0, 0)).norm() < 1e-8);
    CHECK((rep.levels[1][0] - unit(4, 1, 1)).norm() < 1e-8);
    CHECK((rep.levels[1][1] - unit(4, 2, 2)).norm() < 1e-8);
    CHECK((rep.levels[2][0] - unit(4, 3, 3)).norm() < 1e-8);
    CHECK((rep.p0 - unit(4, 0, 0)).norm() < 1e-8);
    CHECK(rep.commutant_dim == 1);
    CHECK(rep.stationary_dim == 1);
    CHECK(rep.worst_decay_norm <= 1e-6);

    // restriction to the decaying part has lowest level span{e2, e3}
    Restriction res = restrict_generator(cascade_four(),
                                         Matrix(Matrix::Identity(4, 4) - rep.p0));
    auto sub = cascade(res.generator);
    Matrix expected = Matrix::Zero(3, 3);
    expected(0, 0) = expected(1, 1) = 1;
    CHECK((sub.p0 - expected).norm() < 1e-8);
}

TEST_CASE("cascade of simple systems") {
    auto rep = cascade(dissipation_qubit());
    REQUIRE(rep.levels.size() == 1);
    REQUIRE(rep.levels[0].size() == 1);
    CHECK((rep.levels[0][0] - Matrix::Identity(2, 2)).norm() < 1e-9);

    auto rep4 = cascade(decay_dissipation_inside());
    REQUIRE(rep4.levels.size() == 2);
    Matrix q1 = Matrix::Zero(4, 4), q2 = Matrix::Zero(4, 4);
    q1(0, 0) = q1(1, 1) = 1;
    q2(2, 2) = q2(3, 3) = 1;
    REQUIRE(rep4.levels[0].size() == 1);
    REQUIRE(rep4.levels[1].size() == 1);
    CHECK((rep4.levels[0][0] - q1).norm() < 1e-8);
    CHECK((rep4.levels[1][0] - q2).norm() < 1e-8);
}

TEST_CASE("intertwiners of the three-level examples") {
    Tolerance tol;

    // stationary phase relation between the two basins
    auto g3 = decay_with_phase();
    auto rep3 = cascade(g3);
    auto tw3 = find_intertwiners(g3, rep3, tol);
    REQUIRE(tw3.size() == 1);
    CHECK(tw3[0].energy_shift == 0.0);
    CHECK(tw3[0].defect < 1e-8);

    // no intertwiner when the stationary states cannot be paired
    auto g2 = decay_two_basins();
    auto rep2 = cascade(g2);
    CHECK(find_intertwiners(g2, rep2, tol).empty());
}

TEST_CASE("oscillating intertwiner of the in-phase pair") {
    Tolerance tol;
    auto g = undamped_oscillation();
    auto rep = cascade(g);
    REQUIRE(rep.collecting_basins.size() == 2);
    auto tws = find_intertwiners(g, rep, tol);
    REQUIRE(tws.size() == 1);
    CHECK(std::abs(tws[0].block_eigenvalue - Complex(0, -1)) < 1e-8);
    CHECK(tws[0].energy_shift == Catch::Approx(1.0).margin(1e-8));

    auto classes = dephasing_classes(rep, tws, tol);
    REQUIRE(classes.size() == 1);
    CHECK(classes[0].multiplicity == 2);
    CHECK(classes[0].inner_dim == 2);
    // group Hamiltonian diag(0, -1): anchor at zero, partner shifted by -r
    CHECK(std::abs(classes[0].group_hamiltonian(0, 0)) < 1e-9);
    CHECK(classes[0].group_hamiltonian(1, 1).real() == Catch::Approx(-1.0).margin(1e-8));
}

TEST_CASE("dephasing classes across the pair examples") {
    Tolerance tol;

    auto rep5 = analyze_structure(dephasing_pair(), tol);
    CHECK(rep5.dephasing_classes.size() == 2);
    for (const auto& c : rep5.dephasing_classes) {
        CHECK(c.multiplicity == 1);
        CHECK(c.inner_dim == 2);
    }

    auto rep7 = analyze_structure(stationary_phase_pair(), tol);
    REQUIRE(rep7.dephasing_classes.size() == 1);
    CHECK(rep7.dephasing_classes[0].multiplicity == 2);
    CHECK(rep7.dephasing_classes[0].group_hamiltonian.norm() < 1e-9);
    REQUIRE(rep7.intertwiners.size() == 1);
    CHECK(rep7.intertwiners[0].energy_shift == 0.0);
}

TEST_CASE("dynamical and stationarity symmetries") {
    Tolerance tol;

    // rotation about z commutes with the exchange dynamics
    auto g = dissipation_qubit();
    Matrix v = Matrix::Zero(2, 2);
    v(0, 0) = std::exp(kI * 0.7);
    v(1, 1) = std::exp(-kI * 0.7);
    auto cert = verify_symmetry(g, v, false, tol);
    CHECK(cert.dynamical.pass);
    CHECK(cert.stationarity.pass);

    // complex conjugation is an anti-unitary symmetry here
    auto certc = verify_symmetry(g, Matrix(Matrix::Identity(2, 2)), true, tol);
    CHECK(certc.dynamical.pass);

    // swapping the extremal states of the two-basin decay example preserves
    // the stationary set but not the dynamics
    auto g3 = decay_two_basins();
    Matrix swap = Matrix::Zero(3, 3);
    swap(0, 1) = swap(1, 0) = swap(2, 2) = 1;
    auto cert3 = verify_symmetry(g3, swap, false, tol);
    CHECK_FALSE(cert3.dynamical.pass);
    CHECK(cert3.stationarity.pass);

    CHECK(verify_symmetry(g3, Matrix(Matrix::Identity(3, 3)), false, tol).dynamical.pass);
    CHECK_THROWS_AS(verify_symmetry(g3, Matrix(2.0 * swap), false, tol), InputError);
}

TEST_CASE("maximal symmetry detection") {
    Tolerance tol;
    for (Index d : {2, 3, 4}) {
        std::vector<Matrix> hops;
        for (Index i = 0; i < d; ++i) {
            for (Index j = 0; j < d; ++j) {
                hops.push_back(matrix_unit(d, i, j));
            }
        }
        auto rep = detect_max_symmetry(make_generator(d, hops), tol);
        CHECK(rep.is_maximal);
        CHECK(rep.lambda == Catch::Approx(static_cast<double>(d)).margin(1e-9));
    }

    CHECK_FALSE(detect_max_symmetry(dissipation_qubit(), tol).is_maximal);
    CHECK(detect_max_symmetry(make_generator(1, {}), tol).is_maximal);
}

TEST_CASE("enclosures split the evolution into independent blocks") {
    auto g = dephasing_pair();
    auto encl = minimal_conserved_projectors(commutant(g));
    REQUIRE(encl.size() == 2);
    std::mt19937_64 rng(55);
    Matrix rho = random_density(rng, 4);
    for (double t : {0.5, 2.0}) {
        const Matrix full = evolve(g, rho, t);
        const Superoperator prop = expm(build_superoperator(g), t);
        for (const auto& qm : encl) {
            for (const auto& ql : encl) {
                const Matrix block = qm * rho * ql;
                CHECK((prop.apply(block) - qm * full * ql).norm() < 1e-8);
            }
        }
    }
}

TEST_CASE("invariant observable count equals restricted commutant dimension") {
    auto ga = decay_two_basins();
    auto gb = decay_with_phase();
    auto gc = cascade_four();
    for (const auto* g : {&ga, &gb, &gc}) {
        auto ss = stationary_states(*g);
        Restriction res = restrict_generator(*g, ss.p0);
        CHECK(static_cast<Index>(ss.invariant_observables.size()) ==
              commutant(res.generator).size());
    }
}

TEST_CASE("basin dimension multiset is seed independent") {
    auto ga = dephasing_pair();
    auto gb = stationary_phase_pair();
    auto gc = decay_with_phase();
    for (const auto* g : {&ga, &gb, &gc}) {
        auto cb = commutant(*g);
        std::vector<std::vector<Index>> multisets;
        for (std::uint64_t seed : {0xC0FFEEull, 1ull, 2ull}) {
            std::vector<Index> dims;
            for (const auto& p : minimal_conserved_projectors(cb, {}, seed)) {
                dims.push_back(numeric_rank(p, 1e-9));
            }
            std::sort(dims.begin(), dims.end());
            multisets.push_back(dims);
        }
        CHECK(multisets[0] == multisets[1]);
        CHECK(multisets[0] == multisets[2]);
    }
}

TEST_CASE("asymptotic form of evolved states") {
    Tolerance tol;

    // unique stationary state: lambda = 1, scalar R
    auto g = dissipation_qubit();
    auto rep = analyze_structure(g, tol);
    std::mt19937_64 rng(91);
    auto form = asymptotic_state(g, random_density(rng, 2), rep, tol);
    REQUIRE(form.components.size() == 1);
    CHECK(form.components[0].lambda == Catch::Approx(1.0).margin(1e-9));
    CHECK((form.components[0].r - Matrix::Identity(1, 1)).norm() < 1e-9);
    CHECK(form.model_residual < 1e-6);

    // tensor-product limit: the outer block of rho0 survives
    auto g7 = stationary_phase_pair();
    auto rep7 = analyze_structure(g7, tol);
    Matrix m(2, 2);
    m << 0.7, 0.2, 0.2, 0.3;
    Matrix sigma = random_density(rng, 2);
    Matrix rho0 = kron(m, sigma);
    auto form7 = asymptotic_state(g7, rho0, rep7, tol);
    REQUIRE(form7.components.size() == 1);
    CHECK(form7.components[0].lambda == Catch::Approx(1.0).margin(1e-8));
    for (Index i = 0; i < 2; ++i) {
        for (Index j = 0; j < 2; ++j) {
            CHECK(std::abs(form7.components[0].r(i, j)) ==
                  Catch::Approx(m(i, j).real()).margin(1e-7));
        }
    }

    // already stationary input reproduces itself exactly
    Matrix omega = 0.5 * Matrix::Identity(2, 2);
    auto form_stat = asymptotic_state(g, omega, rep, tol);
    CHECK((form_stat.evaluate(rep, 0.0) - omega).norm() < 1e-9);
}
