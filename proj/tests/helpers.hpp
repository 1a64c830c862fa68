// helpers.hpp — Small operators, example generators and random sampling
// shared across the test suite.

#pragma once

#include "lindblad/generator.hpp"

#include <random>
#include <vector>

namespace testutil {

using lindblad::Complex;
using lindblad::Index;
using lindblad::LindbladGenerator;
using lindblad::Matrix;
using lindblad::Vector;

inline Matrix sigma_x() {
    Matrix m(2, 2);
    m << 0, 1, 1, 0;
    return m;
}

inline Matrix sigma_y() {
    Matrix m(2, 2);
    m << Complex(0, 0), Complex(0, -1), Complex(0, 1), Complex(0, 0);
    return m;
}

inline Matrix sigma_z() {
    Matrix m(2, 2);
    m << 1, 0, 0, -1;
    return m;
}

inline Matrix unit(Index d, Index i, Index j) { return lindblad::matrix_unit(d, i, j); }

// Two-level amplitude exchange: h+ = |0><1|, h- = |1><0| in the spec's
// index convention h+ = [[0,1],[0,0]].
inline LindbladGenerator dissipation_qubit() {
    return lindblad::make_generator(2, {unit(2, 0, 1), unit(2, 1, 0)});
}

// d=3 system with two one-dimensional collecting basins and no stationary
// phase relations.
inline LindbladGenerator decay_two_basins() {
    Matrix hp = Matrix::Zero(3, 3), hm = Matrix::Zero(3, 3);
    hp(0, 0) = 1;
    hp(0, 2) = 1;
    hm(0, 0) = 1;
    hm(0, 2) = -1;
    hm(1, 2) = 1;
    return lindblad::make_generator(3, {hp, hm});
}

// d=3 system whose two collecting basins carry a stationary phase relation.
inline LindbladGenerator decay_with_phase() {
    Matrix hp = Matrix::Zero(3, 3), hm = Matrix::Zero(3, 3);
    hp(0, 2) = 1;
    hm(0, 2) = 1;
    hm(1, 2) = 1;
    return lindblad::make_generator(3, {hp, hm});
}

// d=4, two 2-dim enclosures with out-of-phase internal dissipation.
inline LindbladGenerator dephasing_pair() {
    Matrix hp = Matrix::Zero(4, 4), hm = Matrix::Zero(4, 4);
    hp(0, 1) = 1;
    hp(2, 3) = 1;
    hm(1, 0) = 1;
    hm(3, 2) = -1;
    return lindblad::make_generator(4, {hp, hm});
}

// Same pair in phase, plus a block Hamiltonian that makes the surviving
// phase relation oscillate.
inline LindbladGenerator undamped_oscillation() {
    Matrix h = Matrix::Zero(4, 4);
    h(0, 0) = 1;
    h(1, 1) = 1;
    Matrix hp = Matrix::Zero(4, 4), hm = Matrix::Zero(4, 4);
    hp(0, 1) = 1;
    hp(2, 3) = 1;
    hm(1, 0) = 1;
    hm(3, 2) = 1;
    return lindblad::make_generator(h, {hp, hm});
}

inline LindbladGenerator stationary_phase_pair() {
    auto g = undamped_oscillation();
    g.hamiltonian.setZero();
    return g;
}

// d=4 decay cascade with two flow lines sharing one end. Couplings chosen so
// the diagonal occupations obey r11' = r22 + 2 r33, r22' = -r22,
// r33' = -2 r33 + r44, r44' = -r44.
inline LindbladGenerator cascade_four() {
    const double s = 1.0 / std::sqrt(2.0);
    Matrix hp = Matrix::Zero(4, 4), hm = Matrix::Zero(4, 4);
    hp(0, 1) = s;
    hp(0, 2) = 1;
    hp(2, 3) = s;
    hm(0, 1) = s;
    hm(0, 2) = -1;
    hm(2, 3) = s;
    return lindblad::make_generator(4, {hp, hm});
}

// d=4 with dissipative 2-dim collecting block and decaying 2-dim block.
inline LindbladGenerator decay_dissipation_inside() {
    Matrix hp = Matrix::Zero(4, 4), hm = Matrix::Zero(4, 4);
    hp(0, 1) = 1;
    hp(0, 2) = 1;
    hp(1, 0) = 1;
    hp(2, 3) = 1;
    hp(3, 2) = 1;
    hm(0, 1) = -1;
    hm(0, 2) = 1;
    hm(1, 0) = 1;
    hm(2, 3) = -1;
    hm(3, 2) = 1;
    return lindblad::make_generator(4, {hp, hm});
}

// --------------------------- random sampling --------------------------------

inline Matrix random_matrix(std::mt19937_64& rng, Index d, double scale = 1.0) {
    std::normal_distribution<double> n(0.0, scale);
    Matrix m(d, d);
    for (Index i = 0; i < d; ++i) {
        for (Index j = 0; j < d; ++j) {
            m(i, j) = Complex(n(rng), n(rng));
        }
    }
    return m;
}

inline Matrix random_hermitian(std::mt19937_64& rng, Index d, double scale = 1.0) {
    return lindblad::hermitize(random_matrix(rng, d, scale));
}

inline Matrix random_density(std::mt19937_64& rng, Index d) {
    Matrix a = random_matrix(rng, d);
    Matrix rho = a * a.adjoint();
    rho /= rho.trace().real();
    return rho;
}

inline LindbladGenerator random_generator(std::mt19937_64& rng, Index d, int n_ops = -1,
                                          bool with_hamiltonian = true) {
    std::uniform_int_distribution<int> cnt(1, 3);
    const int m = n_ops < 0 ? cnt(rng) : n_ops;
    std::vector<Matrix> ops;
    const double scale = 1.0 / std::sqrt(static_cast<double>(d));
    for (int k = 0; k < m; ++k) {
        ops.push_back(random_matrix(rng, d, scale));
    }
    Matrix h = with_hamiltonian ? random_hermitian(rng, d, scale) : Matrix::Zero(d, d);
    return lindblad::make_generator(std::move(h), std::move(ops));
}

} // namespace testutil
