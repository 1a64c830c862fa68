// commutant.hpp — Numerical computation of the commutant {H, h_a, h_a†}' and
// its minimal projectors, which are the enclosure projectors.

#pragma once

#include "lindblad/generator.hpp"

#include <cstdint>
#include <random>
#include <vector>

namespace lindblad {

// HS-orthonormal basis of a *-algebra of matrices.
struct CommutantBasis {
    Index dim = 0;
    std::vector<Matrix> basis;

    Index size() const { return static_cast<Index>(basis.size()); }
};

// Orthogonal projection of x onto span(basis) in the HS inner product.
inline Matrix project_to_span(const std::vector<Matrix>& basis, const Matrix& x) {
    Matrix out = Matrix::Zero(x.rows(), x.cols());
    for (const auto& b : basis) {
        out += hs_inner(b, x) * b;
    }
    return out;
}

// {X : [X,H] = 0, [X,h_a] = 0, [X,h_a†] = 0 for all a}. Adjoints of the
// transfer operators are included, which closes the result under * and
// products; for the conserved projectors this changes nothing, since a
// projector commuting with h also commutes with h†.
inline CommutantBasis commutant(const LindbladGenerator& g, const Tolerance& tol = {}) {
    const Index d = g.dim;
    std::vector<Matrix> ops;
    ops.push_back(g.hamiltonian);
    for (const auto& h : g.transfer_ops) {
        ops.push_back(h);
        ops.push_back(h.adjoint());
    }
    const Matrix id = Matrix::Identity(d, d);
    Matrix stacked(static_cast<Index>(ops.size()) * d * d, d * d);
    for (size_t k = 0; k < ops.size(); ++k) {
        // X -> [A, X] has matrix (I ⊗ A) - (Aᵀ ⊗ I)
        stacked.middleRows(static_cast<Index>(k) * d * d, d * d) =
            kron(id, ops[k]) - kron(ops[k].transpose(), id);
    }
    CommutantBasis cb;
    cb.dim = d;
    for (const auto& v : null_space(stacked, tol)) {
        cb.basis.push_back(unvectorize(v, d));
    }
    return cb;
}

namespace detail {

inline Matrix default_weight(Index d) {
    Matrix w = Matrix::Zero(d, d);
    for (Index i = 0; i < d; ++i) w(i, i) = static_cast<double>(i);
    return w;
}

// Splits the projector p (an element of the algebra) along the eigenvalue
// clusters of a self-adjoint algebra element g_elem compressed to range(p).
// Returns at most rank(p) sub-projectors; size 1 means no split happened.
inline std::vector<Matrix> eigen_split(const Matrix& p, const Matrix& g_elem,
                                       const Tolerance& tol) {
    const Matrix v = range_isometry(p, tol);
    Eigen::SelfAdjointEigenSolver<Matrix> es(hermitize(Matrix(v.adjoint() * g_elem * v)));
    const RealVector& vals = es.eigenvalues();
    const double scale = std::max(1.0, std::max(std::abs(vals.minCoeff()), std::abs(vals.maxCoeff())));
    Vector complex_vals(vals.size());
    for (Index i = 0; i < vals.size(); ++i) complex_vals(i) = vals(i);
    const auto clusters = cluster_values(complex_vals, tol.eig_group_tol * scale);
    std::vector<Matrix> parts;
    for (const auto& cl : clusters) {
        Matrix blk = Matrix::Zero(p.rows(), p.cols());
        for (Index idx : cl) {
            const Vector col = v * es.eigenvectors().col(idx);
            blk += col * col.adjoint();
        }
        parts.push_back(hermitize(blk));
    }
    return parts;
}

} // namespace detail

// Mutually orthogonal minimal projectors of the algebra spanned by cb, i.e.
// the spectral projectors of a maximal abelian subalgebra. The split element
// is, first, the projection of a fixed weight operator onto the algebra
// (which keeps coordinate-aligned decompositions on coordinate axes and makes
// reports reproducible); degenerate splits fall back to a seeded generic
// element, re-randomized up to three times. Output ordered by rank ascending,
// then weight ascending, then entry-lexicographic.
inline std::vector<Matrix> minimal_conserved_projectors(const CommutantBasis& cb,
                                                        const Tolerance& tol = {},
                                                        std::uint64_t seed = 0xC0FFEE,
                                                        const Matrix* weight = nullptr) {
    const Index d = cb.dim;
    const Matrix w = weight ? *weight : detail::default_weight(d);
    std::mt19937_64 rng(seed);
    std::normal_distribution<double> gauss(0.0, 1.0);

    std::vector<Matrix> out;
    std::vector<Matrix> pending = {Matrix::Identity(d, d)};
    while (!pending.empty()) {
        Matrix p = pending.back();
        pending.pop_back();

        // compressed algebra P·N·P; scalar block means P is minimal
        std::vector<Matrix> compressed;
        for (const auto& b : cb.basis) {
            compressed.push_back(p * b * p);
        }
        compressed = orthonormalize(compressed, tol.rank_tol);
        if (compressed.size() <= 1) {
            out.push_back(p);
            continue;
        }

        bool split_done = false;
        for (int attempt = 0; attempt < 4 && !split_done; ++attempt) {
            Matrix g_elem;
            if (attempt == 0) {
                g_elem = hermitize(project_to_span(compressed, w));
            } else {
                Matrix r = Matrix::Zero(d, d);
                for (const auto& b : compressed) {
                    r += Complex(gauss(rng), gauss(rng)) * b;
                }
                g_elem = hermitize(r);
            }
            if (g_elem.norm() < tol.rank_tol) continue;
            auto parts = detail::eigen_split(p, g_elem, tol);
            if (parts.size() >= 2) {
                for (auto& part : parts) pending.push_back(std::move(part));
                split_done = true;
            }
        }
        if (!split_done) {
            throw InternalError("minimal_conserved_projectors: block resisted splitting");
        }
    }

    std::sort(out.begin(), out.end(), [&](const Matrix& a, const Matrix& b) {
        const auto ra = numeric_rank(a, tol.rank_tol), rb = numeric_rank(b, tol.rank_tol);
        if (ra != rb) return ra < rb;
        const double wa = (a * w).trace().real(), wb = (b * w).trace().real();
        if (std::abs(wa - wb) > 1e-6) return wa < wb;
        return lexicographic_compare(a, b) < 0;
    });
    return out;
}

inline std::vector<Matrix> minimal_enclosures(const LindbladGenerator& g, const Tolerance& tol = {},
                                              std::uint64_t seed = 0xC0FFEE,
                                              const Matrix* weight = nullptr) {
    return minimal_conserved_projectors(commutant(g, tol), tol, seed, weight);
}

} // namespace lindblad
