// spectral.hpp — Eigen-analysis of the generator superoperator: eigenvalue
// classification, stationary states, invariant observables.

#pragma once

#include "lindblad/certificates.hpp"
#include "lindblad/commutant.hpp"

#include <algorithm>
#include <vector>

namespace lindblad {

enum class PathClass { Stationary, Circular, StraightDecay, Spiral };

inline const char* to_string(PathClass p) {
    switch (p) {
        case PathClass::Stationary: return "stationary";
        case PathClass::Circular: return "circular";
        case PathClass::StraightDecay: return "straight";
        case PathClass::Spiral: return "spiral";
    }
    return "?";
}

struct EigenCluster {
    Complex value;
    Index algebraic = 0;
    Index geometric = 0;
    Index jordan_defect = 0; // algebraic - geometric
    PathClass path = PathClass::Stationary;
    std::vector<Index> members;
};

struct SpectralDecomposition {
    Index dim = 0;
    double scale = 1.0;                     // Frobenius norm of the superoperator
    std::vector<Complex> eigenvalues;       // with multiplicity, sorted (Re, Im)
    std::vector<Matrix> eigenmatrices;      // right eigenmatrices, unit HS norm
    std::vector<Matrix> left_eigenmatrices; // D†(L_i) = conj(lambda_i) L_i
    std::vector<EigenCluster> clusters;
    std::vector<Matrix> kernel;             // orthonormal basis of ker(D)
    std::vector<Matrix> left_kernel;        // orthonormal basis of ker(D†)

    // Smallest nonzero |Re lambda|; 0 when all eigenvalues sit on the
    // imaginary axis (no decay).
    double gap() const {
        double g = 0.0;
        const double width = 1e-7 * std::max(1.0, scale);
        for (const auto& c : clusters) {
            const double re = std::abs(c.value.real());
            if (re > width && (g == 0.0 || re < g)) g = re;
        }
        return g;
    }
};

namespace detail {

inline Index nullity_abs(const Matrix& m, double cutoff) {
    Eigen::JacobiSVD<Matrix> svd(m);
    Index n = 0;
    for (Index k = 0; k < svd.singularValues().size(); ++k) {
        if (svd.singularValues()(k) <= cutoff) ++n;
    }
    return n;
}

inline PathClass classify_value(Complex v, double axis_width) {
    const bool re_zero = std::abs(v.real()) <= axis_width;
    const bool im_zero = std::abs(v.imag()) <= axis_width;
    if (re_zero && im_zero) return PathClass::Stationary;
    if (re_zero) return PathClass::Circular;
    if (im_zero) return PathClass::StraightDecay;
    return PathClass::Spiral;
}

} // namespace detail

// Full eigensystem of D. Enforces, as certification failures: no eigenvalue
// with positive real part, conjugate-pair symmetry of the spectrum, and
// properness of the zero eigenvalue.
inline SpectralDecomposition decompose(const LindbladGenerator& g, const Tolerance& tol = {}) {
    SpectralDecomposition sd;
    sd.dim = g.dim;
    const Superoperator s = build_superoperator(g);
    sd.scale = std::max(s.matrix.norm(), 1e-30);

    Eigen::ComplexEigenSolver<Matrix> es(s.matrix);
    if (es.info() != Eigen::Success) {
        throw Error("decompose: eigensolver failed to converge");
    }
    Eigen::ComplexEigenSolver<Matrix> esl(Matrix(s.matrix.adjoint()));
    if (esl.info() != Eigen::Success) {
        throw Error("decompose: adjoint eigensolver failed to converge");
    }

    const Index n = g.dim * g.dim;
    std::vector<Index> order(static_cast<size_t>(n)), order_left(static_cast<size_t>(n));
    std::iota(order.begin(), order.end(), Index{0});
    std::iota(order_left.begin(), order_left.end(), Index{0});
    std::sort(order.begin(), order.end(), [&](Index a, Index b) {
        const Complex va = es.eigenvalues()(a), vb = es.eigenvalues()(b);
        if (va.real() != vb.real()) return va.real() < vb.real();
        return va.imag() < vb.imag();
    });
    // adjoint spectrum = conjugates; sort so entry i pairs with eigenvalue i
    std::sort(order_left.begin(), order_left.end(), [&](Index a, Index b) {
        const Complex va = std::conj(esl.eigenvalues()(a)), vb = std::conj(esl.eigenvalues()(b));
        if (va.real() != vb.real()) return va.real() < vb.real();
        return va.imag() < vb.imag();
    });

    Vector sorted_vals(n);
    for (Index i = 0; i < n; ++i) {
        const Index k = order[static_cast<size_t>(i)];
        sorted_vals(i) = es.eigenvalues()(k);
        sd.eigenvalues.push_back(es.eigenvalues()(k));
        Vector v = es.eigenvectors().col(k);
        v /= v.norm();
        fix_phase(v);
        sd.eigenmatrices.push_back(unvectorize(v, g.dim));
        Vector vl = esl.eigenvectors().col(order_left[static_cast<size_t>(i)]);
        vl /= vl.norm();
        fix_phase(vl);
        sd.left_eigenmatrices.push_back(unvectorize(vl, g.dim));
    }

    const double width = tol.eig_group_tol * std::max(1.0, sd.scale);
    const double axis_tol = tol.match_tol * std::max(1.0, sd.scale);
    for (const auto& cl : cluster_values(sorted_vals, width)) {
        EigenCluster c;
        c.members = cl;
        Complex sum = 0.0;
        for (Index idx : cl) sum += sorted_vals(idx);
        c.value = sum / static_cast<double>(cl.size());
        c.algebraic = static_cast<Index>(cl.size());
        const Matrix shifted = s.matrix - c.value * Matrix::Identity(n, n);
        c.geometric = detail::nullity_abs(shifted, 10 * width);
        c.jordan_defect = std::max<Index>(c.algebraic - c.geometric, 0);
        c.path = detail::classify_value(c.value, width);
        sd.clusters.push_back(std::move(c));
    }

    for (const auto& c : sd.clusters) {
        if (c.value.real() > axis_tol) {
            throw CertificationError("decompose: eigenvalue with positive real part");
        }
        if (c.path == PathClass::Stationary && c.jordan_defect != 0) {
            throw CertificationError("decompose: zero eigenvalue has a generalized eigenspace");
        }
        bool paired = false;
        for (const auto& p : sd.clusters) {
            if (std::abs(p.value - std::conj(c.value)) <= 2 * width && p.algebraic == c.algebraic) {
                paired = true;
                break;
            }
        }
        if (!paired) {
            throw CertificationError("decompose: spectrum is not conjugate-symmetric");
        }
    }

    for (const auto& v : null_space(s.matrix, tol)) sd.kernel.push_back(unvectorize(v, g.dim));
    for (const auto& v : null_space(Matrix(s.matrix.adjoint()), tol)) {
        sd.left_kernel.push_back(unvectorize(v, g.dim));
    }
    return sd;
}

inline std::vector<PathClass> classify_paths(const SpectralDecomposition& sd) {
    std::vector<PathClass> out;
    out.reserve(sd.eigenvalues.size());
    const double width = 1e-7 * std::max(1.0, sd.scale);
    for (const auto& v : sd.eigenvalues) out.push_back(detail::classify_value(v, width));
    return out;
}

// --------------------------- stationary structure ----------------------------

struct StationarySet {
    Matrix p0;                            // projector onto the span of all stationary supports
    std::vector<Matrix> basin_projectors; // minimal collecting basins, canonical order
    std::vector<Matrix> basis_states;     // extremal stationary state of each basin
    std::vector<Matrix> phase_relations;  // stationary off-diagonal eigenmatrices
    std::vector<Matrix> invariant_observables; // Tr[A_i rho_j] = delta_ij against states++phases

    Index kernel_dim() const {
        return static_cast<Index>(basis_states.size() + phase_relations.size());
    }
    std::vector<Matrix> kernel_basis() const {
        std::vector<Matrix> out = basis_states;
        out.insert(out.end(), phase_relations.begin(), phase_relations.end());
        return out;
    }
};

namespace detail {

// The zero-eigenspace is spanned by positive matrices: every self-adjoint
// kernel element must split into positive parts which are separately
// stationary. Violation signals numerical breakdown.
inline void certify_positive_splitting(const LindbladGenerator& g, const std::vector<Matrix>& kernel,
                                       const Tolerance& tol) {
    for (const auto& k : kernel) {
        for (const Matrix& s : {Matrix(hermitize(k)), Matrix(hermitize(kI * k))}) {
            if (s.norm() < tol.rank_tol) continue;
            Eigen::SelfAdjointEigenSolver<Matrix> es(s);
            Matrix plus = Matrix::Zero(g.dim, g.dim);
            Matrix minus = Matrix::Zero(g.dim, g.dim);
            for (Index i = 0; i < g.dim; ++i) {
                const Vector v = es.eigenvectors().col(i);
                const double lam = es.eigenvalues()(i);
                if (lam > 0) plus += lam * (v * v.adjoint()).eval();
                if (lam < 0) minus -= lam * (v * v.adjoint()).eval();
            }
            for (const Matrix& part : {plus, minus}) {
                if (part.norm() > 100 * tol.rank_tol &&
                    apply_schrodinger(g, part).norm() > 1e-7 * std::max(1.0, part.norm())) {
                    throw CertificationError(
                        "stationary_states: kernel element does not split into stationary positive parts");
                }
            }
        }
    }
}

} // namespace detail

// Kernel of D organized as: one extremal density matrix per minimal
// collecting basin, plus residual stationary phase relations, plus the left
// kernel normalized so that Tr[A_i rho_j] = delta_ij.
inline StationarySet stationary_states(const LindbladGenerator& g, const SpectralDecomposition& sd,
                                       const Tolerance& tol = {}, std::uint64_t seed = 0xC0FFEE) {
    if (sd.kernel.empty()) {
        throw CertificationError("stationary_states: no stationary state found");
    }
    if (sd.kernel.size() != sd.left_kernel.size()) {
        throw CertificationError("stationary_states: kernel dimensions of D and D† differ");
    }
    detail::certify_positive_splitting(g, sd.kernel, tol);
    const Index d = g.dim;

    StationarySet ss;
    // span of supports of all zero-eigenmatrices (adjoint-closed)
    Matrix cols(d, static_cast<Index>(2 * sd.kernel.size()) * d);
    Index c = 0;
    for (const auto& k : sd.kernel) {
        cols.middleCols(c, d) = k;
        cols.middleCols(c + d, d) = k.adjoint();
        c += 2 * d;
    }
    const Matrix v0 = column_space(cols, tol.rank_tol);
    ss.p0 = v0 * v0.adjoint();

    const Restriction res0 = restrict_generator(g, ss.p0, tol);
    const Matrix w_restricted =
        res0.isometry.adjoint() * detail::default_weight(d) * res0.isometry;
    const auto basins_restricted =
        minimal_conserved_projectors(commutant(res0.generator, tol), tol, seed, &w_restricted);
    for (const auto& pb : basins_restricted) {
        ss.basin_projectors.push_back(hermitize(res0.isometry * pb * res0.isometry.adjoint()));
    }

    for (const auto& pb : ss.basin_projectors) {
        const Restriction rb = restrict_generator(g, pb, tol);
        const Superoperator sb = build_superoperator(rb.generator);
        const auto kb = null_space(sb.matrix, tol);
        if (kb.size() != 1) {
            throw CertificationError("stationary_states: basin does not carry a unique stationary state");
        }
        Matrix rho = unvectorize(kb.front(), rb.generator.dim);
        Matrix h = hermitize(rho);
        if (h.norm() < 0.5 * rho.norm()) h = hermitize(kI * rho);
        if (h.trace().real() < 0) h = -h;
        h /= h.trace().real();
        Eigen::SelfAdjointEigenSolver<Matrix> es(h);
        if (es.eigenvalues().minCoeff() < -100 * tol.match_tol) {
            throw CertificationError("stationary_states: basin state is not positive");
        }
        ss.basis_states.push_back(rb.isometry * h * rb.isometry.adjoint());
    }

    // phase relations: kernel component HS-orthogonal to the basin states
    std::vector<Matrix> state_basis = orthonormalize(ss.basis_states, tol.rank_tol);
    std::vector<Matrix> residuals;
    for (const auto& k : sd.kernel) {
        Matrix r = k - project_to_span(state_basis, k);
        if (r.norm() > 1e-6) residuals.push_back(r);
    }
    ss.phase_relations = orthonormalize(residuals, 1e-6);
    if (ss.kernel_dim() != static_cast<Index>(sd.kernel.size())) {
        throw CertificationError("stationary_states: kernel does not decompose into states plus phases");
    }

    // delta_ij-normalized invariant observables against [states ++ phases]
    const auto rhos = ss.kernel_basis();
    const Index k = static_cast<Index>(rhos.size());
    Matrix gram(k, k);
    for (Index i = 0; i < k; ++i) {
        for (Index j = 0; j < k; ++j) {
            gram(i, j) = (sd.left_kernel[static_cast<size_t>(i)] * rhos[static_cast<size_t>(j)]).trace();
        }
    }
    Eigen::FullPivLU<Matrix> lu(gram);
    if (!lu.isInvertible()) {
        throw CertificationError("stationary_states: left/right kernel pairing is singular");
    }
    const Matrix coeff = lu.inverse();
    for (Index i = 0; i < k; ++i) {
        Matrix a = Matrix::Zero(d, d);
        for (Index m = 0; m < k; ++m) {
            a += coeff(i, m) * sd.left_kernel[static_cast<size_t>(m)];
        }
        ss.invariant_observables.push_back(std::move(a));
    }
    return ss;
}

inline StationarySet stationary_states(const LindbladGenerator& g, const Tolerance& tol = {},
                                       std::uint64_t seed = 0xC0FFEE) {
    return stationary_states(g, decompose(g, tol), tol, seed);
}

// --------------------------- algebra closure ---------------------------------

struct AlgebraReport {
    bool is_algebra = false;
    double product_defect = 0.0; // max projection defect of A_i A_j onto span
    double adjoint_defect = 0.0;
};

inline AlgebraReport invariant_observable_closure(const StationarySet& ss, const Tolerance& tol = {}) {
    AlgebraReport rep;
    const auto& obs = ss.invariant_observables;
    if (obs.empty()) {
        rep.is_algebra = true;
        return rep;
    }
    const auto span = orthonormalize(obs, tol.rank_tol);
    for (const auto& a : obs) {
        const Matrix adj = a.adjoint();
        rep.adjoint_defect =
            std::max(rep.adjoint_defect, (adj - project_to_span(span, adj)).norm() / std::max(1.0, adj.norm()));
        for (const auto& b : obs) {
            const Matrix prod = a * b;
            const double rel = (prod - project_to_span(span, prod)).norm() / std::max(1.0, prod.norm());
            rep.product_defect = std::max(rep.product_defect, rel);
        }
    }
    rep.is_algebra = std::max(rep.product_defect, rep.adjoint_defect) <= 100 * tol.match_tol;
    return rep;
}

// --------------------------- invariant-observable extension ------------------

// Spectral projection of x onto ker(S) along range(S); valid because the zero
// eigenvalue is semisimple. K spans ker(S), L spans ker(S†) = range(S)^perp.
inline Matrix project_onto_kernel(const Superoperator& s, const Matrix& x, const Tolerance& tol = {}) {
    const auto kv = null_space(s.matrix, tol);
    const auto lv = null_space(Matrix(s.matrix.adjoint()), tol);
    if (kv.empty() || kv.size() != lv.size()) {
        throw CertificationError("project_onto_kernel: kernel pairing unavailable");
    }
    const Index k = static_cast<Index>(kv.size());
    Matrix km(s.matrix.rows(), k), lm(s.matrix.rows(), k);
    for (Index i = 0; i < k; ++i) {
        km.col(i) = kv[static_cast<size_t>(i)];
        lm.col(i) = lv[static_cast<size_t>(i)];
    }
    const Matrix gram = lm.adjoint() * km;
    Eigen::FullPivLU<Matrix> lu(gram);
    if (!lu.isInvertible()) {
        throw CertificationError("project_onto_kernel: zero eigenvalue is not semisimple");
    }
    const Vector coeffs = lu.solve(lm.adjoint() * vectorize(x));
    return unvectorize(Vector(km * coeffs), s.dim);
}

// A_{0,k} = lim_t T^{t†}(P_{0,k}), computed spectrally and cross-checked
// against finite-time Heisenberg evolution. Requires a certified collecting
// projector.
inline Matrix invariant_observable_extension(const LindbladGenerator& g, const Matrix& p0k,
                                             const SpectralDecomposition& sd,
                                             const Tolerance& tol = {}) {
    if (!collecting_certificate(g, p0k, tol).pass) {
        throw CertificationError("invariant_observable_extension: projector is not collecting");
    }
    const Superoperator sadj = build_adjoint_superoperator(g);
    Matrix a = hermitize(project_onto_kernel(sadj, p0k, tol));

    Eigen::SelfAdjointEigenSolver<Matrix> es(a);
    if (es.eigenvalues().minCoeff() < -100 * tol.match_tol) {
        throw CertificationError("invariant_observable_extension: result is not positive semidefinite");
    }
    const double gap = sd.gap();
    if (gap > 0.0) {
        const Matrix finite_time = expm(sadj, 100.0 / gap).apply(p0k);
        if ((finite_time - a).norm() > 1e-6 * std::max(1.0, a.norm())) {
            throw CertificationError(
                "invariant_observable_extension: spectral limit disagrees with finite-time evolution");
        }
    }
    return a;
}

} // namespace lindblad
