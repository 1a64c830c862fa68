// generator.hpp — GKS–Lindblad generators: construction, Schrödinger and
// Heisenberg action, superoperator assembly, validity checks, restriction.

#pragma once

#include "lindblad/superoperator.hpp"

#include <optional>
#include <string>
#include <utility>
#include <vector>

namespace lindblad {

// A generator is the pair {H, h_alpha}: Hermitian Hamiltonian plus an ordered
// list of transfer (jump) operators. The list order is canonical; no gauge
// normalization is ever applied to it.
struct LindbladGenerator {
    Index dim = 0;
    Matrix hamiltonian;
    std::vector<Matrix> transfer_ops;
    std::vector<std::string> labels; // optional, parallel to transfer_ops
};

inline LindbladGenerator make_generator(Matrix hamiltonian, std::vector<Matrix> transfer_ops,
                                        std::vector<std::string> labels = {}) {
    require_square(hamiltonian, "make_generator");
    const Index d = hamiltonian.rows();
    if (d < 1) throw DimensionError("make_generator: dimension must be positive");
    for (const auto& h : transfer_ops) {
        if (h.rows() != d || h.cols() != d) {
            throw DimensionError("make_generator: transfer operator shape mismatch");
        }
    }
    if (!labels.empty() && labels.size() != transfer_ops.size()) {
        throw DimensionError("make_generator: labels must match transfer operator count");
    }
    return {d, std::move(hamiltonian), std::move(transfer_ops), std::move(labels)};
}

inline LindbladGenerator make_generator(Index dim, std::vector<Matrix> transfer_ops) {
    return make_generator(Matrix::Zero(dim, dim), std::move(transfer_ops));
}

struct DensityMatrix {
    Matrix matrix;

    // Checks Hermiticity, unit trace and positivity to tolerance.
    static DensityMatrix checked(Matrix m, const Tolerance& tol = {}) {
        require_square(m, "DensityMatrix");
        if (hermiticity_defect(m) > 10 * tol.match_tol) {
            throw CertificationError("DensityMatrix: not Hermitian to tolerance");
        }
        if (std::abs(m.trace() - Complex{1.0, 0.0}) > 10 * tol.match_tol) {
            throw CertificationError("DensityMatrix: trace differs from one");
        }
        Eigen::SelfAdjointEigenSolver<Matrix> es(hermitize(m));
        if (es.eigenvalues().minCoeff() < -10 * tol.match_tol) {
            throw CertificationError("DensityMatrix: negative eigenvalue beyond tolerance");
        }
        return {std::move(m)};
    }
};

inline DensityMatrix maximally_mixed(Index d) {
    return {Matrix::Identity(d, d) / static_cast<double>(d)};
}

// --------------------------- generator action -------------------------------

// D(x) = -i[H,x] + sum_a (h x h† - ½(h†h x + x h†h))
inline Matrix apply_schrodinger(const LindbladGenerator& g, const Matrix& x) {
    if (x.rows() != g.dim || x.cols() != g.dim) {
        throw DimensionError("apply_schrodinger: operand shape mismatch");
    }
    Matrix out = -kI * commutator(g.hamiltonian, x);
    for (const auto& h : g.transfer_ops) {
        const Matrix hh = h.adjoint() * h;
        out.noalias() += h * x * h.adjoint();
        out.noalias() -= 0.5 * (hh * x + x * hh);
    }
    return out;
}

// D†(f) = i[H,f] + sum_a (h† f h - ½(h†h f + f h†h)); dual to the above in
// the HS inner product.
inline Matrix apply_heisenberg(const LindbladGenerator& g, const Matrix& f) {
    if (f.rows() != g.dim || f.cols() != g.dim) {
        throw DimensionError("apply_heisenberg: operand shape mismatch");
    }
    Matrix out = kI * commutator(g.hamiltonian, f);
    for (const auto& h : g.transfer_ops) {
        const Matrix hh = h.adjoint() * h;
        out.noalias() += h.adjoint() * f * h;
        out.noalias() -= 0.5 * (hh * f + f * hh);
    }
    return out;
}

inline Superoperator build_superoperator(const LindbladGenerator& g) {
    const Index d = g.dim;
    const Matrix id = Matrix::Identity(d, d);
    Matrix s = Matrix::Zero(d * d, d * d);
    s += -kI * (kron(id, g.hamiltonian) - kron(g.hamiltonian.transpose(), id));
    for (const auto& h : g.transfer_ops) {
        const Matrix hh = h.adjoint() * h;
        s += kron(h.conjugate(), h);
        s -= 0.5 * (kron(id, hh) + kron(hh.transpose(), id));
    }
    return {d, std::move(s)};
}

inline Superoperator build_adjoint_superoperator(const LindbladGenerator& g) {
    return build_superoperator(g).adjoint();
}

// --------------------------- validation -------------------------------------

struct ValidationReport {
    double hamiltonian_hermiticity_defect = 0.0;
    double trace_preservation_defect = 0.0; // ||D†(1)||
    double min_choi_eigenvalue = 0.0;       // of exp(dt·D), dt small
    double choi_dt = 1e-3;
    bool hermiticity_ok = false;
    bool trace_ok = false;
    bool cp_ok = false;
    bool transfer_count_warning = false; // more than d²-1 operators supplied

    bool pass() const { return hermiticity_ok && trace_ok && cp_ok; }
};

// Choi matrix of the map X ↦ S(X): C = sum_{ij} |i><j| ⊗ S(|i><j|).
inline Matrix choi_matrix(const Superoperator& s) {
    const Index d = s.dim;
    Matrix c = Matrix::Zero(d * d, d * d);
    for (Index i = 0; i < d; ++i) {
        for (Index j = 0; j < d; ++j) {
            c.block(i * d, j * d, d, d) = s.apply(matrix_unit(d, i, j));
        }
    }
    return c;
}

inline ValidationReport validate(const LindbladGenerator& g, const Tolerance& tol = {},
                                 double choi_dt = 1e-3) {
    ValidationReport rep;
    rep.choi_dt = choi_dt;
    rep.hamiltonian_hermiticity_defect = hermiticity_defect(g.hamiltonian);
    rep.hermiticity_ok = rep.hamiltonian_hermiticity_defect <= tol.match_tol;

    rep.trace_preservation_defect = apply_heisenberg(g, Matrix::Identity(g.dim, g.dim)).norm();
    rep.trace_ok = rep.trace_preservation_defect <= tol.match_tol;

    const Superoperator prop = expm(build_superoperator(g), choi_dt);
    Eigen::SelfAdjointEigenSolver<Matrix> es(hermitize(choi_matrix(prop)));
    rep.min_choi_eigenvalue = es.eigenvalues().minCoeff();
    rep.cp_ok = rep.min_choi_eigenvalue >= -1e-8;

    rep.transfer_count_warning =
        static_cast<Index>(g.transfer_ops.size()) > g.dim * g.dim - 1;
    return rep;
}

// --------------------------- restriction ------------------------------------

struct Restriction {
    LindbladGenerator generator; // on an orthonormal basis of range(p)
    Matrix isometry;             // dim×rank; lifts restricted operators back
};

// {PHP, Ph_aP} re-expressed on range(p). For a collecting p this generates
// exactly the evolution of states supported inside p·H.
inline Restriction restrict_generator(const LindbladGenerator& g, const Matrix& p,
                                      const Tolerance& tol = {}) {
    if (p.rows() != g.dim || p.cols() != g.dim) {
        throw DimensionError("restrict_generator: projector shape mismatch");
    }
    if (projector_defect(p) > 100 * tol.match_tol) {
        throw DimensionError("restrict_generator: p is not an orthogonal projector");
    }
    const Matrix v = range_isometry(p, tol);
    Restriction out;
    out.isometry = v;
    std::vector<Matrix> ops;
    ops.reserve(g.transfer_ops.size());
    for (const auto& h : g.transfer_ops) {
        ops.push_back(v.adjoint() * h * v);
    }
    out.generator = make_generator(Matrix(v.adjoint() * g.hamiltonian * v), std::move(ops), g.labels);
    return out;
}

} // namespace lindblad
