// asymptotics.hpp — Long-time form of an evolved state: per dephasing class a
// weight, a rotating n×n block and the fixed inner state.

#pragma once

#include "lindblad/structure.hpp"

namespace lindblad {

struct AsymptoticComponent {
    Index class_index = 0;
    double lambda = 0.0; // weight, >= 0, sums to 1
    Matrix r;            // n×n positive, trace one (zero matrix when lambda = 0)
};

struct AsymptoticForm {
    std::vector<AsymptoticComponent> components;
    double projection_defect = 0.0; // worst ||block - c * rho_k|| over classes
    double model_residual = 0.0;    // ||rho(t_check) - model(t_check)||
    double t_check = 0.0;

    // model(t) = ⊕_k lambda_k e^{-i H0 t} R_k e^{i H0 t} ⊗ rho_k
    Matrix evaluate(const StructureReport& rep, double t) const {
        Matrix out = Matrix::Zero(rep.dim, rep.dim);
        for (const auto& comp : components) {
            const auto& cls = rep.dephasing_classes[static_cast<size_t>(comp.class_index)];
            for (Index m = 0; m < cls.multiplicity; ++m) {
                for (Index mp = 0; mp < cls.multiplicity; ++mp) {
                    const Complex phase =
                        std::exp(-kI * t *
                                 (cls.group_hamiltonian(m, m) - cls.group_hamiltonian(mp, mp)));
                    const Complex w = comp.lambda * phase * comp.r(m, mp);
                    if (std::abs(w) < 1e-300) continue;
                    out += w * cls.isometries[static_cast<size_t>(m)] * cls.inner_state *
                           cls.isometries[static_cast<size_t>(mp)].adjoint();
                }
            }
        }
        return out;
    }
};

// Spectral projection of rho0 onto the eigenvalue-0 and imaginary-axis
// eigenspaces of D, decomposed along the dephasing classes.
inline AsymptoticForm asymptotic_state(const LindbladGenerator& g, const Matrix& rho0,
                                       const StructureReport& rep,
                                       const SpectralDecomposition& sd, const Tolerance& tol = {}) {
    if (rho0.rows() != g.dim || rho0.cols() != g.dim || rep.dim != g.dim) {
        throw DimensionError("asymptotic_state: dimension mismatch");
    }

    // collect right/left eigenvectors of every cluster on the imaginary axis
    const double width = tol.eig_group_tol * std::max(1.0, sd.scale);
    std::vector<Index> axis_members;
    for (const auto& c : sd.clusters) {
        if (std::abs(c.value.real()) <= width) {
            axis_members.insert(axis_members.end(), c.members.begin(), c.members.end());
        }
    }
    if (axis_members.empty()) {
        throw CertificationError("asymptotic_state: no stationary modes found");
    }
    const Index k = static_cast<Index>(axis_members.size());
    Matrix km(g.dim * g.dim, k), lm(g.dim * g.dim, k);
    for (Index c = 0; c < k; ++c) {
        km.col(c) = vectorize(sd.eigenmatrices[static_cast<size_t>(axis_members[static_cast<size_t>(c)])]);
        lm.col(c) = vectorize(sd.left_eigenmatrices[static_cast<size_t>(axis_members[static_cast<size_t>(c)])]);
    }
    Eigen::FullPivLU<Matrix> lu(Matrix(lm.adjoint() * km));
    if (!lu.isInvertible()) {
        throw CertificationError("asymptotic_state: axis eigenspace pairing is singular");
    }
    const Matrix rho_proj =
        unvectorize(Vector(km * lu.solve(lm.adjoint() * vectorize(rho0))), g.dim);

    AsymptoticForm form;
    double lambda_sum = 0.0;
    for (size_t ci = 0; ci < rep.dephasing_classes.size(); ++ci) {
        const auto& cls = rep.dephasing_classes[ci];
        AsymptoticComponent comp;
        comp.class_index = static_cast<Index>(ci);
        Matrix weight(cls.multiplicity, cls.multiplicity);
        const double inner_norm_sq = std::real(hs_inner(cls.inner_state, cls.inner_state));
        for (Index m = 0; m < cls.multiplicity; ++m) {
            for (Index mp = 0; mp < cls.multiplicity; ++mp) {
                const Matrix block = cls.isometries[static_cast<size_t>(m)].adjoint() * rho_proj *
                                     cls.isometries[static_cast<size_t>(mp)];
                const Complex c = hs_inner(cls.inner_state, block) / inner_norm_sq;
                form.projection_defect =
                    std::max(form.projection_defect, (block - c * cls.inner_state).norm());
                weight(m, mp) = c;
            }
        }
        comp.lambda = std::max(weight.trace().real(), 0.0);
        lambda_sum += comp.lambda;
        if (comp.lambda > 100 * tol.match_tol) {
            comp.r = weight / weight.trace();
        } else {
            comp.lambda = 0.0;
            comp.r = Matrix::Zero(cls.multiplicity, cls.multiplicity);
        }
        form.components.push_back(std::move(comp));
    }
    if (std::abs(lambda_sum - 1.0) > 1e-6) {
        throw CertificationError("asymptotic_state: class weights do not sum to one");
    }

    const double gap = sd.gap();
    form.t_check = gap > 0.0 ? 50.0 / gap : 1.0;
    const Matrix evolved = evolve(g, rho0, form.t_check);
    form.model_residual = (evolved - form.evaluate(rep, form.t_check)).norm();
    if (form.model_residual > 1e-6) {
        throw CertificationError("asymptotic_state: model disagrees with the evolved state");
    }
    return form;
}

inline AsymptoticForm asymptotic_state(const LindbladGenerator& g, const Matrix& rho0,
                                       const StructureReport& rep, const Tolerance& tol = {}) {
    return asymptotic_state(g, rho0, rep, decompose(g, tol), tol);
}

} // namespace lindblad
