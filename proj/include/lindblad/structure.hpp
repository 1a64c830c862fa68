// structure.hpp — The Hilbert-space decomposition attached to a generator:
// decay cascade with levels and basins, enclosures, intertwiners between
// collecting basins, dephasing classes, and symmetry certification.

#pragma once

#include "lindblad/spectral.hpp"

#include <optional>
#include <string>
#include <vector>

namespace lindblad {

// Partial isometry between two collecting basins commuting with the
// restricted transfer operators; energy_shift r satisfies H u = u (H + r)
// on the collecting level. r = 0 certifies a stationary phase relation,
// r != 0 an undamped oscillating one.
struct Intertwiner {
    Index basin_i = 0; // target basin index (u maps basin_j -> basin_i)
    Index basin_j = 0;
    Matrix u;
    double energy_shift = 0.0;
    Complex block_eigenvalue{0.0, 0.0};
    double defect = 0.0;
};

// Group of basins connected by intertwiners: Q H = C^n ⊗ H00 with one inner
// stationary state and a diagonal group Hamiltonian of energy shifts
// (anchor member at 0).
struct DephasingClass {
    std::vector<Index> members; // basin indices, anchor first
    Matrix q;                   // sum of member projectors
    Index multiplicity = 0;     // n
    Index inner_dim = 0;        // dim H00
    Matrix group_hamiltonian;   // n×n diagonal of shifts
    Matrix inner_state;         // rho_k on the anchor basin basis
    std::vector<Matrix> isometries; // dim×inner_dim per member, H00 -> basin
};

struct StructureReport {
    Index dim = 0;
    Matrix p0;                               // lowest level projector
    std::vector<std::vector<Matrix>> levels; // levels[0] = collecting basins
    std::vector<Matrix> collecting_basins;
    std::vector<Matrix> basin_states;        // extremal stationary state per basin
    std::vector<Intertwiner> intertwiners;
    std::vector<DephasingClass> dephasing_classes;
    std::vector<Matrix> enclosure_projectors; // minimal conserved projectors
    Index commutant_dim = 0;
    Index stationary_dim = 0;  // dim ker D = #basins + #phase relations
    double worst_decay_norm = 0.0; // residual occupation of decaying basins
    std::vector<std::string> warnings;

    std::vector<Index> level_dims(const Tolerance& tol = {}) const {
        std::vector<Index> out;
        for (const auto& lvl : levels) {
            Index sum = 0;
            for (const auto& p : lvl) sum += numeric_rank(p, tol.rank_tol);
            out.push_back(sum);
        }
        return out;
    }
};

// --------------------------- cascade ----------------------------------------

namespace detail {

struct LevelDecomposition {
    Matrix p0;
    std::vector<Matrix> basins;
    std::vector<Matrix> states;
};

// Lowest level of the cascade for g: span of all stationary supports, split
// into minimal collecting basins with their unique inner states.
inline LevelDecomposition lowest_level(const LindbladGenerator& g, const Tolerance& tol,
                                       std::uint64_t seed) {
    const auto ss = stationary_states(g, tol, seed);
    return {ss.p0, ss.basin_projectors, ss.basis_states};
}

} // namespace detail

// Levels and basins of the decay cascade: level 0 collects all stationary
// supports; higher levels repeat the construction for the evolution
// restricted to the orthogonal complement, i.e. with the outflow into lower
// levels disabled. Decaying basins are certified by long-time evolution.
inline StructureReport cascade(const LindbladGenerator& g, const Tolerance& tol = {},
                               std::uint64_t seed = 0xC0FFEE) {
    StructureReport rep;
    rep.dim = g.dim;

    const auto cb = commutant(g, tol);
    rep.commutant_dim = cb.size();
    rep.enclosure_projectors = minimal_conserved_projectors(cb, tol, seed);

    // peel levels off the cascade; each iteration works on the restriction of
    // g to the orthogonal complement of all previous levels
    LindbladGenerator current = g;
    Matrix lift = Matrix::Identity(g.dim, g.dim); // isometry current -> full
    Index guard = 0;
    while (current.dim > 0) {
        if (++guard > g.dim + 1) {
            throw InternalError("cascade: level recursion exceeded the dimension bound");
        }
        const auto lvl = detail::lowest_level(current, tol, seed);
        std::vector<Matrix> level_projectors;
        for (const auto& pb : lvl.basins) {
            level_projectors.push_back(hermitize(lift * pb * lift.adjoint()));
        }
        if (rep.levels.empty()) {
            rep.p0 = hermitize(lift * lvl.p0 * lift.adjoint());
            rep.collecting_basins = level_projectors;
            for (const auto& st : lvl.states) {
                rep.basin_states.push_back(hermitize(lift * st * lift.adjoint()));
            }
        }
        rep.levels.push_back(std::move(level_projectors));

        const Matrix p0perp = Matrix::Identity(current.dim, current.dim) - lvl.p0;
        const Index remaining = numeric_rank(p0perp, tol.rank_tol);
        if (remaining == 0) break;
        const Restriction res = restrict_generator(current, p0perp, tol);
        lift = Matrix(lift * res.isometry);
        current = res.generator;
    }

    // certifications
    const auto p0_cert = collecting_certificate(g, rep.p0, tol);
    if (!p0_cert.pass && !p0_cert.marginal) {
        throw CertificationError("cascade: lowest level is not collecting");
    }
    if (p0_cert.marginal) {
        rep.warnings.push_back("lowest level collecting certificate is numerically marginal");
    }

    const double gap = decompose(g, tol).gap();
    if (rep.levels.size() > 1 && gap > 0.0) {
        const double t_check = 100.0 / gap;
        const Matrix p0perp = Matrix::Identity(g.dim, g.dim) - rep.p0;
        for (size_t lvl = 1; lvl < rep.levels.size(); ++lvl) {
            for (const auto& pb : rep.levels[lvl]) {
                const Index r = numeric_rank(pb, tol.rank_tol);
                const Matrix rho0 = pb / static_cast<double>(r);
                const Matrix rho_t = evolve(g, rho0, t_check);
                const double left = (p0perp * rho_t * p0perp).norm();
                rep.worst_decay_norm = std::max(rep.worst_decay_norm, left);
                if (left > 1e-6) {
                    throw CertificationError("cascade: a higher-level basin fails to empty");
                }
            }
        }
    }

    rep.stationary_dim = static_cast<Index>(decompose(g, tol).kernel.size());
    return rep;
}

// --------------------------- intertwiners ------------------------------------

// Searches every equal-rank pair of collecting basins for an eigenvalue of D
// on the imaginary axis within the off-diagonal block P_i X P_j, and
// reconstructs the connecting partial isometry from the polar factor of the
// block eigenmatrix.
inline std::vector<Intertwiner> find_intertwiners(const LindbladGenerator& g,
                                                  const StructureReport& rep,
                                                  const Tolerance& tol = {}) {
    std::vector<Intertwiner> out;
    const auto& basins = rep.collecting_basins;
    if (basins.size() < 2) return out;

    // work in the restriction to the collecting level, where basins are
    // enclosures and the block dynamics is closed
    const Restriction res = restrict_generator(g, rep.p0, tol);
    const Matrix& v0 = res.isometry;
    const Matrix h_res = res.generator.hamiltonian;

    for (size_t bi = 0; bi < basins.size(); ++bi) {
        for (size_t bj = bi + 1; bj < basins.size(); ++bj) {
            const Matrix pi_res = v0.adjoint() * basins[bi] * v0;
            const Matrix pj_res = v0.adjoint() * basins[bj] * v0;
            const Index ri = numeric_rank(pi_res, tol.rank_tol);
            const Index rj = numeric_rank(pj_res, tol.rank_tol);
            if (ri != rj) continue;
            const Matrix vi = range_isometry(hermitize(pi_res), tol);
            const Matrix vj = range_isometry(hermitize(pj_res), tol);

            // matrix of X -> Vi† D(Vi X Vj†) Vj on the r×r block
            const Index r = ri;
            Matrix block(r * r, r * r);
            for (Index c = 0; c < r * r; ++c) {
                Matrix e = Matrix::Zero(r, r);
                e(c % r, c / r) = 1.0;
                const Matrix image =
                    vi.adjoint() * apply_schrodinger(res.generator, Matrix(vi * e * vj.adjoint())) * vj;
                block.col(c) = Eigen::Map<const Vector>(image.data(), r * r);
            }
            Eigen::ComplexEigenSolver<Matrix> es(block);
            if (es.info() != Eigen::Success) continue;
            const double width = tol.eig_group_tol * std::max(1.0, block.norm());

            std::optional<Intertwiner> best;
            for (Index k = 0; k < es.eigenvalues().size(); ++k) {
                const Complex lambda = es.eigenvalues()(k);
                if (std::abs(lambda.real()) > width) continue;
                const Matrix x = Eigen::Map<const Matrix>(es.eigenvectors().col(k).data(), r, r);
                Eigen::JacobiSVD<Matrix> svd(x, Eigen::ComputeFullU | Eigen::ComputeFullV);
                Matrix u_inner = svd.matrixU() * svd.matrixV().adjoint();
                Matrix u_res = vi * u_inner * vj.adjoint();

                Intertwiner tw;
                tw.basin_i = static_cast<Index>(bi);
                tw.basin_j = static_cast<Index>(bj);
                tw.block_eigenvalue = lambda;
                tw.energy_shift = -lambda.imag();
                if (std::abs(tw.energy_shift) <= width) tw.energy_shift = 0.0;

                double defect = std::max((u_res.adjoint() * u_res - pj_res).norm(),
                                         (u_res * u_res.adjoint() - pi_res).norm());
                for (const auto& h : res.generator.transfer_ops) {
                    defect = std::max(defect, (h * u_res - u_res * h).norm());
                }
                defect = std::max(defect,
                                  (h_res * u_res - u_res * (h_res + tw.energy_shift * Matrix::Identity(
                                                                          res.generator.dim, res.generator.dim)))
                                      .norm());
                tw.defect = defect;
                Matrix u_full = v0 * u_res * v0.adjoint();
                fix_phase(u_full);
                tw.u = std::move(u_full);
                if (defect <= 100 * tol.match_tol && (!best || defect < best->defect)) {
                    best = std::move(tw);
                }
            }
            if (best) out.push_back(std::move(*best));
        }
    }
    return out;
}

// --------------------------- dephasing classes -------------------------------

// Union-find over basins connected by certified intertwiners; spanning-tree
// composition fixes the per-member isometries and energy shifts, and cross
// edges must be consistent up to a phase.
inline std::vector<DephasingClass> dephasing_classes(const StructureReport& rep,
                                                     const std::vector<Intertwiner>& intertwiners,
                                                     const Tolerance& tol = {}) {
    const auto& basins = rep.collecting_basins;
    const size_t n = basins.size();
    std::vector<size_t> parent(n);
    for (size_t i = 0; i < n; ++i) parent[i] = i;
    auto find = [&](size_t a) {
        while (parent[a] != a) a = parent[a] = parent[parent[a]];
        return a;
    };
    for (const auto& tw : intertwiners) {
        const size_t a = find(static_cast<size_t>(tw.basin_i));
        const size_t b = find(static_cast<size_t>(tw.basin_j));
        if (a != b) parent[std::max(a, b)] = std::min(a, b);
    }

    std::vector<DephasingClass> classes;
    std::vector<std::optional<size_t>> class_of(n);
    for (size_t i = 0; i < n; ++i) {
        const size_t root = find(i);
        if (!class_of[root]) {
            class_of[root] = classes.size();
            classes.emplace_back();
        }
        classes[*class_of[root]].members.push_back(static_cast<Index>(i));
    }

    for (auto& cls : classes) {
        const size_t anchor = static_cast<size_t>(cls.members.front());
        cls.multiplicity = static_cast<Index>(cls.members.size());
        cls.q = Matrix::Zero(rep.dim, rep.dim);
        for (Index m : cls.members) cls.q += basins[static_cast<size_t>(m)];
        cls.q = hermitize(cls.q);

        const Matrix v_anchor = range_isometry(basins[anchor], tol);
        cls.inner_dim = v_anchor.cols();
        cls.inner_state = v_anchor.adjoint() * rep.basin_states[anchor] * v_anchor;

        // BFS over intertwiner edges from the anchor
        std::vector<std::optional<double>> shift(n);
        std::vector<Matrix> iso(n);
        shift[anchor] = 0.0;
        iso[anchor] = v_anchor;
        bool progress = true;
        while (progress) {
            progress = false;
            for (const auto& tw : intertwiners) {
                const size_t i = static_cast<size_t>(tw.basin_i);
                const size_t j = static_cast<size_t>(tw.basin_j);
                if (shift[i] && !shift[j]) {
                    // u maps basin j -> basin i with E_i = E_j + r
                    iso[j] = tw.u.adjoint() * iso[i];
                    shift[j] = *shift[i] - tw.energy_shift;
                    progress = true;
                } else if (shift[j] && !shift[i]) {
                    iso[i] = tw.u * iso[j];
                    shift[i] = *shift[j] + tw.energy_shift;
                    progress = true;
                }
            }
        }

        cls.group_hamiltonian = Matrix::Zero(cls.multiplicity, cls.multiplicity);
        for (Index m = 0; m < cls.multiplicity; ++m) {
            const size_t member = static_cast<size_t>(cls.members[static_cast<size_t>(m)]);
            if (!shift[member]) {
                throw CertificationError("dephasing_classes: class member unreachable from anchor");
            }
            cls.group_hamiltonian(m, m) = *shift[member];
            cls.isometries.push_back(iso[member]);
        }

        // cross-edge consistency: composed isometries must reproduce every
        // intertwiner up to a phase, and shifts must be additive
        for (const auto& tw : intertwiners) {
            const size_t i = static_cast<size_t>(tw.basin_i);
            const size_t j = static_cast<size_t>(tw.basin_j);
            if (!shift[i] || !shift[j]) continue;
            if (std::abs(*shift[i] - *shift[j] - tw.energy_shift) > 1e-6) {
                throw CertificationError("dephasing_classes: inconsistent energy shifts");
            }
            const Matrix m = iso[i].adjoint() * tw.u * iso[j];
            const Complex tr = m.trace();
            if (std::abs(tr) < 1e-9) {
                throw CertificationError("dephasing_classes: intertwiner composition degenerate");
            }
            const Complex phase = tr / std::abs(tr);
            if ((m - phase * Matrix::Identity(m.rows(), m.cols())).norm() > 1e-6) {
                throw CertificationError("dephasing_classes: intertwiner composition mismatch");
            }
        }
    }
    return classes;
}

// Full pipeline: cascade, intertwiners, dephasing classes.
inline StructureReport analyze_structure(const LindbladGenerator& g, const Tolerance& tol = {},
                                          std::uint64_t seed = 0xC0FFEE) {
    StructureReport rep = cascade(g, tol, seed);
    rep.intertwiners = find_intertwiners(g, rep, tol);
    rep.dephasing_classes = dephasing_classes(rep, rep.intertwiners, tol);

    // every enclosure should decompose into whole basins; a basin straddling
    // an enclosure boundary is flagged rather than silently refined
    bool straddles = false;
    for (const auto& q : rep.enclosure_projectors) {
        for (const auto& lvl : rep.levels) {
            for (const auto& p : lvl) {
                const double contained = (q * p - p).norm();
                const double disjoint = (q * p).norm();
                if (contained > 100 * tol.match_tol && disjoint > 100 * tol.match_tol) {
                    straddles = true;
                }
            }
        }
    }
    if (straddles) {
        rep.warnings.push_back("a basin straddles an enclosure boundary");
    }
    return rep;
}

// --------------------------- symmetries --------------------------------------

struct SymmetryCertificate {
    Certificate dynamical;    // D(V x V^-1) = V D(x) V^-1
    Certificate stationarity; // V maps the stationary set onto itself
    bool antiunitary = false;
};

inline SymmetryCertificate verify_symmetry(const LindbladGenerator& g, const Matrix& v,
                                           bool antiunitary = false, const Tolerance& tol = {}) {
    if (v.rows() != g.dim || v.cols() != g.dim) {
        throw DimensionError("verify_symmetry: operator shape mismatch");
    }
    if ((v.adjoint() * v - Matrix::Identity(g.dim, g.dim)).norm() > 100 * tol.match_tol) {
        throw InputError("verify_symmetry: candidate is not unitary");
    }
    SymmetryCertificate cert;
    cert.antiunitary = antiunitary;

    auto transform = [&](const Matrix& x) -> Matrix {
        return antiunitary ? Matrix(v * x.conjugate() * v.adjoint()) : Matrix(v * x * v.adjoint());
    };

    double dyn_defect = 0.0;
    for (Index i = 0; i < g.dim; ++i) {
        for (Index j = 0; j < g.dim; ++j) {
            const Matrix e = matrix_unit(g.dim, i, j);
            const Matrix lhs = apply_schrodinger(g, transform(e));
            const Matrix dx = apply_schrodinger(g, e);
            const Matrix rhs = antiunitary ? Matrix(v * dx.conjugate() * v.adjoint())
                                           : Matrix(v * dx * v.adjoint());
            dyn_defect = std::max(dyn_defect, (lhs - rhs).norm());
        }
    }
    cert.dynamical = Certificate::from_defect(dyn_defect, tol, "dynamical symmetry defect");

    const auto sd = decompose(g, tol);
    const auto span = orthonormalize(sd.kernel, tol.rank_tol);
    double stat_defect = 0.0;
    for (const auto& k : sd.kernel) {
        const Matrix w = transform(k);
        stat_defect = std::max(stat_defect, (w - project_to_span(span, w)).norm() / std::max(1.0, w.norm()));
    }
    cert.stationarity = Certificate::from_defect(stat_defect, tol, "stationary-set invariance defect");
    return cert;
}

struct MaxSymmetryReport {
    bool is_maximal = false;
    double lambda = 0.0; // fitted rate in D = lambda (omega Tr[.] - id)
    double defect = 0.0;
};

// D lies on the maximally symmetric ray iff D = lambda (omega Tr[.] - id)
// with omega the completely mixed state; lambda fitted by least squares.
inline MaxSymmetryReport detect_max_symmetry(const LindbladGenerator& g, const Tolerance& tol = {}) {
    const Index d = g.dim;
    const Superoperator s = build_superoperator(g);
    const Matrix omega = Matrix::Identity(d, d) / static_cast<double>(d);
    const Matrix m = vectorize(omega) * vectorize(Matrix::Identity(d, d)).transpose() -
                     Matrix::Identity(d * d, d * d);
    MaxSymmetryReport rep;
    const double mm = std::real((m.adjoint() * m).trace());
    if (mm < 1e-30) { // d = 1: every generator is trivially maximal
        rep.is_maximal = s.matrix.norm() <= tol.match_tol;
        return rep;
    }
    rep.lambda = std::real((m.adjoint() * s.matrix).trace()) / mm;
    rep.defect = (s.matrix - rep.lambda * m).norm();
    rep.is_maximal = rep.defect <= tol.match_tol * std::max(1.0, s.matrix.norm());
    return rep;
}

} // namespace lindblad
