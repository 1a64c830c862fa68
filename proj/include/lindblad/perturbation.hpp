// perturbation.hpp — Stationary-state perturbation series for
// D_lambda = D0 + lambda E + lambda^2 F, with the range-constrained inverse
// of D0 and the order-by-order solvability system for degenerate kernels.

#pragma once

#include "lindblad/structure.hpp"

#include <map>
#include <vector>

namespace lindblad {

// H_lambda = H0 + lambda V + lambda^2 W, h_{a,lambda} = h_a + lambda k_a.
// base.transfer_ops is zero-padded to the length of k_ops; enlarging the set
// of transfer operators is done by perturbing a zero operator.
struct PerturbedGenerator {
    LindbladGenerator base;
    Matrix v;
    Matrix w;
    std::vector<Matrix> k_ops;
};

inline PerturbedGenerator make_perturbed(LindbladGenerator base, Matrix v, Matrix w,
                                         std::vector<Matrix> k_ops, const Tolerance& tol = {}) {
    const Index d = base.dim;
    auto check = [&](const Matrix& m, const char* what) {
        if (m.rows() != d || m.cols() != d) {
            throw DimensionError(std::string("make_perturbed: ") + what + " shape mismatch");
        }
    };
    if (v.size() == 0) v = Matrix::Zero(d, d);
    if (w.size() == 0) w = Matrix::Zero(d, d);
    check(v, "v");
    check(w, "w");
    if (hermiticity_defect(v) > tol.match_tol || hermiticity_defect(w) > tol.match_tol) {
        throw CertificationError("make_perturbed: Hamiltonian perturbations must be Hermitian");
    }
    for (const auto& k : k_ops) check(k, "k_op");
    if (k_ops.size() < base.transfer_ops.size()) {
        k_ops.resize(base.transfer_ops.size(), Matrix::Zero(d, d));
    }
    while (base.transfer_ops.size() < k_ops.size()) {
        base.transfer_ops.push_back(Matrix::Zero(d, d));
    }
    return {std::move(base), std::move(v), std::move(w), std::move(k_ops)};
}

inline LindbladGenerator at_lambda(const PerturbedGenerator& pg, double lambda) {
    std::vector<Matrix> ops;
    ops.reserve(pg.base.transfer_ops.size());
    for (size_t a = 0; a < pg.base.transfer_ops.size(); ++a) {
        ops.push_back(pg.base.transfer_ops[a] + lambda * pg.k_ops[a]);
    }
    return make_generator(Matrix(pg.base.hamiltonian + lambda * pg.v + lambda * lambda * pg.w),
                          std::move(ops));
}

// E(rho) = -i[V,rho] + sum_a { h rho k† + k rho h†
//                              - 1/2 (h†k rho + rho h†k + k†h rho + rho k†h) }
inline Superoperator build_E(const PerturbedGenerator& pg) {
    const Index d = pg.base.dim;
    const Matrix id = Matrix::Identity(d, d);
    Matrix s = -kI * (kron(id, pg.v) - kron(pg.v.transpose(), id));
    for (size_t a = 0; a < pg.k_ops.size(); ++a) {
        const Matrix& h = pg.base.transfer_ops[a];
        const Matrix& k = pg.k_ops[a];
        const Matrix hk = h.adjoint() * k;
        const Matrix kh = k.adjoint() * h;
        s += kron(k.conjugate(), h) + kron(h.conjugate(), k);
        s -= 0.5 * (kron(id, hk) + kron(hk.transpose(), id));
        s -= 0.5 * (kron(id, kh) + kron(kh.transpose(), id));
    }
    return {d, std::move(s)};
}

// F(rho) = -i[W,rho] + sum_a { k rho k† - 1/2 (k†k rho + rho k†k) }
inline Superoperator build_F(const PerturbedGenerator& pg) {
    LindbladGenerator second = make_generator(pg.w, pg.k_ops);
    return build_superoperator(second);
}

// --------------------------- constrained inverse -----------------------------

// The inverse of D0 on range(D0) = {tau : Tr[A_i tau] = 0 for all invariant
// A_i}, with the output normalized to Tr[A_i sigma] = 0 as well.
struct ConstrainedInverse {
    Superoperator d0;
    std::vector<Matrix> kernel_basis; // rho_j: stationary states then phases
    std::vector<Matrix> invariant_obs;
    Matrix pinv;                      // min-norm least-squares inverse of d0
    Tolerance tol;

    std::vector<Complex> solvability(const Matrix& tau) const {
        std::vector<Complex> out;
        out.reserve(invariant_obs.size());
        for (const auto& a : invariant_obs) out.push_back((a * tau).trace());
        return out;
    }

    Matrix solve(const Matrix& tau) const {
        const auto traces = solvability(tau);
        double worst = 0.0;
        for (const auto& t : traces) worst = std::max(worst, std::abs(t));
        if (worst > tol.match_tol * std::max(1.0, tau.norm())) {
            throw NotInRangeError("constrained inverse: right-hand side outside range(D0)", traces);
        }
        Matrix sigma = unvectorize(Vector(pinv * vectorize(tau)), d0.dim);
        // alpha_i correction pins the kernel component to zero
        for (size_t j = 0; j < kernel_basis.size(); ++j) {
            sigma -= (invariant_obs[j] * sigma).trace() * kernel_basis[j];
        }
        return sigma;
    }
};

inline ConstrainedInverse constrained_inverse(const LindbladGenerator& g, const StationarySet& ss,
                                              const Tolerance& tol = {}) {
    ConstrainedInverse inv;
    inv.d0 = build_superoperator(g);
    inv.kernel_basis = ss.kernel_basis();
    inv.invariant_obs = ss.invariant_observables;
    inv.tol = tol;

    Eigen::JacobiSVD<Matrix> svd(inv.d0.matrix, Eigen::ComputeFullU | Eigen::ComputeFullV);
    const auto& sv = svd.singularValues();
    const double cutoff = tol.rank_tol * std::max(sv(0), 1e-300);
    Vector inv_sv = Vector::Zero(sv.size());
    for (Index i = 0; i < sv.size(); ++i) {
        if (sv(i) > cutoff) inv_sv(i) = 1.0 / sv(i);
    }
    inv.pinv = svd.matrixV() * inv_sv.asDiagonal() * svd.matrixU().adjoint();
    return inv;
}

// --------------------------- series ------------------------------------------

struct PerturbationSeries {
    std::vector<Matrix> sigmas; // sigma_0 .. sigma_N
    std::vector<Vector> alphas; // kernel coefficients fixed at each order
    int order = 0;
    std::vector<Matrix> kernel_basis;

    Matrix partial_sum(double lambda) const {
        Matrix out = Matrix::Zero(sigmas.front().rows(), sigmas.front().cols());
        double p = 1.0;
        for (const auto& s : sigmas) {
            out += p * s;
            p *= lambda;
        }
        return out;
    }
};

inline double series_residual(const PerturbedGenerator& pg, const PerturbationSeries& series,
                              double lambda) {
    const Superoperator d_lambda = build_superoperator(at_lambda(pg, lambda));
    return d_lambda.apply(series.partial_sum(lambda)).norm();
}

// Ratio test on ||sigma_n|| lambda^n over the nonzero tail.
inline bool series_diverges(const PerturbationSeries& series, double lambda) {
    std::vector<std::pair<int, double>> terms;
    for (size_t n = 0; n < series.sigmas.size(); ++n) {
        const double t = series.sigmas[n].norm() * std::pow(std::abs(lambda), static_cast<double>(n));
        if (t > 1e-280) terms.emplace_back(static_cast<int>(n), t);
    }
    if (terms.size() < 3) return false;
    double log_ratio = 0.0;
    int count = 0;
    const size_t start = terms.size() > 5 ? terms.size() - 5 : 1;
    for (size_t i = std::max<size_t>(start, 1); i < terms.size(); ++i) {
        const auto& [n1, t1] = terms[i - 1];
        const auto& [n2, t2] = terms[i];
        log_ratio += std::log(t2 / t1) / static_cast<double>(n2 - n1);
        ++count;
    }
    return count > 0 && log_ratio / count > std::log(1.02);
}

namespace detail {

// Affine representation of every sigma_m over the undetermined kernel
// coefficients x_{m,j}: column 0 is the constant part, column 1 + m*k + j the
// coefficient of x_{m,j}.
struct SeriesSolver {
    Index d = 0;
    Index k = 0;   // kernel dimension
    int total = 0; // highest internal order
    Matrix se, sf, pinvc;
    std::vector<Matrix> kernel_vecs; // vec(rho_j)
    std::vector<Eigen::RowVectorXcd> obs_rows; // tau -> Tr[A_i tau]
    std::vector<Matrix> sigma_affine; // d² × (1 + (total+1)*k)

    Index cols() const { return 1 + static_cast<Index>(total + 1) * k; }
};

inline PerturbationSeries run_series_solver(const PerturbedGenerator& pg,
                                            const StationarySet& ss, int order, int lookahead,
                                            const Tolerance& tol) {
    SeriesSolver sv;
    sv.d = pg.base.dim;
    const auto rhos = ss.kernel_basis();
    sv.k = static_cast<Index>(rhos.size());
    sv.total = order + lookahead;
    sv.se = build_E(pg).matrix;
    sv.sf = build_F(pg).matrix;

    const ConstrainedInverse inv = constrained_inverse(pg.base, ss, tol);
    // normalized particular solution: pinv followed by the alpha correction
    Matrix corrector = Matrix::Identity(sv.d * sv.d, sv.d * sv.d);
    for (size_t j = 0; j < rhos.size(); ++j) {
        Eigen::RowVectorXcd row(sv.d * sv.d);
        const Matrix at = ss.invariant_observables[j].transpose();
        row = Eigen::Map<const Vector>(at.data(), sv.d * sv.d).transpose();
        corrector -= vectorize(rhos[j]) * row;
    }
    sv.pinvc = corrector * inv.pinv;

    for (const auto& r : rhos) sv.kernel_vecs.push_back(vectorize(r));
    for (const auto& a : ss.invariant_observables) {
        const Matrix at = a.transpose();
        sv.obs_rows.push_back(Eigen::Map<const Vector>(at.data(), sv.d * sv.d).transpose());
    }

    const Index n_unknowns = static_cast<Index>(sv.total + 1) * sv.k;
    const Index width = 1 + n_unknowns;

    // sigma_0 = sum_j x_{0,j} rho_j
    std::vector<Matrix> sigma(static_cast<size_t>(sv.total) + 1);
    sigma[0] = Matrix::Zero(sv.d * sv.d, width);
    for (Index j = 0; j < sv.k; ++j) {
        sigma[0].col(1 + j) = sv.kernel_vecs[static_cast<size_t>(j)];
    }

    std::vector<Eigen::RowVectorXcd> rows;
    std::vector<Complex> rhs_vals;
    auto add_row = [&](const Eigen::RowVectorXcd& affine_row) {
        // affine_row has width entries: constant + coefficients
        rows.push_back(affine_row.tail(n_unknowns));
        rhs_vals.push_back(-affine_row(0));
    };

    // trace normalization: Tr[sigma_0] = 1, Tr[sigma_n] = 0 for n >= 1
    for (int m = 0; m <= sv.total; ++m) {
        Eigen::RowVectorXcd row = Eigen::RowVectorXcd::Zero(width);
        row(0) = m == 0 ? Complex(-1, 0) : Complex(0, 0); // moved to rhs with sign flip
        for (Index j = 0; j < sv.k; ++j) {
            row(1 + static_cast<Index>(m) * sv.k + j) = rhos[static_cast<size_t>(j)].trace();
        }
        add_row(row);
    }

    for (int n = 1; n <= sv.total; ++n) {
        Matrix rhs = -(sv.se * sigma[static_cast<size_t>(n - 1)]);
        if (n >= 2) rhs -= sv.sf * sigma[static_cast<size_t>(n - 2)];
        // solvability: Tr[A_i rhs] = 0
        for (const auto& obs : sv.obs_rows) {
            add_row(obs * rhs);
        }
        sigma[static_cast<size_t>(n)] = sv.pinvc * rhs;
        for (Index j = 0; j < sv.k; ++j) {
            sigma[static_cast<size_t>(n)].col(1 + static_cast<Index>(n) * sv.k + j) +=
                sv.kernel_vecs[static_cast<size_t>(j)];
        }
    }

    Matrix cmat(static_cast<Index>(rows.size()), n_unknowns);
    Vector bvec(static_cast<Index>(rows.size()));
    for (size_t r = 0; r < rows.size(); ++r) {
        cmat.row(static_cast<Index>(r)) = rows[r];
        bvec(static_cast<Index>(r)) = rhs_vals[r];
    }

    Eigen::JacobiSVD<Matrix> svd(cmat, Eigen::ComputeFullU | Eigen::ComputeFullV);
    const auto& s = svd.singularValues();
    const double cutoff = 1e-10 * std::max(s.size() > 0 ? s(0) : 0.0, 1.0);
    Index rank = 0;
    for (Index i = 0; i < s.size(); ++i) {
        if (s(i) > cutoff) ++rank;
    }

    // a null-space direction touching orders <= `order` means the kernel
    // coefficients are genuinely undetermined through the requested order
    const Index reported_coords = static_cast<Index>(order + 1) * sv.k;
    std::vector<Vector> unresolved;
    for (Index i = rank; i < s.size() && i < svd.matrixV().cols(); ++i) {
        const Vector dir = svd.matrixV().col(i);
        if (dir.head(reported_coords).norm() > 1e-6) {
            unresolved.push_back(dir.head(reported_coords));
        }
    }
    if (!unresolved.empty()) {
        throw DegenerateBeyondOrderError(
            "perturbation series: kernel directions remain undetermined through the requested order",
            unresolved);
    }

    Vector inv_s = Vector::Zero(s.size());
    for (Index i = 0; i < rank; ++i) inv_s(i) = 1.0 / s(i);
    Matrix pinv_c = svd.matrixV().leftCols(s.size()) * inv_s.asDiagonal() *
                    svd.matrixU().leftCols(s.size()).adjoint();
    const Vector x = pinv_c * bvec;
    if ((cmat * x - bvec).norm() > 1e-7 * std::max(1.0, bvec.norm())) {
        throw CertificationError("perturbation series: solvability system is inconsistent");
    }

    PerturbationSeries out;
    out.order = order;
    out.kernel_basis = rhos;
    Vector affine(width);
    affine(0) = 1.0;
    affine.tail(n_unknowns) = x;
    for (int m = 0; m <= order; ++m) {
        out.sigmas.push_back(unvectorize(Vector(sigma[static_cast<size_t>(m)] * affine), sv.d));
        out.alphas.push_back(x.segment(static_cast<Index>(m) * sv.k, sv.k));
    }
    return out;
}

} // namespace detail

// Series for a base with a unique stationary state; the recursion
// sigma_n = -D0^{-1}(E sigma_{n-1} + F sigma_{n-2}) needs no solvability
// choices.
inline PerturbationSeries expand_unique(const PerturbedGenerator& pg, int order,
                                        const Tolerance& tol = {}) {
    if (order < 0) throw InputError("expand_unique: order must be non-negative");
    const auto ss = stationary_states(pg.base, tol);
    if (ss.kernel_dim() != 1) {
        throw InputError("expand_unique: base generator is degenerate; use expand_degenerate");
    }
    return detail::run_series_solver(pg, ss, order, 0, tol);
}

// Degenerate base: the kernel coefficients at each order are fixed by
// requiring later right-hand sides to lie in range(D0). Look-ahead is capped
// at the requested order.
inline PerturbationSeries expand_degenerate(const PerturbedGenerator& pg, int order,
                                            const Tolerance& tol = {}) {
    if (order < 0) throw InputError("expand_degenerate: order must be non-negative");
    const auto ss = stationary_states(pg.base, tol);
    if (ss.kernel_dim() < 2) {
        throw InputError("expand_degenerate: base generator has a unique stationary state");
    }
    return detail::run_series_solver(pg, ss, order, order, tol);
}

// --------------------------- structure continuity ----------------------------

struct ContinuityPoint {
    double lambda = 0.0;
    Index stationary_dim = 0;
    Index collecting_basin_count = 0;
    std::vector<Index> basin_dims;
    Index stationary_intertwiners = 0;
    Index oscillating_intertwiners = 0;
    std::vector<Index> level_dims;
};

struct ContinuityTransition {
    double lambda = 0.0;
    std::string kind;   // stationary-count-drop | oscillating-lost |
                        // stationary-phase-lost | collecting-basin-lost
    std::string detail;
};

struct ContinuityReport {
    std::vector<ContinuityPoint> points;
    std::vector<ContinuityTransition> transitions;
    bool one_way_ok = true; // no structure present at lambda != 0 missing at 0
};

// Full structure analysis along a list of lambda values, with detection of
// the qualitative changes relative to lambda = 0. Structures can only be
// lost when moving away from zero, never gained.
inline ContinuityReport structure_continuity_probe(const PerturbedGenerator& pg,
                                                   std::vector<double> lambdas,
                                                   const Tolerance& tol = {}) {
    ContinuityReport rep;
    bool has_zero = false;
    for (double l : lambdas) {
        if (!std::isfinite(l)) throw InputError("structure_continuity_probe: lambda must be finite");
        if (l == 0.0) has_zero = true;
    }
    if (!has_zero) lambdas.insert(lambdas.begin(), 0.0);

    std::vector<StructureReport> reports;
    for (double l : lambdas) {
        const auto g = at_lambda(pg, l);
        const auto sr = analyze_structure(g, tol);
        ContinuityPoint pt;
        pt.lambda = l;
        pt.stationary_dim = sr.stationary_dim;
        pt.collecting_basin_count = static_cast<Index>(sr.collecting_basins.size());
        for (const auto& b : sr.collecting_basins) pt.basin_dims.push_back(numeric_rank(b, tol.rank_tol));
        for (const auto& tw : sr.intertwiners) {
            if (tw.energy_shift == 0.0) {
                ++pt.stationary_intertwiners;
            } else {
                ++pt.oscillating_intertwiners;
            }
        }
        pt.level_dims = sr.level_dims(tol);
        rep.points.push_back(std::move(pt));
        reports.push_back(std::move(sr));
    }

    size_t zero_idx = 0;
    for (size_t i = 0; i < rep.points.size(); ++i) {
        if (rep.points[i].lambda == 0.0) zero_idx = i;
    }
    const ContinuityPoint& base = rep.points[zero_idx];

    for (size_t i = 0; i < rep.points.size(); ++i) {
        if (i == zero_idx) continue;
        const auto& pt = rep.points[i];
        auto note = [&](std::string kind, std::string detail) {
            rep.transitions.push_back({pt.lambda, std::move(kind), std::move(detail)});
        };
        if (pt.stationary_dim < base.stationary_dim) {
            note("stationary-count-drop", std::to_string(base.stationary_dim) + " -> " +
                                              std::to_string(pt.stationary_dim));
        }
        if (pt.oscillating_intertwiners < base.oscillating_intertwiners) {
            note("oscillating-lost", "undamped oscillating phase relation disappeared");
        }
        if (pt.stationary_intertwiners < base.stationary_intertwiners &&
            pt.oscillating_intertwiners <= base.oscillating_intertwiners) {
            note("stationary-phase-lost", "stationary phase relation disappeared");
        }
        // a collecting basin of the unperturbed system that stops collecting
        // has merged into the decay cascade
        const auto g_l = at_lambda(pg, pt.lambda);
        for (const auto& basin : reports[zero_idx].collecting_basins) {
            if (!collecting_certificate(g_l, basin, tol, false).pass) {
                note("collecting-basin-lost", "collecting basin merged into the decay cascade");
                break;
            }
        }
        // one-way rule on counts: nothing may appear away from lambda = 0
        if (pt.stationary_dim > base.stationary_dim ||
            pt.oscillating_intertwiners + pt.stationary_intertwiners >
                base.oscillating_intertwiners + base.stationary_intertwiners) {
            rep.one_way_ok = false;
        }
    }
    return rep;
}

} // namespace lindblad
