// core.hpp — Dense complex linear algebra substrate: Hilbert–Schmidt geometry,
// vectorization, tolerance-aware null spaces, deterministic basis conventions.

#pragma once

#include "lindblad/types.hpp"

#include <Eigen/Eigenvalues>
#include <Eigen/QR>
#include <Eigen/SVD>
#include <unsupported/Eigen/KroneckerProduct>
#include <unsupported/Eigen/MatrixFunctions>

#include <algorithm>
#include <cmath>
#include <numeric>
#include <vector>

namespace lindblad {

// --------------------------- shape checks -----------------------------------

inline void require_square(const Matrix& a, const char* where) {
    if (a.rows() != a.cols()) {
        throw DimensionError(std::string(where) + ": matrix must be square");
    }
}

inline void require_same_shape(const Matrix& a, const Matrix& b, const char* where) {
    if (a.rows() != b.rows() || a.cols() != b.cols()) {
        throw DimensionError(std::string(where) + ": shape mismatch");
    }
}

// --------------------------- HS geometry ------------------------------------

// <<a|b>> = Tr[a† b]; conjugate-linear in the first argument.
inline Complex hs_inner(const Matrix& a, const Matrix& b) {
    require_same_shape(a, b, "hs_inner");
    require_square(a, "hs_inner");
    return (a.adjoint() * b).trace();
}

inline double hs_norm(const Matrix& a) { return a.norm(); }

inline Matrix commutator(const Matrix& a, const Matrix& b) { return a * b - b * a; }

inline Matrix hermitize(const Matrix& a) { return 0.5 * (a + a.adjoint()); }

inline double hermiticity_defect(const Matrix& a) { return (a - a.adjoint()).norm(); }

inline double spectral_norm(const Matrix& a) {
    if (a.size() == 0) return 0.0;
    return a.jacobiSvd().singularValues()(0);
}

inline bool approx_equal(const Matrix& a, const Matrix& b, double tol) {
    return (a - b).norm() <= tol;
}

// --------------------------- vectorization ----------------------------------

// Column-stacking vec; the representation of X ↦ AXB is (Bᵀ ⊗ A).
inline Vector vectorize(const Matrix& x) {
    require_square(x, "vectorize");
    return Eigen::Map<const Vector>(x.data(), x.size());
}

inline Matrix unvectorize(const Vector& v, Index d) {
    if (v.size() != d * d) {
        throw DimensionError("unvectorize: vector length does not match d*d");
    }
    return Eigen::Map<const Matrix>(v.data(), d, d);
}

inline Matrix unvectorize(const Vector& v) {
    const auto d = static_cast<Index>(std::llround(std::sqrt(static_cast<double>(v.size()))));
    if (d * d != v.size()) {
        throw DimensionError("unvectorize: length is not a perfect square");
    }
    return unvectorize(v, d);
}

inline Matrix kron(const Matrix& a, const Matrix& b) {
    Matrix k(a.rows() * b.rows(), a.cols() * b.cols());
    k = Eigen::kroneckerProduct(a, b);
    return k;
}

// --------------------------- small constructors -----------------------------

inline Matrix matrix_unit(Index d, Index i, Index j) {
    if (i < 0 || j < 0 || i >= d || j >= d) {
        throw DimensionError("matrix_unit: index out of range");
    }
    Matrix m = Matrix::Zero(d, d);
    m(i, j) = 1.0;
    return m;
}

inline Matrix matrix_exp(const Matrix& m) {
    require_square(m, "matrix_exp");
    return m.exp();
}

// --------------------------- deterministic conventions ----------------------

// Multiply v by a unit phase so its first significant component is real
// positive. Keeps basis output reproducible across runs.
inline void fix_phase(Vector& v) {
    const double mx = v.cwiseAbs().maxCoeff();
    if (mx <= 0.0) return;
    for (Index i = 0; i < v.size(); ++i) {
        if (std::abs(v(i)) > 1e-9 * mx) {
            v *= std::conj(v(i)) / std::abs(v(i));
            return;
        }
    }
}

inline void fix_phase(Matrix& m) {
    const double mx = m.cwiseAbs().maxCoeff();
    if (mx <= 0.0) return;
    for (Index c = 0; c < m.cols(); ++c) {
        for (Index r = 0; r < m.rows(); ++r) {
            if (std::abs(m(r, c)) > 1e-9 * mx) {
                m *= std::conj(m(r, c)) / std::abs(m(r, c));
                return;
            }
        }
    }
}

// Entry-wise comparison of matrices after rounding at scale `quantum`;
// "larger first" so e.g. diag(1,1,0,0) precedes diag(0,0,1,1).
inline int lexicographic_compare(const Matrix& a, const Matrix& b, double quantum = 1e-6) {
    for (Index r = 0; r < a.rows(); ++r) {
        for (Index c = 0; c < a.cols(); ++c) {
            const double ra = std::round(a(r, c).real() / quantum);
            const double rb = std::round(b(r, c).real() / quantum);
            if (ra != rb) return ra > rb ? -1 : 1;
            const double ia = std::round(a(r, c).imag() / quantum);
            const double ib = std::round(b(r, c).imag() / quantum);
            if (ia != ib) return ia > ib ? -1 : 1;
        }
    }
    return 0;
}

// --------------------------- null spaces and ranges --------------------------

// Orthonormal basis of {v : ||m v|| <= rank_tol * sigma_max * ||v||} via SVD
// thresholding. Vectors come out ordered by ascending singular value with the
// phase convention above.
inline std::vector<Vector> null_space(const Matrix& m, const Tolerance& tol = {}) {
    if (m.size() == 0) return {};
    Eigen::JacobiSVD<Matrix> svd(m, Eigen::ComputeFullV);
    const auto& sv = svd.singularValues();
    const double smax = sv.size() > 0 ? sv(0) : 0.0;
    const double cutoff = tol.rank_tol * std::max(smax, 1e-300);
    std::vector<Vector> basis;
    for (Index k = m.cols() - 1; k >= 0; --k) {
        const double s = k < sv.size() ? sv(k) : 0.0;
        if (s <= cutoff || smax == 0.0) {
            Vector v = svd.matrixV().col(k);
            fix_phase(v);
            basis.push_back(std::move(v));
        } else {
            break;
        }
    }
    return basis;
}

inline Index numeric_rank(const Matrix& m, double rank_tol) {
    if (m.size() == 0) return 0;
    Eigen::JacobiSVD<Matrix> svd(m);
    const auto& sv = svd.singularValues();
    const double cutoff = rank_tol * std::max(sv.size() > 0 ? sv(0) : 0.0, 1e-300);
    Index r = 0;
    for (Index k = 0; k < sv.size(); ++k) {
        if (sv(k) > cutoff) ++r;
    }
    return r;
}

// Orthonormal basis (as columns) of the column span of `cols`.
inline Matrix column_space(const Matrix& cols, double rank_tol) {
    if (cols.size() == 0) return Matrix(cols.rows(), 0);
    Eigen::JacobiSVD<Matrix> svd(cols, Eigen::ComputeThinU);
    const auto& sv = svd.singularValues();
    const double cutoff = rank_tol * std::max(sv.size() > 0 ? sv(0) : 0.0, 1e-300);
    Index r = 0;
    for (Index k = 0; k < sv.size(); ++k) {
        if (sv(k) > cutoff) ++r;
    }
    return svd.matrixU().leftCols(r);
}

inline double projector_defect(const Matrix& p) {
    require_square(p, "projector_defect");
    return std::max((p * p - p).norm(), (p - p.adjoint()).norm());
}

// Orthonormal basis of range(p) for an orthogonal projector p, as the columns
// of a dim×rank isometry. Coordinate projectors yield coordinate vectors in
// ascending index order, so restrictions stay readable.
inline Matrix range_isometry(const Matrix& p, const Tolerance& tol = {}) {
    require_square(p, "range_isometry");
    if (projector_defect(p) > 100 * tol.match_tol) {
        throw DimensionError("range_isometry: input is not an orthogonal projector");
    }
    Eigen::SelfAdjointEigenSolver<Matrix> es(hermitize(p));
    const Index d = p.rows();
    std::vector<std::pair<Index, Index>> picks; // (leading coordinate, eigen index)
    for (Index k = 0; k < d; ++k) {
        if (es.eigenvalues()(k) > 0.5) {
            Vector v = es.eigenvectors().col(k);
            const double mx = v.cwiseAbs().maxCoeff();
            Index lead = 0;
            for (Index i = 0; i < d; ++i) {
                if (std::abs(v(i)) > 0.5 * mx) {
                    lead = i;
                    break;
                }
            }
            picks.emplace_back(lead, k);
        }
    }
    std::sort(picks.begin(), picks.end());
    Matrix iso(d, static_cast<Index>(picks.size()));
    for (Index c = 0; c < iso.cols(); ++c) {
        Vector v = es.eigenvectors().col(picks[static_cast<size_t>(c)].second);
        fix_phase(v);
        iso.col(c) = v;
    }
    return iso;
}

// HS-orthonormalize a list of matrices, dropping near-dependent members.
inline std::vector<Matrix> orthonormalize(const std::vector<Matrix>& mats, double rank_tol = 1e-9) {
    if (mats.empty()) return {};
    const Index d = mats.front().rows();
    Matrix cols(d * d, static_cast<Index>(mats.size()));
    for (size_t k = 0; k < mats.size(); ++k) {
        cols.col(static_cast<Index>(k)) = vectorize(mats[k]);
    }
    Matrix basis = column_space(cols, rank_tol);
    std::vector<Matrix> out;
    out.reserve(static_cast<size_t>(basis.cols()));
    for (Index k = 0; k < basis.cols(); ++k) {
        Vector v = basis.col(k);
        fix_phase(v);
        out.push_back(unvectorize(v, d));
    }
    return out;
}

// Largest principal angle between the spans of two matrix lists; pi/2 when
// the dimensions differ.
inline double subspace_angle(const std::vector<Matrix>& a, const std::vector<Matrix>& b,
                             double rank_tol = 1e-9) {
    auto ba = orthonormalize(a, rank_tol);
    auto bb = orthonormalize(b, rank_tol);
    if (ba.size() != bb.size()) return std::acos(0.0);
    const Index k = static_cast<Index>(ba.size());
    if (k == 0) return 0.0;
    Matrix overlap(k, k);
    for (Index i = 0; i < k; ++i) {
        for (Index j = 0; j < k; ++j) {
            overlap(i, j) = hs_inner(ba[static_cast<size_t>(i)], bb[static_cast<size_t>(j)]);
        }
    }
    Eigen::JacobiSVD<Matrix> svd(overlap);
    return std::acos(std::min(1.0, svd.singularValues().minCoeff()));
}

// Eigenvalue clustering: groups of indices whose values lie within
// eig_group_tol * scale of the cluster seed.
inline std::vector<std::vector<Index>> cluster_values(const Vector& values, double width) {
    std::vector<Index> order(static_cast<size_t>(values.size()));
    std::iota(order.begin(), order.end(), Index{0});
    std::sort(order.begin(), order.end(), [&](Index a, Index b) {
        if (values(a).real() != values(b).real()) return values(a).real() < values(b).real();
        return values(a).imag() < values(b).imag();
    });
    std::vector<std::vector<Index>> clusters;
    for (Index idx : order) {
        bool placed = false;
        for (auto& cl : clusters) {
            if (std::abs(values(cl.front()) - values(idx)) <= width) {
                cl.push_back(idx);
                placed = true;
                break;
            }
        }
        if (!placed) clusters.push_back({idx});
    }
    return clusters;
}

} // namespace lindblad
