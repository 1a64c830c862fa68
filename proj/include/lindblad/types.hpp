// types.hpp — Shared scalar/matrix typedefs, tolerances and error types

#pragma once

#include <Eigen/Dense>

#include <complex>
#include <stdexcept>
#include <string>
#include <vector>

namespace lindblad {

using Complex = std::complex<double>;
using Matrix = Eigen::MatrixXcd;
using Vector = Eigen::VectorXcd;
using RealMatrix = Eigen::MatrixXd;
using RealVector = Eigen::VectorXd;
using Index = Eigen::Index;

constexpr Complex kI{0.0, 1.0};

// Numerical thresholds used throughout.
//   rank_tol      relative singular-value cutoff for rank/null-space decisions
//   match_tol     operator-norm defect below which two matrices count as equal
//   eig_group_tol clustering width for eigenvalues (relative to spectral scale)
struct Tolerance {
    double rank_tol = 1e-9;
    double match_tol = 1e-8;
    double eig_group_tol = 1e-7;

    void validate() const {
        if (!(rank_tol > 0.0) || !(match_tol > 0.0) || !(eig_group_tol > 0.0)) {
            throw std::invalid_argument("Tolerance: all thresholds must be strictly positive");
        }
    }
};

struct Error : std::runtime_error {
    using std::runtime_error::runtime_error;
};

// Shape or index inconsistency in the inputs.
struct DimensionError : Error {
    using Error::Error;
};

// Malformed user input (files, flags, schemas).
struct InputError : Error {
    using Error::Error;
};

// A property the theory guarantees failed numerically; signals either broken
// input or numerical breakdown, never a recoverable state.
struct CertificationError : Error {
    using Error::Error;
};

// Right-hand side handed to the constrained inverse has components outside
// range(D0). The offending traces Tr[A_i tau] are the solvability signal.
struct NotInRangeError : Error {
    std::vector<Complex> offending_traces;

    NotInRangeError(const std::string& msg, std::vector<Complex> traces)
        : Error(msg), offending_traces(std::move(traces)) {}
};

// The order-by-order solvability system leaves kernel directions undetermined
// through the requested order.
struct DegenerateBeyondOrderError : Error {
    std::vector<Vector> unresolved_directions;

    DegenerateBeyondOrderError(const std::string& msg, std::vector<Vector> dirs)
        : Error(msg), unresolved_directions(std::move(dirs)) {}
};

struct InternalError : Error {
    using Error::Error;
};

} // namespace lindblad
