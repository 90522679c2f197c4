#pragma once

#include "tracebounds/matrix.hpp"

#include <cstddef>
#include <functional>
#include <span>

namespace tracebounds {

/// Eigenpairs of a symmetric matrix. Eigenvalues ascending; column j of
/// `eigvecs` belongs to `eigvals[j]`.
struct EigenDecomposition {
    Vector eigvals;
    Matrix eigvecs;

    /// V·diag(f(λ))·Vᵀ
    Matrix reconstruct(const std::function<double(double)>& f) const;
    Matrix reconstruct() const;
};

/// Householder tridiagonalization followed by implicit QL with Wilkinson-type
/// shifts. Throws ConvergenceError after 64·d QL iterations.
EigenDecomposition sym_eigen(const SymMatrix& a);

/// Eigenpairs of the symmetric tridiagonal matrix with diagonal `alpha` and
/// off-diagonal `beta` (beta.size() == alpha.size() - 1).
EigenDecomposition tridiagonal_eigen(std::span<const double> alpha, std::span<const double> beta);

/// Eigenvalues only (same algorithm, skips vector accumulation).
Vector sym_eigenvalues(const SymMatrix& a);

/// Lower-triangular L with L·Lᵀ = S and a nonnegative diagonal.
/// Throws NotPositiveDefinite naming the 1-based pivot when a pivot falls
/// below 1e−12·‖S‖_max.
Matrix cholesky(const SymMatrix& s);

struct QRFactors {
    Matrix q; ///< d×n, orthonormal columns
    Matrix r; ///< n×n upper triangular, positive diagonal
};

/// Thin QR by classical Gram–Schmidt with one full reorthogonalization pass.
/// Throws RankDeficient (1-based column) when |R_kk| ≤ 1e−10·‖M‖_max.
QRFactors qr_columns(const Matrix& m);

/// d×(d−n) matrix Z with orthonormal columns and Qᵀ·Z = 0, for Q with
/// orthonormal columns. Built from Householder reflectors of Q.
Matrix orthonormal_complement(const Matrix& q);

/// X with X·R = B for upper-triangular R.
Matrix solve_right_upper(const Matrix& b, const Matrix& r);
/// X with X·Lᵀ = B for lower-triangular L.
Matrix solve_right_lower_transpose(const Matrix& b, const Matrix& l);

} // namespace tracebounds
