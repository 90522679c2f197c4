#pragma once

#include "tracebounds/cheb.hpp"
#include "tracebounds/linalg.hpp"
#include "tracebounds/matrix.hpp"

#include <cstddef>
#include <span>
#include <string>
#include <vector>

namespace tracebounds {

/// Symmetric operator accessed only through products y = A·x.
class LinearOperator {
public:
    virtual ~LinearOperator() = default;
    virtual std::size_t dim() const = 0;
    virtual void apply(std::span<const double> x, std::span<double> y) const = 0;
    /// ‖A‖_max when known, 0 otherwise. Used to scale breakdown tolerances.
    virtual double norm_hint() const { return 0.0; }
};

/// Dense symmetric matrix as an operator. Holds a reference; the matrix must
/// outlive the operator.
class DenseOperator final : public LinearOperator {
public:
    explicit DenseOperator(const SymMatrix& a) : a_(a) {}
    std::size_t dim() const override { return a_.dim(); }
    void apply(std::span<const double> x, std::span<double> y) const override { a_.apply(x, y); }
    double norm_hint() const override { return a_.max_abs(); }

private:
    const SymMatrix& a_;
};

/// Scalar function applied to a symmetric matrix through its spectrum.
struct MatrixFunction {
    enum class Kind { identity, inv, inv_sqrt, exp, monomial, neg_power };

    Kind kind = Kind::identity;
    double exponent = 1.0; ///< s for monomial, p for neg_power (x^{−p})

    static MatrixFunction identity() { return {Kind::identity, 1.0}; }
    static MatrixFunction inv() { return {Kind::inv, 1.0}; }
    static MatrixFunction inv_sqrt() { return {Kind::inv_sqrt, 0.5}; }
    static MatrixFunction exp() { return {Kind::exp, 1.0}; }
    static MatrixFunction monomial(int s) { return {Kind::monomial, static_cast<double>(s)}; }
    static MatrixFunction neg_power(double p) { return {Kind::neg_power, p}; }

    double operator()(double x) const;
    /// True when the function is only defined for positive arguments.
    bool needs_positive() const noexcept;
    std::string name() const;
};

MatrixFunction parse_matrix_function(const std::string& name);

struct LanczosFactorization {
    Matrix basis;             ///< d×m, orthonormal columns
    Vector alpha;             ///< diagonal of T_m
    Vector beta;              ///< off-diagonal of T_m, length m−1
    double next_residual_norm = 0.0;
    bool terminated_early = false; ///< breakdown shrank m below the request
    std::size_t mvp_count = 0;

    std::size_t steps() const noexcept { return alpha.size(); }
    /// T_m as a dense symmetric matrix.
    SymMatrix tridiagonal() const;
};

/// m steps of Lanczos with full reorthogonalization, started at z/‖z‖.
/// Stops early when the residual drops to 1e−12·‖A‖_max.
LanczosFactorization lanczos(const LinearOperator& a, std::span<const double> z, std::size_t m);
LanczosFactorization lanczos(const SymMatrix& a, std::span<const double> z, std::size_t m);

struct KrylovProduct {
    Vector value;
    std::size_t mvp_count = 0;
    std::size_t steps = 0; ///< realized Lanczos steps (equals requested m unless breakdown)
};

/// ‖z‖·Q·f(T_m)·e_1. Throws SpectrumError when f needs positive arguments
/// and a Ritz value is not positive.
KrylovProduct fa_times_vec_lanczos(const LinearOperator& a, std::span<const double> z, std::size_t m,
                                   const MatrixFunction& f);
KrylovProduct fa_times_vec_lanczos(const SymMatrix& a, std::span<const double> z, std::size_t m,
                                   const MatrixFunction& f);

/// p(A)·z by the matrix Clenshaw recurrence on u(A) = (2A − (a+b)I)/(b − a).
/// Uses exactly degree(p) products with A.
KrylovProduct poly_times_vec(const LinearOperator& a, const ChebPoly& p, std::span<const double> z);
KrylovProduct poly_times_vec(const SymMatrix& a, const ChebPoly& p, std::span<const double> z);

/// f(A)·z through a full eigendecomposition; the reference oracle.
Vector exact_fa_times_vec(const EigenDecomposition& eig, const MatrixFunction& f, std::span<const double> z);

struct Deflation {
    std::size_t step = 0;   ///< block index at which the column vanished (0 = starting block)
    std::size_t column = 0; ///< column within that block
    double residual = 0.0;  ///< its norm after orthogonalization, relative to before
};

struct BlockKrylovBasis {
    Matrix basis;                 ///< d×k orthonormal columns, k ≤ m·b
    std::size_t block_size = 1;
    std::size_t steps = 0;        ///< blocks actually generated
    std::vector<Deflation> deflation_log;
    std::size_t mvp_count = 0;    ///< single-vector products used
};

/// Orthonormal basis of span{V, AV, …, A^{m−1}V} by block Gram–Schmidt with
/// reorthogonalization. Columns whose orthogonalized norm falls to 1e−10 of
/// their original norm are dropped and logged.
BlockKrylovBasis block_krylov_basis(const LinearOperator& a, const Matrix& v, std::size_t m);
BlockKrylovBasis block_krylov_basis(const SymMatrix& a, const Matrix& v, std::size_t m);

/// Q·f(QᵀAQ)·QᵀV for the basis Q.
Matrix block_krylov_apply(const SymMatrix& a, const BlockKrylovBasis& basis, const Matrix& v,
                          const MatrixFunction& f);

} // namespace tracebounds
