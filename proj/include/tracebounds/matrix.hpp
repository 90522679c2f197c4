#pragma once

#include <cstddef>
#include <initializer_list>
#include <span>
#include <vector>

namespace tracebounds {

using Vector = std::vector<double>;

/// Dense row-major matrix of doubles.
class Matrix {
public:
    Matrix() = default;
    Matrix(std::size_t rows, std::size_t cols, double fill = 0.0);
    Matrix(std::initializer_list<std::initializer_list<double>> rows);

    static Matrix identity(std::size_t n);
    static Matrix diagonal(std::span<const double> diag);
    /// Builds a matrix whose columns are the given vectors (all of equal length).
    static Matrix from_columns(const std::vector<Vector>& columns);

    std::size_t rows() const noexcept { return rows_; }
    std::size_t cols() const noexcept { return cols_; }
    bool empty() const noexcept { return data_.empty(); }

    double& operator()(std::size_t i, std::size_t j) { return data_[i * cols_ + j]; }
    double operator()(std::size_t i, std::size_t j) const { return data_[i * cols_ + j]; }

    std::span<double> row(std::size_t i) { return {data_.data() + i * cols_, cols_}; }
    std::span<const double> row(std::size_t i) const { return {data_.data() + i * cols_, cols_}; }
    Vector column(std::size_t j) const;
    void set_column(std::size_t j, std::span<const double> values);

    std::span<const double> data() const noexcept { return data_; }
    std::span<double> data() noexcept { return data_; }

    Matrix transpose() const;
    /// Copy of rows [r0, r0+nr) and columns [c0, c0+nc).
    Matrix block(std::size_t r0, std::size_t c0, std::size_t nr, std::size_t nc) const;
    double max_abs() const noexcept;

    Matrix& operator+=(const Matrix& other);
    Matrix& operator-=(const Matrix& other);
    Matrix& operator*=(double s);

private:
    std::size_t rows_ = 0;
    std::size_t cols_ = 0;
    std::vector<double> data_;
};

Matrix operator*(const Matrix& a, const Matrix& b);
Matrix operator+(Matrix a, const Matrix& b);
Matrix operator-(Matrix a, const Matrix& b);
Matrix operator*(double s, Matrix a);
Vector operator*(const Matrix& a, std::span<const double> x);

/// aᵀ·b without materializing the transpose.
Matrix transpose_times(const Matrix& a, const Matrix& b);
/// a·bᵀ without materializing the transpose.
Matrix times_transpose(const Matrix& a, const Matrix& b);
/// aᵀ·x
Vector transpose_times(const Matrix& a, std::span<const double> x);

/// max_ij |a_ij - b_ij|; dimensions must agree.
double max_abs_diff(const Matrix& a, const Matrix& b);
/// ‖QᵀQ − I‖_max
double orthonormality_defect(const Matrix& q);

double dot(std::span<const double> x, std::span<const double> y);
double norm2(std::span<const double> x);
double max_abs(std::span<const double> x);
/// y += a·x
void axpy(double a, std::span<const double> x, std::span<double> y);
void scale(std::span<double> x, double a);

/// Dense real symmetric matrix.
///
/// Construction validates |a_ij − a_ji| ≤ 1e−12·max(1, |a_ij|); use
/// `symmetrized` to build one from a nearly symmetric matrix.
class SymMatrix {
public:
    explicit SymMatrix(Matrix entries);
    SymMatrix(std::initializer_list<std::initializer_list<double>> rows);

    /// (M + Mᵀ)/2.
    static SymMatrix symmetrized(const Matrix& m);
    static SymMatrix identity(std::size_t n);
    static SymMatrix diagonal(std::span<const double> diag);

    std::size_t dim() const noexcept { return entries_.rows(); }
    double operator()(std::size_t i, std::size_t j) const { return entries_(i, j); }
    const Matrix& matrix() const noexcept { return entries_; }
    double max_abs() const noexcept { return entries_.max_abs(); }

    Vector apply(std::span<const double> x) const;
    void apply(std::span<const double> x, std::span<double> y) const;

private:
    Matrix entries_;
};

/// Largest |a_ij − a_ji| over the matrix; requires a square input.
double max_asymmetry(const Matrix& m);

} // namespace tracebounds
