#include "tracebounds/matrix.hpp"

#include "tracebounds/errors.hpp"

#include <algorithm>
#include <cmath>
#include <string>

namespace tracebounds {

Matrix::Matrix(std::size_t rows, std::size_t cols, double fill)
    : rows_(rows), cols_(cols), data_(rows * cols, fill) {}

Matrix::Matrix(std::initializer_list<std::initializer_list<double>> rows) {
    rows_ = rows.size();
    cols_ = rows_ == 0 ? 0 : rows.begin()->size();
    data_.reserve(rows_ * cols_);
    for (const auto& r : rows) {
        if (r.size() != cols_) throw InvalidArgument("ragged matrix initializer");
        data_.insert(data_.end(), r.begin(), r.end());
    }
}

Matrix Matrix::identity(std::size_t n) {
    Matrix m(n, n);
    for (std::size_t i = 0; i < n; ++i) m(i, i) = 1.0;
    return m;
}

Matrix Matrix::diagonal(std::span<const double> diag) {
    Matrix m(diag.size(), diag.size());
    for (std::size_t i = 0; i < diag.size(); ++i) m(i, i) = diag[i];
    return m;
}

Matrix Matrix::from_columns(const std::vector<Vector>& columns) {
    if (columns.empty()) return {};
    Matrix m(columns.front().size(), columns.size());
    for (std::size_t j = 0; j < columns.size(); ++j) {
        if (columns[j].size() != m.rows()) throw InvalidArgument("columns of unequal length");
        m.set_column(j, columns[j]);
    }
    return m;
}

Vector Matrix::column(std::size_t j) const {
    Vector c(rows_);
    for (std::size_t i = 0; i < rows_; ++i) c[i] = (*this)(i, j);
    return c;
}

void Matrix::set_column(std::size_t j, std::span<const double> values) {
    for (std::size_t i = 0; i < rows_; ++i) (*this)(i, j) = values[i];
}

Matrix Matrix::transpose() const {
    Matrix t(cols_, rows_);
    for (std::size_t i = 0; i < rows_; ++i)
        for (std::size_t j = 0; j < cols_; ++j) t(j, i) = (*this)(i, j);
    return t;
}

Matrix Matrix::block(std::size_t r0, std::size_t c0, std::size_t nr, std::size_t nc) const {
    if (r0 + nr > rows_ || c0 + nc > cols_) throw InvalidArgument("block out of range");
    Matrix b(nr, nc);
    for (std::size_t i = 0; i < nr; ++i)
        for (std::size_t j = 0; j < nc; ++j) b(i, j) = (*this)(r0 + i, c0 + j);
    return b;
}

double Matrix::max_abs() const noexcept { return tracebounds::max_abs(data_); }

Matrix& Matrix::operator+=(const Matrix& other) {
    if (rows_ != other.rows_ || cols_ != other.cols_) throw InvalidArgument("dimension mismatch in +=");
    for (std::size_t k = 0; k < data_.size(); ++k) data_[k] += other.data_[k];
    return *this;
}

Matrix& Matrix::operator-=(const Matrix& other) {
    if (rows_ != other.rows_ || cols_ != other.cols_) throw InvalidArgument("dimension mismatch in -=");
    for (std::size_t k = 0; k < data_.size(); ++k) data_[k] -= other.data_[k];
    return *this;
}

Matrix& Matrix::operator*=(double s) {
    for (auto& v : data_) v *= s;
    return *this;
}

Matrix operator*(const Matrix& a, const Matrix& b) {
    if (a.cols() != b.rows()) throw InvalidArgument("dimension mismatch in matrix product");
    Matrix c(a.rows(), b.cols());
    for (std::size_t i = 0; i < a.rows(); ++i) {
        auto crow = c.row(i);
        for (std::size_t k = 0; k < a.cols(); ++k) {
            const double aik = a(i, k);
            if (aik == 0.0) continue;
            axpy(aik, b.row(k), crow);
        }
    }
    return c;
}

Matrix operator+(Matrix a, const Matrix& b) { return a += b; }
Matrix operator-(Matrix a, const Matrix& b) { return a -= b; }
Matrix operator*(double s, Matrix a) { return a *= s; }

Vector operator*(const Matrix& a, std::span<const double> x) {
    if (a.cols() != x.size()) throw InvalidArgument("dimension mismatch in matrix-vector product");
    Vector y(a.rows());
    for (std::size_t i = 0; i < a.rows(); ++i) y[i] = dot(a.row(i), x);
    return y;
}

Matrix transpose_times(const Matrix& a, const Matrix& b) {
    if (a.rows() != b.rows()) throw InvalidArgument("dimension mismatch in transpose_times");
    Matrix c(a.cols(), b.cols());
    for (std::size_t k = 0; k < a.rows(); ++k) {
        auto brow = b.row(k);
        for (std::size_t i = 0; i < a.cols(); ++i) {
            const double aki = a(k, i);
            if (aki == 0.0) continue;
            axpy(aki, brow, c.row(i));
        }
    }
    return c;
}

Matrix times_transpose(const Matrix& a, const Matrix& b) {
    if (a.cols() != b.cols()) throw InvalidArgument("dimension mismatch in times_transpose");
    Matrix c(a.rows(), b.rows());
    for (std::size_t i = 0; i < a.rows(); ++i)
        for (std::size_t j = 0; j < b.rows(); ++j) c(i, j) = dot(a.row(i), b.row(j));
    return c;
}

Vector transpose_times(const Matrix& a, std::span<const double> x) {
    if (a.rows() != x.size()) throw InvalidArgument("dimension mismatch in transpose_times");
    Vector y(a.cols(), 0.0);
    for (std::size_t k = 0; k < a.rows(); ++k) axpy(x[k], a.row(k), y);
    return y;
}

double max_abs_diff(const Matrix& a, const Matrix& b) {
    if (a.rows() != b.rows() || a.cols() != b.cols()) throw InvalidArgument("dimension mismatch in max_abs_diff");
    double m = 0.0;
    for (std::size_t k = 0; k < a.data().size(); ++k) m = std::max(m, std::abs(a.data()[k] - b.data()[k]));
    return m;
}

double orthonormality_defect(const Matrix& q) {
    return max_abs_diff(transpose_times(q, q), Matrix::identity(q.cols()));
}

double dot(std::span<const double> x, std::span<const double> y) {
    double s = 0.0;
    for (std::size_t i = 0; i < x.size(); ++i) s += x[i] * y[i];
    return s;
}

double norm2(std::span<const double> x) {
    // Scaled to avoid overflow for very large entries.
    const double m = max_abs(x);
    if (m == 0.0 || !std::isfinite(m)) return m;
    double s = 0.0;
    for (double v : x) {
        const double r = v / m;
        s += r * r;
    }
    return m * std::sqrt(s);
}

double max_abs(std::span<const double> x) {
    double m = 0.0;
    for (double v : x) m = std::max(m, std::abs(v));
    return m;
}

void axpy(double a, std::span<const double> x, std::span<double> y) {
    for (std::size_t i = 0; i < x.size(); ++i) y[i] += a * x[i];
}

void scale(std::span<double> x, double a) {
    for (auto& v : x) v *= a;
}

double max_asymmetry(const Matrix& m) {
    if (m.rows() != m.cols()) throw InvalidArgument("matrix is not square");
    double worst = 0.0;
    for (std::size_t i = 0; i < m.rows(); ++i)
        for (std::size_t j = i + 1; j < m.cols(); ++j) worst = std::max(worst, std::abs(m(i, j) - m(j, i)));
    return worst;
}

SymMatrix::SymMatrix(Matrix entries) : entries_(std::move(entries)) {
    const std::size_t n = entries_.rows();
    if (n == 0) throw InvalidArgument("symmetric matrix must have dimension >= 1");
    if (entries_.cols() != n) throw InvalidArgument("symmetric matrix must be square");
    for (std::size_t i = 0; i < n; ++i) {
        for (std::size_t j = i + 1; j < n; ++j) {
            const double aij = entries_(i, j);
            if (std::abs(aij - entries_(j, i)) > 1e-12 * std::max(1.0, std::abs(aij)))
                throw InvalidArgument("matrix is not symmetric at (" + std::to_string(i) + ", " +
                                      std::to_string(j) + ")");
        }
    }
}

SymMatrix::SymMatrix(std::initializer_list<std::initializer_list<double>> rows) : SymMatrix(Matrix(rows)) {}

SymMatrix SymMatrix::symmetrized(const Matrix& m) {
    if (m.rows() != m.cols()) throw InvalidArgument("matrix is not square");
    Matrix s(m.rows(), m.cols());
    for (std::size_t i = 0; i < m.rows(); ++i) {
        s(i, i) = m(i, i);
        for (std::size_t j = i + 1; j < m.cols(); ++j) {
            const double v = 0.5 * (m(i, j) + m(j, i));
            s(i, j) = v;
            s(j, i) = v;
        }
    }
    return SymMatrix(std::move(s));
}

SymMatrix SymMatrix::identity(std::size_t n) { return SymMatrix(Matrix::identity(n)); }

SymMatrix SymMatrix::diagonal(std::span<const double> diag) { return SymMatrix(Matrix::diagonal(diag)); }

Vector SymMatrix::apply(std::span<const double> x) const { return entries_ * x; }

void SymMatrix::apply(std::span<const double> x, std::span<double> y) const {
    if (x.size() != dim() || y.size() != dim()) throw InvalidArgument("dimension mismatch in apply");
    for (std::size_t i = 0; i < dim(); ++i) y[i] = dot(entries_.row(i), x);
}

} // namespace tracebounds
