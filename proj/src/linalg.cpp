#include "tracebounds/linalg.hpp"

#include "tracebounds/errors.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <numeric>

namespace tracebounds {

namespace {

// Householder reduction of the symmetric matrix held in v to tridiagonal
// form. On return d holds the diagonal, e the subdiagonal in e[1..n-1], and
// v the accumulated orthogonal transformation.
void tridiagonalize(Matrix& v, Vector& d, Vector& e) {
    const std::size_t n = v.rows();
    for (std::size_t j = 0; j < n; ++j) d[j] = v(n - 1, j);

    for (std::size_t i = n - 1; i > 0; --i) {
        double scale = 0.0;
        double h = 0.0;
        for (std::size_t k = 0; k < i; ++k) scale += std::abs(d[k]);
        if (scale == 0.0) {
            e[i] = d[i - 1];
            for (std::size_t j = 0; j < i; ++j) {
                d[j] = v(i - 1, j);
                v(i, j) = 0.0;
                v(j, i) = 0.0;
            }
        } else {
            for (std::size_t k = 0; k < i; ++k) {
                d[k] /= scale;
                h += d[k] * d[k];
            }
            double f = d[i - 1];
            double g = std::sqrt(h);
            if (f > 0) g = -g;
            e[i] = scale * g;
            h -= f * g;
            d[i - 1] = f - g;
            for (std::size_t j = 0; j < i; ++j) e[j] = 0.0;

            for (std::size_t j = 0; j < i; ++j) {
                f = d[j];
                v(j, i) = f;
                g = e[j] + v(j, j) * f;
                for (std::size_t k = j + 1; k <= i - 1; ++k) {
                    g += v(k, j) * d[k];
                    e[k] += v(k, j) * f;
                }
                e[j] = g;
            }
            f = 0.0;
            for (std::size_t j = 0; j < i; ++j) {
                e[j] /= h;
                f += e[j] * d[j];
            }
            const double hh = f / (h + h);
            for (std::size_t j = 0; j < i; ++j) e[j] -= hh * d[j];
            for (std::size_t j = 0; j < i; ++j) {
                f = d[j];
                g = e[j];
                for (std::size_t k = j; k <= i - 1; ++k) v(k, j) -= (f * e[k] + g * d[k]);
                d[j] = v(i - 1, j);
                v(i, j) = 0.0;
            }
        }
        d[i] = h;
    }

    for (std::size_t i = 0; i + 1 < n; ++i) {
        v(n - 1, i) = v(i, i);
        v(i, i) = 1.0;
        const double h = d[i + 1];
        if (h != 0.0) {
            for (std::size_t k = 0; k <= i; ++k) d[k] = v(k, i + 1) / h;
            for (std::size_t j = 0; j <= i; ++j) {
                double g = 0.0;
                for (std::size_t k = 0; k <= i; ++k) g += v(k, i + 1) * v(k, j);
                for (std::size_t k = 0; k <= i; ++k) v(k, j) -= g * d[k];
            }
        }
        for (std::size_t k = 0; k <= i; ++k) v(k, i + 1) = 0.0;
    }
    for (std::size_t j = 0; j < n; ++j) {
        d[j] = v(n - 1, j);
        v(n - 1, j) = 0.0;
    }
    v(n - 1, n - 1) = 1.0;
    e[0] = 0.0;
}

// Implicit QL on the tridiagonal (d, e) where e[i] couples rows i and i+1
// and e[n-1] = 0. Rotations are accumulated into v when it is non-empty.
void implicit_ql(Vector& d, Vector& e, Matrix* v) {
    const std::size_t n = d.size();
    const double eps = std::numeric_limits<double>::epsilon();
    const std::size_t cap = 64 * std::max<std::size_t>(n, 1);
    std::size_t iterations = 0;

    double f = 0.0;
    double tst1 = 0.0;
    for (std::size_t l = 0; l < n; ++l) {
        tst1 = std::max(tst1, std::abs(d[l]) + std::abs(e[l]));
        std::size_t m = l;
        while (m < n - 1 && std::abs(e[m]) > eps * tst1) ++m;

        if (m > l) {
            do {
                if (++iterations > cap)
                    throw ConvergenceError("symmetric eigensolver did not converge within 64*d iterations",
                                           std::abs(e[l]));
                double g = d[l];
                double p = (d[l + 1] - g) / (2.0 * e[l]);
                double r = std::hypot(p, 1.0);
                if (p < 0) r = -r;
                d[l] = e[l] / (p + r);
                d[l + 1] = e[l] * (p + r);
                const double dl1 = d[l + 1];
                double h = g - d[l];
                for (std::size_t i = l + 2; i < n; ++i) d[i] -= h;
                f += h;

                p = d[m];
                double c = 1.0, c2 = 1.0, c3 = 1.0;
                const double el1 = e[l + 1];
                double s = 0.0, s2 = 0.0;
                for (std::size_t ii = m; ii-- > l;) {
                    c3 = c2;
                    c2 = c;
                    s2 = s;
                    g = c * e[ii];
                    h = c * p;
                    r = std::hypot(p, e[ii]);
                    e[ii + 1] = s * r;
                    s = e[ii] / r;
                    c = p / r;
                    p = c * d[ii] - s * g;
                    d[ii + 1] = h + s * (c * g + s * d[ii]);
                    if (v != nullptr) {
                        for (std::size_t k = 0; k < n; ++k) {
                            h = (*v)(k, ii + 1);
                            (*v)(k, ii + 1) = s * (*v)(k, ii) + c * h;
                            (*v)(k, ii) = c * (*v)(k, ii) - s * h;
                        }
                    }
                }
                p = -s * s2 * c3 * el1 * e[l] / dl1;
                e[l] = s * p;
                d[l] = c * p;
            } while (std::abs(e[l]) > eps * tst1);
        }
        d[l] += f;
        e[l] = 0.0;
    }
}

EigenDecomposition sorted(Vector d, const Matrix& v) {
    const std::size_t n = d.size();
    std::vector<std::size_t> order(n);
    std::iota(order.begin(), order.end(), 0);
    std::stable_sort(order.begin(), order.end(), [&](std::size_t a, std::size_t b) { return d[a] < d[b]; });
    EigenDecomposition out{Vector(n), Matrix(n, n)};
    for (std::size_t j = 0; j < n; ++j) {
        out.eigvals[j] = d[order[j]];
        if (!v.empty())
            for (std::size_t k = 0; k < n; ++k) out.eigvecs(k, j) = v(k, order[j]);
    }
    return out;
}

} // namespace

Matrix EigenDecomposition::reconstruct(const std::function<double(double)>& f) const {
    const std::size_t n = eigvals.size();
    Matrix scaled = eigvecs;
    for (std::size_t j = 0; j < n; ++j) {
        const double fj = f(eigvals[j]);
        for (std::size_t i = 0; i < n; ++i) scaled(i, j) *= fj;
    }
    return times_transpose(scaled, eigvecs);
}

Matrix EigenDecomposition::reconstruct() const {
    return reconstruct([](double x) { return x; });
}

EigenDecomposition sym_eigen(const SymMatrix& a) {
    const std::size_t n = a.dim();
    Matrix v = a.matrix();
    Vector d(n), e(n);
    tridiagonalize(v, d, e);
    for (std::size_t i = 1; i < n; ++i) e[i - 1] = e[i];
    e[n - 1] = 0.0;
    implicit_ql(d, e, &v);
    return sorted(std::move(d), v);
}

Vector sym_eigenvalues(const SymMatrix& a) {
    const std::size_t n = a.dim();
    Matrix v = a.matrix();
    Vector d(n), e(n);
    tridiagonalize(v, d, e);
    for (std::size_t i = 1; i < n; ++i) e[i - 1] = e[i];
    e[n - 1] = 0.0;
    implicit_ql(d, e, nullptr);
    std::sort(d.begin(), d.end());
    return d;
}

EigenDecomposition tridiagonal_eigen(std::span<const double> alpha, std::span<const double> beta) {
    const std::size_t n = alpha.size();
    if (n == 0 || beta.size() + 1 != n) throw InvalidArgument("tridiagonal_eigen: beta must have length n-1");
    Vector d(alpha.begin(), alpha.end());
    Vector e(n, 0.0);
    std::copy(beta.begin(), beta.end(), e.begin());
    Matrix v = Matrix::identity(n);
    implicit_ql(d, e, &v);
    return sorted(std::move(d), v);
}

Matrix cholesky(const SymMatrix& s) {
    const std::size_t n = s.dim();
    const double tol = 1e-12 * std::max(s.max_abs(), 1e-300);
    Matrix l(n, n);
    for (std::size_t j = 0; j < n; ++j) {
        double pivot = s(j, j);
        for (std::size_t k = 0; k < j; ++k) pivot -= l(j, k) * l(j, k);
        if (!(pivot > tol)) throw NotPositiveDefinite(j + 1, pivot);
        const double ljj = std::sqrt(pivot);
        l(j, j) = ljj;
        for (std::size_t i = j + 1; i < n; ++i) {
            double v = s(i, j);
            for (std::size_t k = 0; k < j; ++k) v -= l(i, k) * l(j, k);
            l(i, j) = v / ljj;
        }
    }
    return l;
}

QRFactors qr_columns(const Matrix& m) {
    const std::size_t d = m.rows();
    const std::size_t n = m.cols();
    if (n > d) throw InvalidArgument("qr_columns requires cols <= rows");
    const double tol = 1e-10 * m.max_abs();
    QRFactors out{Matrix(d, n), Matrix(n, n)};
    Vector v(d), proj(n);
    for (std::size_t k = 0; k < n; ++k) {
        for (std::size_t i = 0; i < d; ++i) v[i] = m(i, k);
        for (int pass = 0; pass < 2; ++pass) {
            for (std::size_t j = 0; j < k; ++j) {
                double r = 0.0;
                for (std::size_t i = 0; i < d; ++i) r += out.q(i, j) * v[i];
                proj[j] = r;
            }
            for (std::size_t j = 0; j < k; ++j) {
                for (std::size_t i = 0; i < d; ++i) v[i] -= proj[j] * out.q(i, j);
                out.r(j, k) += proj[j];
            }
        }
        const double rkk = norm2(v);
        if (!(rkk > tol)) throw RankDeficient(k + 1, rkk);
        out.r(k, k) = rkk;
        for (std::size_t i = 0; i < d; ++i) out.q(i, k) = v[i] / rkk;
    }
    return out;
}

Matrix orthonormal_complement(const Matrix& q) {
    const std::size_t d = q.rows();
    const std::size_t n = q.cols();
    if (n > d) throw InvalidArgument("orthonormal_complement requires cols <= rows");

    // Householder QR of q; the trailing d−n columns of H_1⋯H_n span range(q)⊥.
    Matrix a = q;
    std::vector<Vector> reflectors;
    std::vector<double> taus;
    for (std::size_t k = 0; k < n; ++k) {
        Vector u(d - k);
        for (std::size_t i = k; i < d; ++i) u[i - k] = a(i, k);
        const double alpha = norm2(u);
        double tau = 0.0;
        if (alpha > 0.0) {
            const double sign = u[0] >= 0 ? 1.0 : -1.0;
            u[0] += sign * alpha;
            const double unorm2 = dot(u, u);
            tau = 2.0 / unorm2;
            for (std::size_t j = k; j < n; ++j) {
                double s = 0.0;
                for (std::size_t i = k; i < d; ++i) s += u[i - k] * a(i, j);
                s *= tau;
                for (std::size_t i = k; i < d; ++i) a(i, j) -= s * u[i - k];
            }
        }
        reflectors.push_back(std::move(u));
        taus.push_back(tau);
    }

    Matrix z(d, d - n);
    for (std::size_t c = 0; c < d - n; ++c) z(n + c, c) = 1.0;
    for (std::size_t k = n; k-- > 0;) {
        const Vector& u = reflectors[k];
        for (std::size_t c = 0; c < d - n; ++c) {
            double s = 0.0;
            for (std::size_t i = k; i < d; ++i) s += u[i - k] * z(i, c);
            s *= taus[k];
            for (std::size_t i = k; i < d; ++i) z(i, c) -= s * u[i - k];
        }
    }
    return z;
}

Matrix solve_right_upper(const Matrix& b, const Matrix& r) {
    const std::size_t n = r.rows();
    if (r.cols() != n || b.cols() != n) throw InvalidArgument("solve_right_upper: dimension mismatch");
    Matrix x(b.rows(), n);
    for (std::size_t row = 0; row < b.rows(); ++row) {
        for (std::size_t j = 0; j < n; ++j) {
            double v = b(row, j);
            for (std::size_t k = 0; k < j; ++k) v -= x(row, k) * r(k, j);
            x(row, j) = v / r(j, j);
        }
    }
    return x;
}

Matrix solve_right_lower_transpose(const Matrix& b, const Matrix& l) {
    const std::size_t n = l.rows();
    if (l.cols() != n || b.cols() != n) throw InvalidArgument("solve_right_lower_transpose: dimension mismatch");
    Matrix x(b.rows(), n);
    for (std::size_t row = 0; row < b.rows(); ++row) {
        for (std::size_t j = 0; j < n; ++j) {
            double v = b(row, j);
            for (std::size_t k = 0; k < j; ++k) v -= x(row, k) * l(j, k);
            x(row, j) = v / l(j, j);
        }
    }
    return x;
}

} // namespace tracebounds
