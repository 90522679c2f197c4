#include "tracebounds/krylov.hpp"

#include "tracebounds/errors.hpp"

#include <algorithm>
#include <cmath>
#include <sstream>

namespace tracebounds {

double MatrixFunction::operator()(double x) const {
    switch (kind) {
    case Kind::identity: return x;
    case Kind::inv: return 1.0 / x;
    case Kind::inv_sqrt: return 1.0 / std::sqrt(x);
    case Kind::exp: return std::exp(x);
    case Kind::monomial: return std::pow(x, exponent);
    case Kind::neg_power: return std::pow(x, -exponent);
    }
    return 0.0;
}

bool MatrixFunction::needs_positive() const noexcept {
    return kind == Kind::inv || kind == Kind::inv_sqrt || kind == Kind::neg_power;
}

std::string MatrixFunction::name() const {
    std::ostringstream os;
    switch (kind) {
    case Kind::identity: return "identity";
    case Kind::inv: return "inv";
    case Kind::inv_sqrt: return "inv_sqrt";
    case Kind::exp: return "exp";
    case Kind::monomial: os << "monomial(" << exponent << ")"; break;
    case Kind::neg_power: os << "neg_power(" << exponent << ")"; break;
    }
    return os.str();
}

MatrixFunction parse_matrix_function(const std::string& name) {
    if (name == "identity") return MatrixFunction::identity();
    if (name == "inv") return MatrixFunction::inv();
    if (name == "inv_sqrt" || name == "invsqrt") return MatrixFunction::inv_sqrt();
    if (name == "exp") return MatrixFunction::exp();
    throw InvalidArgument("unknown matrix function '" + name + "'");
}

SymMatrix LanczosFactorization::tridiagonal() const {
    const std::size_t m = steps();
    Matrix t(m, m);
    for (std::size_t i = 0; i < m; ++i) {
        t(i, i) = alpha[i];
        if (i + 1 < m) {
            t(i, i + 1) = beta[i];
            t(i + 1, i) = beta[i];
        }
    }
    return SymMatrix(std::move(t));
}

namespace {

// Two passes of classical Gram–Schmidt of w against the vectors in `basis`.
void reorthogonalize(const std::vector<Vector>& basis, std::span<double> w) {
    for (int pass = 0; pass < 2; ++pass)
        for (const Vector& q : basis) axpy(-dot(q, w), q, w);
}

} // namespace

LanczosFactorization lanczos(const LinearOperator& a, std::span<const double> z, std::size_t m) {
    const std::size_t d = a.dim();
    if (z.size() != d) throw InvalidArgument("lanczos: start vector has wrong length");
    if (m < 1 || m > d) throw InvalidArgument("lanczos: need 1 <= m <= d");
    const double znorm = norm2(z);
    if (!(znorm > 0.0)) throw InvalidArgument("lanczos: start vector is zero");

    LanczosFactorization out;
    std::vector<Vector> q;
    q.emplace_back(z.begin(), z.end());
    scale(q.back(), 1.0 / znorm);

    double norm_scale = a.norm_hint();
    const bool running_scale = norm_scale <= 0.0;
    Vector w(d);
    for (std::size_t j = 0; j < m; ++j) {
        a.apply(q[j], w);
        ++out.mvp_count;
        const double alpha = dot(q[j], w);
        out.alpha.push_back(alpha);
        axpy(-alpha, q[j], w);
        if (j > 0) axpy(-out.beta[j - 1], q[j - 1], w);
        reorthogonalize(q, w);

        const double b = norm2(w);
        if (running_scale) norm_scale = std::max({norm_scale, std::abs(alpha), b});
        out.next_residual_norm = b;
        if (j + 1 == m) break;
        if (b <= 1e-12 * norm_scale) {
            out.terminated_early = true;
            break;
        }
        out.beta.push_back(b);
        q.emplace_back(w);
        scale(q.back(), 1.0 / b);
    }
    out.basis = Matrix::from_columns(q);
    return out;
}

LanczosFactorization lanczos(const SymMatrix& a, std::span<const double> z, std::size_t m) {
    return lanczos(DenseOperator(a), z, m);
}

KrylovProduct fa_times_vec_lanczos(const LinearOperator& a, std::span<const double> z, std::size_t m,
                                   const MatrixFunction& f) {
    const LanczosFactorization fac = lanczos(a, z, m);
    const EigenDecomposition ritz = tridiagonal_eigen(fac.alpha, fac.beta);
    const std::size_t k = fac.steps();

    // y = f(T)·e_1 = S·f(Θ)·Sᵀe_1
    Vector y(k, 0.0);
    for (std::size_t i = 0; i < k; ++i) {
        const double theta = ritz.eigvals[i];
        if (f.needs_positive() && !(theta > 0.0)) throw SpectrumError(f.name(), theta);
        const double weight = f(theta) * ritz.eigvecs(0, i);
        for (std::size_t r = 0; r < k; ++r) y[r] += weight * ritz.eigvecs(r, i);
    }
    Vector value = fac.basis * y;
    scale(value, norm2(z));
    return {std::move(value), fac.mvp_count, k};
}

KrylovProduct fa_times_vec_lanczos(const SymMatrix& a, std::span<const double> z, std::size_t m,
                                   const MatrixFunction& f) {
    return fa_times_vec_lanczos(DenseOperator(a), z, m, f);
}

KrylovProduct poly_times_vec(const LinearOperator& a, const ChebPoly& p, std::span<const double> z) {
    const std::size_t d = a.dim();
    if (z.size() != d) throw InvalidArgument("poly_times_vec: vector has wrong length");
    const auto& c = p.coeffs();
    const std::size_t degree = p.degree();
    const double lo = p.interval().lo;
    const double hi = p.interval().hi;

    KrylovProduct out{Vector(d), 0, degree};
    Vector az(d);
    // u(A)·x written into `dst`.
    auto apply_u = [&](std::span<const double> x, std::span<double> dst) {
        a.apply(x, az);
        ++out.mvp_count;
        for (std::size_t i = 0; i < d; ++i) dst[i] = (2.0 * az[i] - (lo + hi) * x[i]) / (hi - lo);
    };

    if (degree == 0) {
        for (std::size_t i = 0; i < d; ++i) out.value[i] = c[0] * z[i];
        return out;
    }

    Vector b1(d), b2(d, 0.0), ub(d);
    for (std::size_t i = 0; i < d; ++i) b1[i] = c[degree] * z[i];
    for (std::size_t k = degree - 1; k >= 1; --k) {
        apply_u(b1, ub);
        for (std::size_t i = 0; i < d; ++i) {
            const double b0 = 2.0 * ub[i] - b2[i] + c[k] * z[i];
            b2[i] = b1[i];
            b1[i] = b0;
        }
    }
    apply_u(b1, ub);
    for (std::size_t i = 0; i < d; ++i) out.value[i] = ub[i] - b2[i] + c[0] * z[i];
    return out;
}

KrylovProduct poly_times_vec(const SymMatrix& a, const ChebPoly& p, std::span<const double> z) {
    return poly_times_vec(DenseOperator(a), p, z);
}

Vector exact_fa_times_vec(const EigenDecomposition& eig, const MatrixFunction& f, std::span<const double> z) {
    Vector coords = transpose_times(eig.eigvecs, z);
    for (std::size_t i = 0; i < coords.size(); ++i) {
        const double lambda = eig.eigvals[i];
        if (f.needs_positive() && !(lambda > 0.0)) throw SpectrumError(f.name(), lambda);
        coords[i] *= f(lambda);
    }
    return eig.eigvecs * coords;
}

BlockKrylovBasis block_krylov_basis(const LinearOperator& a, const Matrix& v, std::size_t m) {
    const std::size_t d = a.dim();
    const std::size_t b = v.cols();
    if (v.rows() != d) throw InvalidArgument("block_krylov_basis: block has wrong row count");
    if (m < 1 || b < 1 || m * b > d) throw InvalidArgument("block_krylov_basis: need 1 <= m*b <= d");
    if (v.max_abs() == 0.0) throw InvalidArgument("block_krylov_basis: starting block is zero");

    BlockKrylovBasis out;
    out.block_size = b;
    std::vector<Vector> basis;

    // Orthogonalizes the candidates against the basis and appends survivors.
    auto absorb = [&](std::vector<Vector> candidates, std::size_t step) {
        std::vector<Vector> accepted;
        for (std::size_t c = 0; c < candidates.size(); ++c) {
            Vector& w = candidates[c];
            const double before = norm2(w);
            reorthogonalize(basis, w);
            const double after = norm2(w);
            if (before == 0.0 || after <= 1e-10 * before) {
                out.deflation_log.push_back({step, c, before == 0.0 ? 0.0 : after / before});
                continue;
            }
            scale(w, 1.0 / after);
            basis.push_back(w);
            accepted.push_back(std::move(w));
        }
        return accepted;
    };

    std::vector<Vector> start;
    for (std::size_t j = 0; j < b; ++j) start.push_back(v.column(j));
    std::vector<Vector> current = absorb(std::move(start), 0);
    out.steps = 1;

    for (std::size_t step = 1; step < m && !current.empty(); ++step) {
        std::vector<Vector> next;
        for (const Vector& q : current) {
            Vector w(d);
            a.apply(q, w);
            ++out.mvp_count;
            next.push_back(std::move(w));
        }
        current = absorb(std::move(next), step);
        if (!current.empty()) out.steps = step + 1;
    }
    out.basis = Matrix::from_columns(basis);
    return out;
}

BlockKrylovBasis block_krylov_basis(const SymMatrix& a, const Matrix& v, std::size_t m) {
    return block_krylov_basis(DenseOperator(a), v, m);
}

Matrix block_krylov_apply(const SymMatrix& a, const BlockKrylovBasis& basis, const Matrix& v,
                          const MatrixFunction& f) {
    const Matrix& q = basis.basis;
    const Matrix projected = transpose_times(q, a.matrix() * q);
    const EigenDecomposition eig = sym_eigen(SymMatrix::symmetrized(projected));
    for (double theta : eig.eigvals)
        if (f.needs_positive() && !(theta > 0.0)) throw SpectrumError(f.name(), theta);
    const Matrix fh = eig.reconstruct([&](double x) { return f(x); });
    return q * (fh * transpose_times(q, v));
}

} // namespace tracebounds
