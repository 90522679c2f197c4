#include "tracebounds/random.hpp"

#include "tracebounds/errors.hpp"
#include "tracebounds/linalg.hpp"

#include <cmath>

namespace tracebounds {

std::uint64_t splitmix64(std::uint64_t x) noexcept {
    x += 0x9E3779B97F4A7C15ULL;
    x = (x ^ (x >> 30)) * 0xBF58476D1CE4E5B9ULL;
    x = (x ^ (x >> 27)) * 0x94D049BB133111EBULL;
    return x ^ (x >> 31);
}

RngState RngState::derive(std::uint64_t child) const noexcept {
    return {splitmix64(splitmix64(seed) ^ splitmix64(stream + 0x632BE59BD9B4E019ULL)), child};
}

Rng::Rng(RngState state)
    : engine_(splitmix64(splitmix64(state.seed) ^ splitmix64(state.stream + 0x9E3779B97F4A7C15ULL))) {}

double Rng::uniform() { return static_cast<double>(engine_() >> 11) * 0x1.0p-53; }

double Rng::normal() {
    if (has_spare_) {
        has_spare_ = false;
        return spare_;
    }
    double u, v, s;
    do {
        u = 2.0 * uniform() - 1.0;
        v = 2.0 * uniform() - 1.0;
        s = u * u + v * v;
    } while (s >= 1.0 || s == 0.0);
    const double factor = std::sqrt(-2.0 * std::log(s) / s);
    spare_ = v * factor;
    has_spare_ = true;
    return u * factor;
}

double Rng::rademacher() { return (engine_() >> 63) != 0 ? 1.0 : -1.0; }

Matrix sample_gaussian_matrix(std::size_t rows, std::size_t cols, RngState state) {
    if (rows == 0 || cols == 0) throw InvalidArgument("gaussian matrix needs rows, cols >= 1");
    Rng rng(state);
    Matrix g(rows, cols);
    for (auto& x : g.data()) x = rng.normal();
    return g;
}

SymMatrix sample_wishart(std::size_t d, RngState state) {
    if (d == 0) throw InvalidArgument("wishart dimension must be >= 1");
    const Matrix g = sample_gaussian_matrix(d, d, state);
    Matrix w = times_transpose(g, g);
    w *= 1.0 / static_cast<double>(d);
    // times_transpose computes w(i,j) and w(j,i) with identical dot products,
    // so the result is exactly symmetric.
    return SymMatrix(std::move(w));
}

Matrix random_orthogonal(std::size_t d, RngState state) {
    const Matrix g = sample_gaussian_matrix(d, d, state);
    return qr_columns(g).q; // R has positive diagonal, which makes Q Haar
}

SymMatrix random_spd(std::size_t d, double lo, double hi, RngState state) {
    if (!(lo > 0.0) || !(hi >= lo)) throw InvalidArgument("random_spd needs 0 < lo <= hi");
    Rng rng(state.derive(1));
    Vector lambda(d);
    for (std::size_t i = 0; i < d; ++i) lambda[i] = lo + (hi - lo) * rng.uniform();
    lambda[0] = lo;
    if (d >= 2) lambda[1] = hi;
    const Matrix q = random_orthogonal(d, state.derive(0));
    Matrix scaled = q;
    for (std::size_t j = 0; j < d; ++j)
        for (std::size_t i = 0; i < d; ++i) scaled(i, j) *= lambda[j];
    return SymMatrix::symmetrized(times_transpose(scaled, q));
}

} // namespace tracebounds
