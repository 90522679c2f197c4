#pragma once

#include "tracebounds/matrix.hpp"

#include <cstddef>
#include <cstdint>
#include <random>

namespace tracebounds {

/// Reproducibility key for every random draw in the library.
///
/// The engine for (seed, stream) is std::mt19937_64 seeded with
/// splitmix64(splitmix64(seed) ^ splitmix64(stream + 0x9E3779B97F4A7C15)).
/// Uniforms take the top 53 bits of one engine word; normals use the
/// Marsaglia polar method; Rademacher signs use the top bit. All of these are
/// fixed and do not depend on the standard library's distribution classes.
struct RngState {
    std::uint64_t seed = 0;
    std::uint64_t stream = 0;

    /// A child key: (seed, stream) collapse into a new seed, `child` is the stream.
    RngState derive(std::uint64_t child) const noexcept;

    friend bool operator==(const RngState&, const RngState&) = default;
};

std::uint64_t splitmix64(std::uint64_t x) noexcept;

class Rng {
public:
    explicit Rng(RngState state);

    std::uint64_t bits() { return engine_(); }
    /// Uniform on [0, 1).
    double uniform();
    double normal();
    /// ±1 with equal probability.
    double rademacher();

private:
    std::mt19937_64 engine_;
    double spare_ = 0.0;
    bool has_spare_ = false;
};

/// rows×cols matrix of i.i.d. N(0,1) entries, filled row-major.
Matrix sample_gaussian_matrix(std::size_t rows, std::size_t cols, RngState rng);

/// W = (1/d)·G·Gᵀ with G a d×d standard Gaussian matrix.
SymMatrix sample_wishart(std::size_t d, RngState rng);

/// Q·diag(λ)·Qᵀ with Q Haar-distributed and λ spread over [lo, hi]; the
/// endpoints lo and hi are always eigenvalues when d ≥ 2.
SymMatrix random_spd(std::size_t d, double lo, double hi, RngState rng);

/// Haar-distributed d×d orthogonal matrix (QR of a Gaussian matrix with sign fix).
Matrix random_orthogonal(std::size_t d, RngState rng);

} // namespace tracebounds
