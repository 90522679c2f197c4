#pragma once

#include "tracebounds/cheb.hpp"

#include <cstddef>

namespace tracebounds {

/// Degree of the compressed monomial: min(s, ⌈√(2s·ln(2/δ))⌉).
std::size_t monomial_degree_cap(int s, double delta);

/// Approximation of x^s on [−1, 1] with sup error ≤ δ.
///
/// x^s = 2^{−s} Σ_k C(s,k)·T_{|s−2k|}(x), i.e. the Chebyshev coefficients are
/// the law of a ±1 random walk after s steps. Dropping every index above the
/// degree cap discards at most 2·exp(−D²/2s) ≤ δ of that mass.
ChebPoly monomial_cheb_approx(int s, double delta);

/// Smallest T ≥ 0 with κ·(1 − 1/κ)^{T+1} ≤ delta_half.
std::size_t taylor_truncation_length(double kappa, double delta_half);

/// Full record of a composite series construction for x^{−1/2} or x^{−1}.
///
/// The composite is ĥ(y) = Σ_{t≤T} c_t·p_t(y) on [−1, 1], where p_t
/// approximates y^t to `term_tolerances[t]` (p_0 = 1). The result is
/// s·ĥ(x/κ − 1) on [1, κ] with s = 1/√κ or 1/κ, re-expanded by Chebyshev
/// interpolation on [1, κ].
struct SeriesConstruction {
    ApproxTarget target;
    std::size_t truncation = 0;     ///< T
    Vector series_coeffs;           ///< c_0..c_T
    Vector term_tolerances;         ///< tolerance for p_t; entry 0 is 0
    ChebPoly composite;             ///< ĥ on [−1, 1]
    ChebPoly result;                ///< final polynomial on [1, κ]
    double output_scale = 1.0;      ///< 1/√κ or 1/κ
};

/// Builds the construction without certifying it.
SeriesConstruction build_series(const ApproxTarget& target);

/// Polynomial on [1, κ] with |q(x) − x^{−1/2}| ≤ δ/√κ. Throws
/// CertificateError if the grid check fails.
ChebPoly inv_sqrt_poly(double kappa, double delta);

/// Polynomial on [1, κ] with |r(x) − x^{−1}| ≤ δ/κ. Throws CertificateError
/// if the grid check fails.
ChebPoly inv_poly(double kappa, double delta);

/// Dispatches on target.kind.
ChebPoly build_poly(const ApproxTarget& target);

/// Constant c₀ of the documented degree law degree ≤ c₀·√κ·ln(κ/δ) for the
/// inv and inv_sqrt constructions.
inline constexpr double kDegreeLawConstant = 4.0;

/// Minimum grid accepted by sup_error for a polynomial of this degree.
std::size_t min_grid_size(std::size_t degree);

/// max over a Chebyshev–Lobatto grid of `grid_size` points on the polynomial's
/// interval of |p(x) − target(x)|. A lower bound on the true sup norm.
/// Throws InvalidArgument if grid_size < max(1024, 10·degree(p)).
double sup_error(const ChebPoly& p, const ApproxTarget& target, std::size_t grid_size);

struct Certificate {
    std::size_t degree = 0;
    std::size_t grid_size = 0;
    double grid_sup_error = 0.0;
    double bound = 0.0;

    bool passed() const noexcept { return grid_sup_error <= bound; }
};

Certificate certify(const ChebPoly& p, const ApproxTarget& target, std::size_t grid_size);

} // namespace tracebounds
