#include "tracebounds/poly_approx.hpp"

#include "tracebounds/errors.hpp"

#include <algorithm>
#include <cmath>
#include <numbers>

namespace tracebounds {

namespace {

// C(s, k)·2^{−s}, evaluated in log space so large s does not overflow.
double binomial_mass(int s, int k) {
    const double log_mass = std::lgamma(s + 1.0) - std::lgamma(k + 1.0) - std::lgamma(s - k + 1.0) -
                            s * std::numbers::ln2;
    return std::exp(log_mass);
}

bool truncation_meets(double kappa, double delta_half, std::size_t t) {
    return kappa * std::pow(1.0 - 1.0 / kappa, static_cast<double>(t) + 1.0) <= delta_half;
}

} // namespace

std::size_t monomial_degree_cap(int s, double delta) {
    if (s < 1) throw InvalidArgument("monomial power s must be >= 1");
    if (!(delta > 0.0 && delta < 1.0)) throw InvalidArgument("monomial delta must lie in (0, 1)");
    const double cap = std::ceil(std::sqrt(2.0 * s * std::log(2.0 / delta)));
    return std::min(static_cast<std::size_t>(s), static_cast<std::size_t>(cap));
}

ChebPoly monomial_cheb_approx(int s, double delta) {
    const std::size_t cap = monomial_degree_cap(s, delta);
    Vector coeffs(cap + 1, 0.0);
    // Index j = s − 2k collects C(s,k) and C(s,s−k); j = 0 only once.
    for (std::size_t j = static_cast<std::size_t>(s % 2); j <= cap; j += 2) {
        const int k = (s - static_cast<int>(j)) / 2;
        const double mass = binomial_mass(s, k);
        coeffs[j] = j == 0 ? mass : 2.0 * mass;
    }
    return ChebPoly({-1.0, 1.0}, std::move(coeffs));
}

std::size_t taylor_truncation_length(double kappa, double delta_half) {
    if (!(kappa >= 2.0)) throw InvalidArgument("kappa must be >= 2");
    if (!(delta_half > 0.0)) throw InvalidArgument("truncation tolerance must be positive");
    // Start from the closed form and settle on the exact smallest T.
    const double estimate = std::log(kappa / delta_half) / -std::log1p(-1.0 / kappa) - 1.0;
    std::size_t t = estimate > 2.0 ? static_cast<std::size_t>(estimate) - 2 : 0;
    while (!truncation_meets(kappa, delta_half, t)) ++t;
    while (t > 0 && truncation_meets(kappa, delta_half, t - 1)) --t;
    return t;
}

SeriesConstruction build_series(const ApproxTarget& target) {
    target.validate();
    if (target.kind == ApproxTarget::Kind::monomial)
        throw InvalidArgument("build_series handles inv and inv_sqrt targets only");

    const double kappa = target.kappa;
    const double delta = target.delta;
    const bool is_inv = target.kind == ApproxTarget::Kind::inv;
    const std::size_t T = taylor_truncation_length(kappa, delta / 2.0);

    Vector series(T + 1);
    Vector tolerances(T + 1, 0.0);
    series[0] = 1.0;
    for (std::size_t t = 1; t <= T; ++t) {
        const double td = static_cast<double>(t);
        if (is_inv) {
            series[t] = -series[t - 1];
            tolerances[t] = delta / (2.0 * static_cast<double>(T));
        } else {
            // C(−1/2, t) = C(−1/2, t−1)·(−1/2 − t + 1)/t
            series[t] = series[t - 1] * (-0.5 - td + 1.0) / td;
            tolerances[t] = delta / (4.0 * td * td);
        }
    }

    Vector composite(1, series[0]);
    for (std::size_t t = 1; t <= T; ++t) {
        const ChebPoly term = monomial_cheb_approx(static_cast<int>(t), tolerances[t]);
        if (composite.size() < term.coeffs().size()) composite.resize(term.coeffs().size(), 0.0);
        for (std::size_t j = 0; j < term.coeffs().size(); ++j) composite[j] += series[t] * term.coeffs()[j];
    }
    ChebPoly hat({-1.0, 1.0}, std::move(composite));

    const double out_scale = is_inv ? 1.0 / kappa : 1.0 / std::sqrt(kappa);
    ChebPoly result = ChebPoly::interpolate(
        [&](double x) { return out_scale * hat(x / kappa - 1.0); }, {1.0, kappa}, hat.degree());

    return SeriesConstruction{target, T, std::move(series), std::move(tolerances), std::move(hat),
                              std::move(result), out_scale};
}

namespace {

ChebPoly certified_series(const ApproxTarget& target) {
    SeriesConstruction c = build_series(target);
    const std::size_t grid = std::max<std::size_t>(4096, min_grid_size(c.result.degree()));
    const double achieved = sup_error(c.result, target, grid);
    if (!(achieved <= target.error_bound())) throw CertificateError(achieved, target.error_bound());
    return std::move(c.result);
}

} // namespace

ChebPoly inv_sqrt_poly(double kappa, double delta) {
    return certified_series(ApproxTarget::inv_sqrt(kappa, delta));
}

ChebPoly inv_poly(double kappa, double delta) { return certified_series(ApproxTarget::inv(kappa, delta)); }

ChebPoly build_poly(const ApproxTarget& target) {
    if (target.kind == ApproxTarget::Kind::monomial) return monomial_cheb_approx(target.power, target.delta);
    return certified_series(target);
}

std::size_t min_grid_size(std::size_t degree) { return std::max<std::size_t>(1024, 10 * degree); }

double sup_error(const ChebPoly& p, const ApproxTarget& target, std::size_t grid_size) {
    if (grid_size < min_grid_size(p.degree()))
        throw InvalidArgument("grid of " + std::to_string(grid_size) + " points is too coarse for degree " +
                              std::to_string(p.degree()));
    const double mid = 0.5 * (p.interval().lo + p.interval().hi);
    const double half = 0.5 * (p.interval().hi - p.interval().lo);
    const double step = std::numbers::pi / static_cast<double>(grid_size - 1);
    double worst = 0.0;
    for (std::size_t k = 0; k < grid_size; ++k) {
        double x = mid + half * std::cos(step * static_cast<double>(k));
        if (k == 0) x = p.interval().hi;
        if (k + 1 == grid_size) x = p.interval().lo;
        worst = std::max(worst, std::abs(p(x) - target(x)));
    }
    return worst;
}

Certificate certify(const ChebPoly& p, const ApproxTarget& target, std::size_t grid_size) {
    return Certificate{p.degree(), grid_size, sup_error(p, target, grid_size), target.error_bound()};
}

} // namespace tracebounds
