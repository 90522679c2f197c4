#include "tracebounds/cheb.hpp"

#include "tracebounds/errors.hpp"

#include <cmath>
#include <numbers>

namespace tracebounds {

ChebPoly::ChebPoly(Interval interval, Vector coeffs) : interval_(interval), coeffs_(std::move(coeffs)) {
    if (!(interval_.lo < interval_.hi)) throw InvalidArgument("ChebPoly interval needs a < b");
    if (coeffs_.empty()) throw InvalidArgument("ChebPoly needs at least one coefficient");
    while (coeffs_.size() > 1 && std::abs(coeffs_.back()) <= 1e-300) coeffs_.pop_back();
}

ChebPoly ChebPoly::interpolate(const std::function<double(double)>& f, Interval interval, std::size_t degree) {
    const std::size_t n = degree + 1;
    const double mid = 0.5 * (interval.lo + interval.hi);
    const double half = 0.5 * (interval.hi - interval.lo);

    // cos(π·m/(2n)) for m in [0, 4n); node k sits at angle π(2k+1)/(2n).
    Vector table(4 * n);
    for (std::size_t m = 0; m < 4 * n; ++m)
        table[m] = std::cos(std::numbers::pi * static_cast<double>(m) / static_cast<double>(2 * n));

    Vector values(n);
    for (std::size_t k = 0; k < n; ++k) values[k] = f(mid + half * table[2 * k + 1]);

    Vector coeffs(n, 0.0);
    for (std::size_t j = 0; j < n; ++j) {
        double s = 0.0;
        for (std::size_t k = 0; k < n; ++k) s += values[k] * table[(j * (2 * k + 1)) % (4 * n)];
        coeffs[j] = 2.0 * s / static_cast<double>(n);
    }
    coeffs[0] *= 0.5;
    return ChebPoly(interval, std::move(coeffs));
}

double ChebPoly::to_unit(double x) const noexcept {
    return (2.0 * x - (interval_.lo + interval_.hi)) / (interval_.hi - interval_.lo);
}

double ChebPoly::operator()(double x) const noexcept { return clenshaw(coeffs_, to_unit(x)); }

double clenshaw(std::span<const double> coeffs, double u) noexcept {
    double b1 = 0.0;
    double b2 = 0.0;
    for (std::size_t j = coeffs.size(); j-- > 1;) {
        const double b0 = 2.0 * u * b1 - b2 + coeffs[j];
        b2 = b1;
        b1 = b0;
    }
    return u * b1 - b2 + coeffs[0];
}

ApproxTarget ApproxTarget::inv_sqrt(double kappa, double delta) {
    ApproxTarget t{Kind::inv_sqrt, kappa, delta, 1};
    t.validate();
    return t;
}

ApproxTarget ApproxTarget::inv(double kappa, double delta) {
    ApproxTarget t{Kind::inv, kappa, delta, 1};
    t.validate();
    return t;
}

ApproxTarget ApproxTarget::monomial(int s, double delta) {
    ApproxTarget t{Kind::monomial, 2.0, delta, s};
    t.validate();
    return t;
}

void ApproxTarget::validate() const {
    if (kind == Kind::monomial) {
        if (power < 1) throw InvalidArgument("monomial power s must be >= 1");
        if (!(delta > 0.0 && delta < 1.0)) throw InvalidArgument("monomial delta must lie in (0, 1)");
        return;
    }
    if (!(kappa >= 2.0) || !std::isfinite(kappa)) throw InvalidArgument("kappa must be >= 2");
    if (!(delta > 0.0 && delta < 0.5)) throw InvalidArgument("delta must lie in (0, 1/2)");
}

double ApproxTarget::operator()(double x) const {
    switch (kind) {
    case Kind::inv_sqrt: return 1.0 / std::sqrt(x);
    case Kind::inv: return 1.0 / x;
    case Kind::monomial: return std::pow(x, power);
    }
    return 0.0;
}

Interval ApproxTarget::domain() const {
    if (kind == Kind::monomial) return {-1.0, 1.0};
    return {1.0, kappa};
}

double ApproxTarget::error_bound() const {
    switch (kind) {
    case Kind::inv_sqrt: return delta / std::sqrt(kappa);
    case Kind::inv: return delta / kappa;
    case Kind::monomial: return delta;
    }
    return 0.0;
}

std::string ApproxTarget::name() const {
    if (kind == Kind::monomial) return "monomial(" + std::to_string(power) + ")";
    return to_string(kind);
}

std::string to_string(ApproxTarget::Kind kind) {
    switch (kind) {
    case ApproxTarget::Kind::inv_sqrt: return "inv_sqrt";
    case ApproxTarget::Kind::inv: return "inv";
    case ApproxTarget::Kind::monomial: return "monomial";
    }
    return "unknown";
}

ApproxTarget::Kind parse_target_kind(const std::string& name) {
    if (name == "inv_sqrt" || name == "invsqrt") return ApproxTarget::Kind::inv_sqrt;
    if (name == "inv") return ApproxTarget::Kind::inv;
    if (name == "monomial") return ApproxTarget::Kind::monomial;
    throw InvalidArgument("unknown approximation target '" + name + "'");
}

} // namespace tracebounds
