#pragma once

#include "tracebounds/matrix.hpp"

#include <cstddef>
#include <functional>
#include <span>
#include <string>

namespace tracebounds {

struct Interval {
    double lo = -1.0;
    double hi = 1.0;

    friend bool operator==(const Interval&, const Interval&) = default;
};

/// Polynomial Σ c_j·T_j(u) on [a, b], with u = 2(x − a)/(b − a) − 1.
class ChebPoly {
public:
    ChebPoly(Interval interval, Vector coeffs);

    /// Chebyshev interpolant of f at `degree + 1` first-kind Chebyshev nodes of [a, b].
    static ChebPoly interpolate(const std::function<double(double)>& f, Interval interval,
                                std::size_t degree);

    const Interval& interval() const noexcept { return interval_; }
    const Vector& coeffs() const noexcept { return coeffs_; }
    /// Index of the last retained coefficient.
    std::size_t degree() const noexcept { return coeffs_.size() - 1; }

    /// Maps x ∈ [a, b] to u ∈ [−1, 1].
    double to_unit(double x) const noexcept;
    /// Clenshaw evaluation. Points outside [a, b] are evaluated by extrapolation.
    double operator()(double x) const noexcept;
    bool contains(double x) const noexcept { return x >= interval_.lo && x <= interval_.hi; }

    friend bool operator==(const ChebPoly&, const ChebPoly&) = default;

private:
    Interval interval_;
    Vector coeffs_;
};

/// Clenshaw recurrence for Σ c_j·T_j(u).
double clenshaw(std::span<const double> coeffs, double u) noexcept;

/// The scalar function a polynomial is meant to approximate.
struct ApproxTarget {
    enum class Kind { inv_sqrt, inv, monomial };

    Kind kind = Kind::inv;
    double kappa = 2.0; ///< upper end of [1, κ]; unused for monomial
    double delta = 0.1;
    int power = 1; ///< s for monomial

    static ApproxTarget inv_sqrt(double kappa, double delta);
    static ApproxTarget inv(double kappa, double delta);
    static ApproxTarget monomial(int s, double delta);

    /// Throws InvalidArgument when the parameters are outside the admissible ranges.
    void validate() const;
    double operator()(double x) const;
    Interval domain() const;
    /// δ/√κ, δ/κ or δ.
    double error_bound() const;
    std::string name() const;
};

std::string to_string(ApproxTarget::Kind kind);
ApproxTarget::Kind parse_target_kind(const std::string& name);

} // namespace tracebounds
