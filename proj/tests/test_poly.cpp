#include "doctest.h"

#include "tracebounds/errors.hpp"
#include "tracebounds/poly_approx.hpp"
#include "tracebounds/random.hpp"

#include <cmath>

using namespace tracebounds;

namespace {

// Power-basis coefficients of Σ c_j T_j(u).
Vector chebyshev_to_power(const Vector& c) {
    const std::size_t n = c.size();
    Vector out(n, 0.0);
    Vector prev(n, 0.0), cur(n, 0.0);
    prev[0] = 1.0; // T_0
    if (n > 1) cur[1] = 1.0; // T_1
    out[0] += c[0];
    if (n > 1)
        for (std::size_t k = 0; k < n; ++k) out[k] += c[1] * cur[k];
    for (std::size_t j = 2; j < n; ++j) {
        Vector next(n, 0.0);
        for (std::size_t k = 0; k + 1 < n; ++k) next[k + 1] += 2.0 * cur[k];
        for (std::size_t k = 0; k < n; ++k) next[k] -= prev[k];
        for (std::size_t k = 0; k < n; ++k) out[k] += c[j] * next[k];
        prev = cur;
        cur = next;
    }
    return out;
}

double horner(const Vector& a, double u) {
    double v = 0.0;
    for (std::size_t k = a.size(); k-- > 0;) v = v * u + a[k];
    return v;
}

std::size_t brute_force_truncation(double kappa, double delta_half) {
    for (std::size_t t = 0;; ++t)
        if (kappa * std::pow(1.0 - 1.0 / kappa, static_cast<double>(t + 1)) <= delta_half) return t;
}

} // namespace

TEST_SUITE("poly_approx") {

TEST_CASE("ChebPoly validation and trimming") {
    CHECK_THROWS_AS(ChebPoly({1.0, 1.0}, {1.0}), InvalidArgument);
    CHECK_THROWS_AS(ChebPoly({-1.0, 1.0}, {}), InvalidArgument);
    const ChebPoly p({-1.0, 1.0}, {1.0, 2.0, 0.0, 1e-301});
    CHECK(p.degree() == 1);
}

TEST_CASE("Chebyshev evaluation examples") {
    const ChebPoly t3({-1.0, 1.0}, {0.0, 0.0, 0.0, 1.0});
    CHECK(t3(0.5) == doctest::Approx(-1.0).epsilon(1e-15));
    const ChebPoly lin({0.0, 2.0}, {0.0, 1.0});
    CHECK(lin(1.5) == doctest::Approx(0.5).epsilon(1e-15));
}

TEST_CASE("Clenshaw matches the power-basis conversion oracle") {
    Rng rng(RngState{6, 0});
    Vector c(7);
    for (auto& v : c) v = rng.normal();
    const ChebPoly p({-2.0, 3.0}, c);
    const Vector power = chebyshev_to_power(c);
    for (int i = 0; i <= 50; ++i) {
        const double x = -2.0 + 5.0 * i / 50.0;
        CHECK(std::abs(p(x) - horner(power, p.to_unit(x))) <= 1e-12);
    }
}

TEST_CASE("interpolation reproduces polynomials") {
    const ChebPoly p = ChebPoly::interpolate([](double x) { return 3.0 * x * x * x - x + 2.0; }, {1.0, 4.0}, 3);
    for (double x : {1.0, 1.7, 2.5, 4.0}) CHECK(p(x) == doctest::Approx(3.0 * x * x * x - x + 2.0).epsilon(1e-13));
}

TEST_CASE("monomial_cheb_approx examples") {
    const ChebPoly sq = monomial_cheb_approx(2, 0.1);
    REQUIRE(sq.coeffs().size() == 3);
    CHECK(sq.coeffs()[0] == doctest::Approx(0.5));
    CHECK(std::abs(sq.coeffs()[1]) <= 1e-15);
    CHECK(sq.coeffs()[2] == doctest::Approx(0.5));

    for (double delta : {0.5, 0.01}) {
        const ChebPoly x1 = monomial_cheb_approx(1, delta);
        REQUIRE(x1.coeffs().size() == 2);
        CHECK(x1.coeffs()[0] == 0.0);
        CHECK(x1.coeffs()[1] == 1.0);
    }

    CHECK(std::ceil(std::sqrt(16.0 * std::log(200.0))) == 10.0);
    CHECK(monomial_degree_cap(8, 0.01) == 8);
    const ChebPoly x8 = monomial_cheb_approx(8, 0.01);
    CHECK(x8.degree() == 8);
    CHECK(sup_error(x8, ApproxTarget::monomial(8, 0.01), 2048) <= 1e-14);

    CHECK(monomial_degree_cap(50, 0.1) == 18);
    const ChebPoly x50 = monomial_cheb_approx(50, 0.1);
    CHECK(x50.degree() <= 18);
    CHECK(sup_error(x50, ApproxTarget::monomial(50, 0.1), 8192) <= 0.1);
}

TEST_CASE("monomial compression across powers") {
    std::vector<int> powers{25, 50};
    for (int s = 1; s <= 12; ++s) powers.push_back(s);
    for (int s : powers) {
        for (double delta : {0.1, 0.01}) {
            const ChebPoly p = monomial_cheb_approx(s, delta);
            const double cap = std::ceil(std::sqrt(2.0 * s * std::log(2.0 / delta)));
            CHECK(static_cast<double>(p.degree()) <= std::min<double>(s, cap));
            CHECK(sup_error(p, ApproxTarget::monomial(s, delta), 4096) <= delta);
        }
    }
}

TEST_CASE("taylor_truncation_length examples") {
    CHECK(taylor_truncation_length(2.0, 0.25) == 2);
    CHECK(taylor_truncation_length(2.0, 2.0) == 0);
    CHECK(taylor_truncation_length(16.0, 0.05) == brute_force_truncation(16.0, 0.05));
    for (double kappa : {2.0, 3.5, 16.0, 100.0}) {
        for (double dh : {0.9, 0.2, 0.01, 1e-5}) {
            const std::size_t t = taylor_truncation_length(kappa, dh);
            CHECK(t == brute_force_truncation(kappa, dh));
            CHECK(static_cast<double>(t) <= std::ceil(kappa * std::log(2.0 * kappa / dh)) + 1.0);
        }
    }
}

TEST_CASE("inv_sqrt_poly examples") {
    CHECK(std::abs(inv_sqrt_poly(2.0, 0.4)(1.0) - 1.0) <= 0.4 / std::sqrt(2.0));
    CHECK(std::abs(inv_sqrt_poly(4.0, 0.1)(4.0) - 0.5) <= 0.05);
    const ChebPoly p16 = inv_sqrt_poly(16.0, 0.1);
    CHECK(sup_error(p16, ApproxTarget::inv_sqrt(16.0, 0.1), 4096) <= 0.025);
    const ChebPoly p64 = inv_sqrt_poly(64.0, 0.1);
    CHECK(static_cast<double>(p64.degree()) <= 2.0 * 1.6 * static_cast<double>(p16.degree()));
}

TEST_CASE("inv_poly examples") {
    CHECK(std::abs(inv_poly(2.0, 0.4)(1.0) - 1.0) <= 0.2);
    CHECK(std::abs(inv_poly(4.0, 0.1)(2.0) - 0.5) <= 0.025);
    const ChebPoly p = inv_poly(64.0, 0.1);
    CHECK(static_cast<double>(p.degree()) <= kDegreeLawConstant * 8.0 * std::log(640.0));
    CHECK(sup_error(p, ApproxTarget::inv(64.0, 0.1), 4096) <= 0.1 / 64.0);
}

TEST_CASE("targets validate their parameters") {
    CHECK_THROWS_AS(ApproxTarget::inv_sqrt(2.0, 0.6).validate(), InvalidArgument);
    CHECK_THROWS_AS(ApproxTarget::inv(1.5, 0.1).validate(), InvalidArgument);
    CHECK_THROWS_AS(ApproxTarget::inv(4.0, 0.0).validate(), InvalidArgument);
    CHECK_THROWS_AS(ApproxTarget::monomial(0, 0.1).validate(), InvalidArgument);
    CHECK_NOTHROW(ApproxTarget::monomial(3, 0.9).validate());
    CHECK_THROWS_AS(inv_poly(4.0, 0.5), InvalidArgument);
}

TEST_CASE("sup_error examples") {
    CHECK(sup_error(monomial_cheb_approx(2, 0.1), ApproxTarget::monomial(2, 0.1), 1024) <= 1e-14);
    const ChebPoly zero({1.0, 2.0}, {0.0});
    CHECK(sup_error(zero, ApproxTarget::inv(2.0, 0.1), 1024) == doctest::Approx(1.0));
    CHECK(sup_error(inv_sqrt_poly(16.0, 0.1), ApproxTarget::inv_sqrt(16.0, 0.1), 4096) <= 0.025);
    const ChebPoly big = inv_poly(64.0, 0.01);
    CHECK_THROWS_AS(sup_error(big, ApproxTarget::inv(64.0, 0.01), 1000), InvalidArgument);
    CHECK(min_grid_size(big.degree()) == std::max<std::size_t>(1024, 10 * big.degree()));
}

TEST_CASE("certificates over the parameter lattice") {
    for (double kappa : {2.0, 4.0, 16.0, 64.0}) {
        for (double delta : {0.4, 0.1, 0.01}) {
            const Certificate a = certify(inv_sqrt_poly(kappa, delta), ApproxTarget::inv_sqrt(kappa, delta), 4096);
            CHECK(a.passed());
            CHECK(a.bound == doctest::Approx(delta / std::sqrt(kappa)));
            const Certificate b = certify(inv_poly(kappa, delta), ApproxTarget::inv(kappa, delta), 4096);
            CHECK(b.passed());
            CHECK(b.bound == doctest::Approx(delta / kappa));
        }
    }
}

TEST_CASE("degree law") {
    for (double kappa : {4.0, 16.0, 64.0, 256.0}) {
        const double scale = std::sqrt(kappa) * std::log(kappa / 0.1);
        const double r = static_cast<double>(inv_sqrt_poly(kappa, 0.1).degree()) / scale;
        CHECK(r >= 0.05);
        CHECK(r <= 10.0);
    }
    for (double kappa : {2.0, 4.0, 16.0, 64.0, 256.0}) {
        for (double delta : {0.4, 0.1, 0.01}) {
            const double scale = kDegreeLawConstant * std::sqrt(kappa) * std::log(kappa / delta);
            CHECK(static_cast<double>(inv_sqrt_poly(kappa, delta).degree()) <= scale);
            CHECK(static_cast<double>(inv_poly(kappa, delta).degree()) <= scale);
        }
    }
}

TEST_CASE("series construction follows the stated schedules") {
    const SeriesConstruction s = build_series(ApproxTarget::inv_sqrt(16.0, 0.1));
    CHECK(s.truncation == taylor_truncation_length(16.0, 0.05));
    REQUIRE(s.series_coeffs.size() == s.truncation + 1);
    CHECK(s.series_coeffs[0] == 1.0);
    CHECK(s.series_coeffs[1] == doctest::Approx(-0.5));
    CHECK(s.series_coeffs[2] == doctest::Approx(0.375));
    for (std::size_t t = 1; t <= s.truncation; ++t)
        CHECK(s.term_tolerances[t] == doctest::Approx(0.1 / (4.0 * t * t)));

    const SeriesConstruction g = build_series(ApproxTarget::inv(16.0, 0.1));
    for (std::size_t t = 0; t <= g.truncation; ++t) CHECK(g.series_coeffs[t] == (t % 2 == 0 ? 1.0 : -1.0));
    for (std::size_t t = 1; t <= g.truncation; ++t)
        CHECK(g.term_tolerances[t] == doctest::Approx(0.1 / (2.0 * static_cast<double>(g.truncation))));
    CHECK(g.output_scale == doctest::Approx(1.0 / 16.0));
}

TEST_CASE("triangle-inequality audit of the composite") {
    for (const ApproxTarget target : {ApproxTarget::inv_sqrt(16.0, 0.1), ApproxTarget::inv(16.0, 0.1)}) {
        const SeriesConstruction s = build_series(target);
        const double expo = target.kind == ApproxTarget::Kind::inv_sqrt ? -0.5 : -1.0;

        std::vector<ChebPoly> terms;
        double term_budget = 0.0;
        for (std::size_t t = 1; t <= s.truncation; ++t) {
            const int power = static_cast<int>(t);
            const ChebPoly pt = monomial_cheb_approx(power, s.term_tolerances[t]);
            const double err = sup_error(pt, ApproxTarget::monomial(power, s.term_tolerances[t]), 4096);
            CHECK(err <= s.term_tolerances[t]);
            term_budget += std::abs(s.series_coeffs[t]) * err;
            terms.push_back(pt);
        }

        // y = x/κ − 1 ranges over [1/κ − 1, 0] for x in [1, κ].
        double total = 0.0, truncation = 0.0;
        const int n = 4096;
        for (int i = 0; i <= n; ++i) {
            const double y = (1.0 / 16.0 - 1.0) * (0.5 + 0.5 * std::cos(M_PI * i / n));
            const double h = std::pow(1.0 + y, expo);
            double taylor = 0.0, yt = 1.0, composite = s.series_coeffs[0];
            for (std::size_t t = 0; t <= s.truncation; ++t) {
                taylor += s.series_coeffs[t] * yt;
                yt *= y;
                if (t > 0) composite += s.series_coeffs[t] * terms[t - 1](y);
            }
            CHECK(std::abs(composite - s.composite(y)) <= 1e-10);
            total = std::max(total, std::abs(s.composite(y) - h));
            truncation = std::max(truncation, std::abs(taylor - h));
        }
        CHECK(truncation <= target.delta / 2.0 + 1e-12);
        CHECK(total <= truncation + term_budget + 1e-12);
    }
}

} // TEST_SUITE
