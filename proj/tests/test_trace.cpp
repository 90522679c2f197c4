#include "doctest.h"

#include "tracebounds/errors.hpp"
#include "tracebounds/linalg.hpp"
#include "tracebounds/poly_approx.hpp"
#include "tracebounds/random.hpp"
#include "tracebounds/trace.hpp"

#include <cmath>
#include <cstdlib>
#include <numeric>

using namespace tracebounds;

namespace {

std::vector<Vector> all_sign_vectors(std::size_t d) {
    std::vector<Vector> out;
    for (std::size_t mask = 0; mask < (std::size_t{1} << d); ++mask) {
        Vector z(d);
        for (std::size_t k = 0; k < d; ++k) z[k] = (mask >> k) & 1 ? -1.0 : 1.0;
        out.push_back(std::move(z));
    }
    return out;
}

double trace_of(const SymMatrix& a, double (*f)(double)) {
    double t = 0.0;
    for (double l : sym_eigenvalues(a)) t += f(l);
    return t;
}

} // namespace

TEST_SUITE("trace") {

TEST_CASE("identity with Rademacher probes is exact") {
    const ProbeSpec probes{ProbeKind::rademacher, 16, RngState{1, 0}};
    const auto est = hutchinson(SymMatrix::identity(7), ExactBackend{MatrixFunction::identity()}, probes);
    CHECK(est.value == 7.0);
    CHECK(est.sample_stddev == 0.0);
    CHECK(est.mvp_count == 0);
    CHECK(est.quadratic_forms.size() == 16);
}

TEST_CASE("all four sign vectors give the trace of a 2x2") {
    const SymMatrix a({{2.0, 1.0}, {1.0, 3.0}});
    const auto est = hutchinson(a, ExactBackend{MatrixFunction::identity()}, all_sign_vectors(2));
    CHECK(est.value == doctest::Approx(5.0).epsilon(1e-15));
}

TEST_CASE("exhaustive averaging equals the backend trace") {
    const ChebPoly poly = inv_sqrt_poly(8.0, 0.1);
    for (std::size_t i = 0; i < 12; ++i) {
        const std::size_t d = 1 + i % 4;
        const SymMatrix a = random_spd(d, 1.0, 8.0, RngState{40, i});
        const auto signs = all_sign_vectors(d);
        const Backend backends[] = {ExactBackend{MatrixFunction::inv_sqrt()},
                                    LanczosBackend{MatrixFunction::inv_sqrt(), d}, ChebBackend{poly}};
        for (const auto& b : backends)
            CHECK(std::abs(hutchinson(a, b, signs).value - backend_trace(a, b)) <= 1e-10);
    }
}

TEST_CASE("cheb backend on diag(1,2,4)") {
    const Vector diag{1.0, 2.0, 4.0};
    const ProbeSpec probes{ProbeKind::rademacher, 10000, RngState{41, 0}};
    const auto est = hutchinson(SymMatrix::diagonal(diag), ChebBackend{inv_poly(4.0, 0.1)}, probes);
    CHECK(std::abs(est.value - 1.75) <= 3.0 * est.sample_stddev / 100.0 + 3.0 * 0.025);
}

TEST_CASE("estimator ledger and summary statistics") {
    const SymMatrix a = random_spd(30, 1.0, 9.0, RngState{42, 0});
    const ProbeSpec probes{ProbeKind::gaussian, 25, RngState{42, 1}};
    const auto lz = hutchinson(a, LanczosBackend{MatrixFunction::inv(), 7}, probes);
    CHECK(lz.mvp_count == 25 * 7);
    const ChebPoly p = inv_poly(9.0, 0.1);
    const auto ch = hutchinson(a, ChebBackend{p}, probes);
    CHECK(ch.mvp_count == 25 * p.degree());
    for (const auto* e : {&lz, &ch}) {
        const double mean = std::accumulate(e->quadratic_forms.begin(), e->quadratic_forms.end(), 0.0) / 25.0;
        CHECK(e->value == doctest::Approx(mean).epsilon(1e-14));
        double ss = 0.0;
        for (double q : e->quadratic_forms) ss += (q - mean) * (q - mean);
        CHECK(e->sample_stddev == doctest::Approx(std::sqrt(ss / 24.0)).epsilon(1e-12));
    }
}

TEST_CASE("probe s depends only on its stream") {
    const ProbeSpec probes{ProbeKind::rademacher, 5, RngState{43, 0}};
    const Vector z3 = probes.draw(3, 10);
    CHECK(z3 == ProbeSpec{ProbeKind::rademacher, 9, RngState{43, 0}}.draw(3, 10));
    for (double v : z3) CHECK(std::abs(v) == 1.0);

    const SymMatrix a = random_spd(20, 1.0, 4.0, RngState{43, 1});
    const ProbeSpec many{ProbeKind::gaussian, 40, RngState{43, 2}};
    setenv("TRACEBOUNDS_THREADS", "1", 1);
    const auto serial = hutchinson(a, LanczosBackend{MatrixFunction::inv(), 5}, many);
    setenv("TRACEBOUNDS_THREADS", "3", 1);
    const auto threaded = hutchinson(a, LanczosBackend{MatrixFunction::inv(), 5}, many);
    unsetenv("TRACEBOUNDS_THREADS");
    CHECK(serial.quadratic_forms == threaded.quadratic_forms);
}

TEST_CASE("estimate_tr_f on the identity") {
    const auto target = ApproxTarget::inv(2.0, 0.1);
    const auto est = estimate_tr_f(SymMatrix::identity(10), target, 12, RngState{44, 0});
    CHECK(std::abs(est.value - 10.0) <= 0.1 / 2.0 * 10.0);
    REQUIRE(est.target.has_value());
    CHECK(est.mvp_count == 12 * est.degree);
    CHECK(est.degree == inv_poly(2.0, 0.1).degree());
}

TEST_CASE("estimate_tr_f for the inverse square root") {
    const SymMatrix a = random_spd(64, 1.0, 16.0, RngState{45, 0});
    const auto target = ApproxTarget::inv_sqrt(16.0, 0.1);
    const auto est = estimate_tr_f(a, target, 256, RngState{45, 1});
    const double truth = trace_of(a, [](double l) { return 1.0 / std::sqrt(l); });
    CHECK(std::abs(est.value - truth) <= 3.0 * est.sample_stddev / 16.0 + bias_bound(target, 64));
}

TEST_CASE("total error splits into statistical error and bias") {
    for (std::uint64_t seed = 0; seed < 5; ++seed) {
        const SymMatrix a = random_spd(32, 1.0, 8.0, RngState{46, seed});
        const auto target = ApproxTarget::inv(8.0, 0.2);
        const ChebPoly p = build_poly(target);
        const auto est = hutchinson(a, ChebBackend{p}, ProbeSpec{ProbeKind::rademacher, 64, RngState{47, seed}});
        const double truth = trace_of(a, [](double l) { return 1.0 / l; });
        const double poly_trace = backend_trace(a, ChebBackend{p});
        CHECK(std::abs(poly_trace - truth) <= bias_bound(target, 32));
        CHECK(std::abs(est.value - truth) <= std::abs(est.value - poly_trace) + bias_bound(target, 32) + 1e-12);
    }
}

TEST_CASE("standard error scales as one over root N") {
    const SymMatrix a = random_spd(48, 1.0, 16.0, RngState{48, 0});
    std::vector<double> se;
    for (std::size_t n : {64, 256, 1024}) {
        const auto e = hutchinson(a, ExactBackend{MatrixFunction::inv()},
                                  ProbeSpec{ProbeKind::rademacher, n, RngState{48, n}});
        se.push_back(e.sample_stddev / std::sqrt(static_cast<double>(n)));
    }
    for (std::size_t i = 0; i + 1 < se.size(); ++i) {
        const double ratio = se[i] / se[i + 1];
        CHECK(ratio >= 2.0 / 1.3);
        CHECK(ratio <= 2.0 * 1.3);
    }
}

TEST_CASE("bias_bound examples") {
    CHECK(bias_bound(ApproxTarget::inv(4.0, 0.1), 10) == doctest::Approx(0.25));
    CHECK(bias_bound(ApproxTarget::inv_sqrt(16.0, 0.4), 1) == doctest::Approx(0.1));
    CHECK_THROWS_AS(bias_bound(ApproxTarget::monomial(3, 0.1), 5), InvalidArgument);
}

TEST_CASE("backend errors propagate") {
    const Vector diag{-1.0, 2.0};
    const ProbeSpec probes{ProbeKind::rademacher, 4, RngState{49, 0}};
    CHECK_THROWS_AS(hutchinson(SymMatrix::diagonal(diag), ExactBackend{MatrixFunction::inv_sqrt()}, probes),
                    SpectrumError);
    CHECK_THROWS_AS(parse_probe_kind("sobol"), InvalidArgument);
    CHECK(describe(LanczosBackend{MatrixFunction::inv(), 3}).find("lanczos") != std::string::npos);
}

} // TEST_SUITE
