#include "doctest.h"

#include "tracebounds/errors.hpp"
#include "tracebounds/linalg.hpp"
#include "tracebounds/random.hpp"
#include "tracebounds/stats.hpp"
#include "tracebounds/wishart.hpp"

#include <cmath>

using namespace tracebounds;

namespace {

std::vector<Vector> gaussian_queries(std::size_t n, std::size_t d, RngState rng) {
    const Matrix g = sample_gaussian_matrix(n, d, rng);
    std::vector<Vector> out;
    for (std::size_t i = 0; i < n; ++i) out.emplace_back(g.row(i).begin(), g.row(i).end());
    return out;
}

void check_posterior(const SymMatrix& w, const QueryTranscript& t) {
    const auto p = posterior_decompose(w, t);
    CHECK(max_abs_diff(times_transpose(p.v, p.v), Matrix::identity(w.dim())) <= 1e-10);
    CHECK(block_identity_residual(w, p) <= 1e-8 * w.max_abs());
    CHECK(sym_eigenvalues(w).front() <= sym_eigenvalues(p.wtilde).front() + 1e-10);
}

} // namespace

TEST_SUITE("wishart") {

TEST_CASE("posterior of a diagonal matrix after querying e_1") {
    const double a = 2.5, b = 0.7;
    const Vector diag{a, b};
    const SymMatrix w = SymMatrix::diagonal(diag);
    const auto p = posterior_decompose(w, QueryTranscript::canonical(w, 1));
    CHECK(p.y1(0, 0) == doctest::Approx(std::sqrt(a)));
    CHECK(std::abs(p.y2(0, 0)) <= 1e-15);
    CHECK(p.wtilde(0, 0) == doctest::Approx(b));
}

TEST_CASE("empty transcript reveals nothing") {
    const SymMatrix w = sample_wishart(5, RngState{60, 0});
    const auto p = posterior_decompose(w, QueryTranscript::canonical(w, 0));
    CHECK(max_abs_diff(p.v, Matrix::identity(5)) == 0.0);
    CHECK(max_abs_diff(p.wtilde.matrix(), w.matrix()) <= 1e-15);
}

TEST_CASE("block identity and interlacing with random queries") {
    for (std::size_t t = 0; t < 20; ++t) {
        const SymMatrix w = sample_wishart(12, RngState{61, t});
        check_posterior(w, QueryTranscript::observe(w, gaussian_queries(4, 12, RngState{62, t})));
    }
}

TEST_CASE("interlacing survives adversarial queries") {
    const SymMatrix w = sample_wishart(10, RngState{63, 0});
    const auto eig = sym_eigen(w);
    // Adaptive: query the bottom eigenvectors, the top ones, and a nearly dependent pair.
    std::vector<Vector> bottom{eig.eigvecs.column(0), eig.eigvecs.column(1), eig.eigvecs.column(2)};
    check_posterior(w, QueryTranscript::observe(w, bottom));
    std::vector<Vector> top{eig.eigvecs.column(9), eig.eigvecs.column(8)};
    check_posterior(w, QueryTranscript::observe(w, top));
    Vector v1(10, 1.0), v2(10, 1.0);
    v2[3] += 1e-4;
    check_posterior(w, QueryTranscript::observe(w, {v1, v2}));
    // Responses to the bottom eigenvectors stay small, so W̃ carries the rest.
    const auto p = posterior_decompose(w, QueryTranscript::observe(w, bottom));
    CHECK(sym_eigenvalues(p.wtilde).front() >= eig.eigvals[3] - 1e-10);
}

TEST_CASE("revealed blocks depend only on the transcript") {
    const std::size_t d = 9, n = 3;
    const SymMatrix w = sample_wishart(d, RngState{64, 0});
    const auto queries = gaussian_queries(n, d, RngState{64, 1});
    const auto t1 = QueryTranscript::observe(w, queries);
    const auto blocks = revealed_blocks(t1);

    // Add a PSD perturbation supported on the unqueried directions: responses are unchanged.
    const Matrix m = sample_gaussian_matrix(d - n, d - n, RngState{64, 2});
    const Matrix bump = blocks.complement * times_transpose(m, m) * blocks.complement.transpose();
    const SymMatrix w2 = SymMatrix::symmetrized(w.matrix() + bump);
    const auto t2 = QueryTranscript::observe(w2, queries);
    for (std::size_t i = 0; i < n; ++i)
        for (std::size_t j = 0; j < d; ++j) CHECK(std::abs(t1.responses[i][j] - t2.responses[i][j]) <= 1e-12);

    const auto p1 = posterior_decompose(w, t1);
    const auto p2 = posterior_decompose(w2, t2);
    CHECK(max_abs_diff(p1.y1, p2.y1) <= 1e-10);
    CHECK(max_abs_diff(p1.y2, p2.y2) <= 1e-10);
    CHECK(max_abs_diff(p1.v, p2.v) <= 1e-10);
    CHECK(max_abs_diff(p1.wtilde.matrix(), p2.wtilde.matrix()) > 1e-3);
}

TEST_CASE("transcript errors") {
    const SymMatrix w = sample_wishart(4, RngState{65, 0});
    Vector v(4, 1.0);
    CHECK_THROWS_AS(posterior_decompose(w, QueryTranscript::observe(w, {v, v})), RankDeficient);
    CHECK_THROWS_AS(posterior_decompose(w, QueryTranscript::canonical(w, 4)), InvalidArgument);
    CHECK_THROWS_AS(QueryTranscript::observe(w, {Vector(3, 1.0)}), InvalidArgument);
    const Vector diag{0.0, 1.0, 2.0};
    const SymMatrix singular = SymMatrix::diagonal(diag);
    CHECK_THROWS_AS(posterior_decompose(singular, QueryTranscript::canonical(singular, 1)), NotPositiveDefinite);
}

TEST_CASE("posterior distribution test") {
    const auto r = posterior_distribution_test(12, 4, 2000, RngState{42, 0});
    CHECK(r.trace_test.p_value > 0.01);
    CHECK(r.lambda_min_test.p_value > 0.01);
    CHECK(r.negative_control.p_value < 0.01);
    for (bool ok : r.interlacing_ok) CHECK(ok);
    CHECK_THROWS_AS(posterior_distribution_test(12, 12, 2000, RngState{42, 0}), InvalidArgument);
    CHECK_THROWS_AS(posterior_distribution_test(12, 4, 999, RngState{42, 0}), InvalidArgument);
}

TEST_CASE("posterior test with no queries compares a law against itself") {
    int accepted = 0;
    for (std::uint64_t s = 0; s < 20; ++s)
        if (posterior_distribution_test(5, 0, 1000, RngState{66, s}).trace_test.p_value > 0.01) ++accepted;
    CHECK(accepted >= 19);
}

TEST_CASE("eig_cdf_experiment for d = 1 matches the normal CDF") {
    const auto rows = eig_cdf_experiment(1, 20000, {0.0, 0.25}, RngState{67, 0});
    CHECK(rows[0].hits == 0);
    const double expected = 2.0 * normal_cdf(0.5) - 1.0;
    CHECK(expected == doctest::Approx(0.3829).epsilon(1e-3));
    CHECK(std::abs(rows[1].probability - expected) <= 3.0 * binomial_std_error(expected, 20000));
}

TEST_CASE("eig_cdf_experiment for d = 16") {
    const auto rows = eig_cdf_experiment(16, 20000, {0.01, 0.04, 0.16}, RngState{7, 0});
    for (std::size_t i = 0; i + 1 < rows.size(); ++i) {
        const double ratio = rows[i + 1].probability / rows[i].probability;
        CHECK(ratio >= 1.4);
        CHECK(ratio <= 2.8);
    }
    CHECK(rows[0].threshold == doctest::Approx(0.01 / 256.0));
}

TEST_CASE("lambda_max tail") {
    const auto rows = lambda_max_tail_experiment(16, 10000, {0.0, 0.5, 1.0}, RngState{68, 0});
    CHECK_FALSE(rows[0].asserted);
    CHECK(rows[0].threshold == doctest::Approx(4.0));
    CHECK(rows[2].hits == 0);
    for (const auto& r : rows) CHECK(r.within_bound);
    const auto small = lambda_max_tail_experiment(4, 10000, {0.5}, RngState{68, 1});
    CHECK(small[0].probability > rows[1].probability);
    CHECK_THROWS_AS(lambda_max_tail_experiment(16, 9999, {0.5}, RngState{68, 0}), InvalidArgument);
}

TEST_CASE("inverse trace for d = 2 matches direct inversion") {
    const RngState rng{69, 0};
    const auto r = inv_trace_tail_experiment(2, 1000, 1.0, rng);
    for (std::size_t t = 0; t < r.trials; ++t) {
        const SymMatrix w = sample_wishart(2, rng.derive(t).derive(0));
        // ac − b² with an error-free product correction.
        const double bb = w(0, 1) * w(0, 1);
        const double det = std::fma(w(0, 0), w(1, 1), -bb) - std::fma(w(0, 1), w(0, 1), -bb);
        const double direct = (w(0, 0) + w(1, 1)) / det;
        // Eigenvalues carry absolute error O(ε·λ_max), so 1/λ_min loses κ(W)·ε relative accuracy.
        const double cond = r.records[t].lambda_max / r.records[t].lambda_min;
        CHECK(std::abs(r.records[t].trace - direct) <= (1e-10 + 64.0 * 2.2e-16 * cond) * std::abs(direct));
    }
}

TEST_CASE("inverse trace medians collapse across d") {
    double lo = INFINITY, hi = 0.0;
    for (std::size_t d : {8, 16, 32}) {
        const auto r = inv_trace_tail_experiment(d, 2000, 1.0, RngState{70, d});
        CHECK(r.q50 <= r.q90);
        CHECK(r.q90 <= r.q99);
        CHECK(r.index_profile_q99.size() == d);
        lo = std::min(lo, r.q50);
        hi = std::max(hi, r.q50);
    }
    CHECK(hi / lo <= 4.0);

    const double a = inv_trace_tail_experiment(16, 2000, 0.75, RngState{71, 0}).q50;
    const double b = inv_trace_tail_experiment(16, 2000, 0.75, RngState{71, 1}).q50;
    CHECK(std::max(a, b) / std::min(a, b) <= 1.5);

    CHECK_THROWS_AS(inv_trace_tail_experiment(8, 1000, 0.5, RngState{}), InvalidArgument);
    CHECK_THROWS_AS(inv_trace_tail_experiment(1, 1000, 1.0, RngState{}), InvalidArgument);
    CHECK_THROWS_AS(inv_trace_tail_experiment(8, 999, 1.0, RngState{}), InvalidArgument);
}

TEST_CASE("metered oracle enforces its budget") {
    const SymMatrix w = SymMatrix::identity(3);
    const MeteredOracle oracle(w, 2);
    const Vector x{1.0, 2.0, 3.0};
    CHECK(oracle.apply(x) == x);
    oracle.apply(x);
    CHECK(oracle.used() == 2);
    CHECK_THROWS_AS(oracle.apply(x), BudgetExceeded);
    CHECK(oracle.used() == 2);
}

TEST_CASE("exact recovery wins the game") {
    const auto r = query_game(16, 1.0, 2.0, GameAlgorithm::exact_recovery(), 16, 50, RngState{72, 0});
    CHECK(r.success_rate() == 1.0);
    CHECK(r.violations == 0);
    for (const auto& t : r.records) {
        CHECK(t.queries_used == 16);
        CHECK(std::abs(t.estimate - t.true_trace) <= 1e-8 * t.true_trace);
    }
}

TEST_CASE("constant guesses fail often") {
    for (double c : {100.0, 500.0, 1000.0, 2000.0, 4000.0, 8000.0, 16000.0, 50000.0}) {
        const auto r = query_game(32, 1.0, 2.0, GameAlgorithm::constant_guess(c), 1, 500, RngState{73, 0});
        CHECK(r.success_rate() <= 0.9);
        for (const auto& t : r.records) {
            CHECK(t.queries_used == 0);
            CHECK(t.success == (t.estimate >= t.true_trace / 2.0 && t.estimate <= 2.0 * t.true_trace));
        }
    }
}

TEST_CASE("hutchinson improves with budget") {
    const auto small = query_game(64, 1.0, 2.0, GameAlgorithm::hutchinson_for_budget(64, 8), 8, 200, RngState{5, 0});
    const auto large =
        query_game(64, 1.0, 2.0, GameAlgorithm::hutchinson_for_budget(64, 256), 256, 200, RngState{5, 0});
    CHECK(large.success_rate() > small.success_rate());
    CHECK(small.violations + large.violations == 0);
    for (const auto& t : large.records) CHECK(t.queries_used <= 256);
}

TEST_CASE("game algorithm parameters") {
    const auto a = GameAlgorithm::hutchinson_for_budget(64, 256);
    CHECK(a.steps == 64);
    CHECK(a.probes == 4);
    const auto b = GameAlgorithm::hutchinson_for_budget(64, 8);
    CHECK(b.steps == 8);
    CHECK(b.probes == 1);
    CHECK_THROWS_AS(query_game(16, 1.0, 2.0, GameAlgorithm::hutchinson_krylov(3, 6), 16, 5, RngState{}),
                    InvalidArgument);
    CHECK_THROWS_AS(query_game(16, 1.0, 2.0, GameAlgorithm::exact_recovery(), 15, 5, RngState{}), InvalidArgument);
    CHECK_THROWS_AS(query_game(16, 0.5, 2.0, GameAlgorithm::exact_recovery(), 16, 5, RngState{}), InvalidArgument);
    CHECK_THROWS_AS(query_game(16, 1.0, 1.0, GameAlgorithm::exact_recovery(), 16, 5, RngState{}), InvalidArgument);
}

} // TEST_SUITE
