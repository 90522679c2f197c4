#include "tracebounds/verify.hpp"

#include "tracebounds/cli.hpp"
#include "tracebounds/errors.hpp"
#include "tracebounds/format.hpp"
#include "tracebounds/linalg.hpp"
#include "tracebounds/poly_approx.hpp"
#include "tracebounds/random.hpp"
#include "tracebounds/stats.hpp"
#include "tracebounds/trace.hpp"
#include "tracebounds/wishart.hpp"

#include <algorithm>
#include <chrono>
#include <cmath>
#include <cstdio>
#include <cstdlib>
#include <optional>
#include <sstream>

namespace tracebounds {

namespace {

bool full(VerifyScale s) { return s == VerifyScale::full; }

std::string fmt(double v) {
    char buf[32];
    std::snprintf(buf, sizeof buf, "%.4g", v);
    return buf;
}

CheckOutcome certificates(ApproxTarget (*make)(double, double), ChebPoly (*build)(double, double)) {
    std::ostringstream detail;
    bool ok = true;
    double worst_ratio = 0.0;
    for (double kappa : {2.0, 4.0, 16.0, 64.0}) {
        for (double delta : {0.4, 0.1, 0.01}) {
            const ApproxTarget t = make(kappa, delta);
            try {
                const Certificate c = certify(build(kappa, delta), t, 4096);
                worst_ratio = std::max(worst_ratio, c.grid_sup_error / c.bound);
                if (!c.passed()) {
                    ok = false;
                    detail << "kappa=" << kappa << " delta=" << delta << " error " << fmt(c.grid_sup_error)
                           << " > " << fmt(c.bound) << "; ";
                }
            } catch (const CertificateError& e) {
                ok = false;
                detail << "kappa=" << kappa << " delta=" << delta << ": " << e.what() << "; ";
            }
        }
    }
    detail << "worst error/bound " << fmt(worst_ratio);
    return {ok, detail.str()};
}

CheckOutcome c1_inv_sqrt(VerifyScale) { return certificates(&ApproxTarget::inv_sqrt, &inv_sqrt_poly); }
CheckOutcome c2_inv(VerifyScale) { return certificates(&ApproxTarget::inv, &inv_poly); }

CheckOutcome c3_degree_scaling(VerifyScale) {
    double lo = INFINITY, hi = 0.0;
    std::ostringstream detail;
    for (double kappa : {4.0, 16.0, 64.0, 256.0}) {
        const std::size_t deg = inv_poly(kappa, 0.1).degree();
        const double ratio = static_cast<double>(deg) / (std::sqrt(kappa) * std::log(kappa / 0.1));
        lo = std::min(lo, ratio);
        hi = std::max(hi, ratio);
        detail << "deg(" << kappa << ")=" << deg << " ";
    }
    detail << "ratio spread " << fmt(hi / lo);
    return {hi / lo <= 4.0, detail.str()};
}

CheckOutcome c4_exhaustive_rademacher(VerifyScale) {
    const RngState root{4, 0};
    const double kappa = 16.0;
    const ChebPoly poly = inv_poly(kappa, 0.1);
    double worst = 0.0;
    for (std::size_t i = 0; i < 20; ++i) {
        const std::size_t d = 1 + i % 4;
        const SymMatrix a = random_spd(d, 1.0, kappa, root.derive(i));
        std::vector<Vector> signs;
        for (std::size_t mask = 0; mask < (std::size_t{1} << d); ++mask) {
            Vector z(d);
            for (std::size_t k = 0; k < d; ++k) z[k] = (mask >> k) & 1 ? -1.0 : 1.0;
            signs.push_back(std::move(z));
        }
        const Backend backends[] = {ExactBackend{MatrixFunction::inv()}, LanczosBackend{MatrixFunction::inv(), d},
                                    ChebBackend{poly}};
        for (const auto& b : backends) {
            const double exact = backend_trace(a, b);
            const double est = hutchinson(a, b, signs).value;
            worst = std::max(worst, std::abs(est - exact) / std::max(1.0, std::abs(exact)));
        }
    }
    return {worst <= 1e-10, "max relative deviation " + fmt(worst)};
}

CheckOutcome c5_trace_pipeline(VerifyScale scale) {
    const std::size_t d = 64, seeds = full(scale) ? 20 : 5, probes = full(scale) ? 1024 : 256;
    const ApproxTarget target = ApproxTarget::inv(16.0, 0.01);
    const double bias = bias_bound(target, d);
    std::size_t passes = 0;
    double worst = 0.0;
    for (std::size_t s = 0; s < seeds; ++s) {
        const RngState root{500 + s, 0};
        const SymMatrix a = random_spd(d, 1.0, 16.0, root.derive(0));
        double truth = 0.0;
        for (double l : sym_eigenvalues(a)) truth += 1.0 / l;
        const TraceEstimate est = estimate_tr_f(a, target, probes, root.derive(1));
        const double allowed = 3.0 * est.sample_stddev / std::sqrt(static_cast<double>(probes)) + bias;
        const double err = std::abs(est.value - truth);
        worst = std::max(worst, err / allowed);
        if (err <= allowed) ++passes;
    }
    const double rate = static_cast<double>(passes) / static_cast<double>(seeds);
    return {rate >= 0.95, std::to_string(passes) + "/" + std::to_string(seeds) + " within bound, worst error/allowed " +
                              fmt(worst)};
}

CheckOutcome c6_krylov_vs_poly(VerifyScale) {
    const std::size_t d = 60;
    std::size_t comparisons = 0;
    double worst = 0.0;
    bool ok = true;
    for (double kappa : {4.0, 16.0}) {
        Vector diag(d), z(d);
        for (std::size_t i = 0; i < d; ++i) {
            diag[i] = 1.0 + (kappa - 1.0) * static_cast<double>(i) / static_cast<double>(d - 1);
            z[i] = 1.0 + 0.5 * std::sin(static_cast<double>(i));
        }
        const SymMatrix a = SymMatrix::diagonal(diag);
        Vector exact(d);
        for (std::size_t i = 0; i < d; ++i) exact[i] = z[i] / diag[i];
        const double znorm = norm2(z);

        std::vector<std::pair<std::size_t, double>> certs;
        for (double delta = 0.49; delta > 1e-9; delta *= 0.8) {
            const ApproxTarget t = ApproxTarget::inv(kappa, delta);
            const ChebPoly p = inv_poly(kappa, delta);
            if (p.degree() > 19) break;
            certs.emplace_back(p.degree(), sup_error(p, t, 4096));
        }
        for (std::size_t m = 2; m <= 20; ++m) {
            Vector approx = fa_times_vec_lanczos(a, z, m, MatrixFunction::inv()).value;
            Vector diff = approx;
            axpy(-1.0, exact, diff);
            const double err = norm2(diff);
            for (const auto& [deg, sup] : certs) {
                if (deg > m - 1) continue;
                ++comparisons;
                const double limit = (1.0 + 1e-6) * sup * znorm;
                worst = std::max(worst, err / limit);
                ok = ok && err <= limit;
            }
        }
    }
    return {ok && comparisons > 0,
            std::to_string(comparisons) + " comparisons, worst lanczos/poly error ratio " + fmt(worst)};
}

CheckOutcome c7_block_identity(VerifyScale scale) {
    const std::size_t trials = full(scale) ? 500 : 100;
    const std::pair<std::size_t, std::size_t> shapes[] = {{8, 2}, {12, 4}, {16, 8}};
    double worst = 0.0;
    std::size_t interlace_fail = 0;
    for (std::size_t k = 0; k < 3; ++k) {
        const auto [d, n] = shapes[k];
        const RngState root = RngState{7, 0}.derive(k);
        for (std::size_t t = 0; t < trials; ++t) {
            const RngState stream = root.derive(t);
            const SymMatrix w = sample_wishart(d, stream.derive(0));
            const Matrix g = sample_gaussian_matrix(n, d, stream.derive(1));
            std::vector<Vector> queries;
            for (std::size_t i = 0; i < n; ++i) queries.emplace_back(g.row(i).begin(), g.row(i).end());
            const auto post = posterior_decompose(w, QueryTranscript::observe(w, std::move(queries)));
            worst = std::max(worst, block_identity_residual(w, post) / w.max_abs());
            if (sym_eigenvalues(w).front() > sym_eigenvalues(post.wtilde).front() + 1e-10) ++interlace_fail;
        }
    }
    return {worst <= 1e-8 && interlace_fail == 0,
            "max relative residual " + fmt(worst) + ", interlacing failures " + std::to_string(interlace_fail)};
}

CheckOutcome c8_posterior_distribution(VerifyScale scale) {
    const auto r = posterior_distribution_test(12, 4, full(scale) ? 2000 : 1000, RngState{42, 0});
    const bool ok =
        r.trace_test.p_value > 0.01 && r.lambda_min_test.p_value > 0.01 && r.negative_control.p_value < 0.01;
    return {ok, "trace p=" + fmt(r.trace_test.p_value) + ", lambda_min p=" + fmt(r.lambda_min_test.p_value) +
                    ", negative control p=" + fmt(r.negative_control.p_value)};
}

CheckOutcome c9_lambda_min_cdf(VerifyScale scale) {
    const auto rows =
        eig_cdf_experiment(16, full(scale) ? 20000 : 10000, {0.01, 0.04, 0.16, 0.64}, RngState{7, 0});
    bool monotone = true;
    for (std::size_t i = 1; i < rows.size(); ++i) monotone = monotone && rows[i].probability >= rows[i - 1].probability;
    const double ratio = rows[1].probability / rows[0].probability;
    return {monotone && ratio >= 1.4 && ratio <= 2.8,
            "F(0.04)/F(0.01)=" + fmt(ratio) + (monotone ? ", monotone" : ", not monotone")};
}

CheckOutcome c10_inverse_trace(VerifyScale scale) {
    const std::size_t trials = full(scale) ? 2000 : 1000;
    bool ok = true;
    std::ostringstream detail;
    std::uint64_t seed = 11;
    for (double p : {0.75, 1.0, 2.0}) {
        double lo = INFINITY, hi = 0.0;
        for (std::size_t d : {8, 16, 32}) {
            const auto r = inv_trace_tail_experiment(d, trials, p, RngState{seed++, 0});
            lo = std::min(lo, r.q50);
            hi = std::max(hi, r.q50);
        }
        ok = ok && hi / lo <= 4.0;
        detail << (p == 0.75 ? "" : "; ") << "p=" << p << " spread " << fmt(hi / lo);
    }
    return {ok, detail.str()};
}

CheckOutcome c11_query_game(VerifyScale scale) {
    const std::size_t trials = full(scale) ? 200 : 50;
    const auto exact = query_game(16, 1.0, 2.0, GameAlgorithm::exact_recovery(), 16, 50, RngState{5, 1});
    const auto small = query_game(64, 1.0, 2.0, GameAlgorithm::hutchinson_for_budget(64, 8), 8, trials,
                                  RngState{5, 0});
    const auto large = query_game(64, 1.0, 2.0, GameAlgorithm::hutchinson_for_budget(64, 256), 256, trials,
                                  RngState{5, 0});
    const std::size_t violations = exact.violations + small.violations + large.violations;
    const bool ok = exact.success_rate() == 1.0 && violations == 0 && large.success_rate() > small.success_rate();
    return {ok, "exact rate " + fmt(exact.success_rate()) + ", hutchinson rate n=8: " + fmt(small.success_rate()) +
                    ", n=256: " + fmt(large.success_rate()) + ", violations " + std::to_string(violations)};
}

/// Sets an environment variable for the enclosing scope.
class ScopedEnv {
public:
    ScopedEnv(const char* name, const char* value) : name_(name) {
        if (const char* old = std::getenv(name)) previous_ = old;
        setenv(name, value, 1);
    }
    ~ScopedEnv() {
        if (previous_) setenv(name_, previous_->c_str(), 1);
        else unsetenv(name_);
    }
    ScopedEnv(const ScopedEnv&) = delete;
    ScopedEnv& operator=(const ScopedEnv&) = delete;

private:
    const char* name_;
    std::optional<std::string> previous_;
};

CheckOutcome c12_determinism(VerifyScale) {
    const std::vector<std::vector<std::string>> runs = {
        {"wishart", "eigcdf", "--d", "8", "--trials", "2000", "--seed", "3"},
        {"wishart", "lmax", "--d", "8", "--trials", "10000", "--seed", "3"},
        {"wishart", "invtrace", "--d", "8", "--trials", "1000", "--p", "1", "--seed", "3"},
        {"wishart", "posterior", "--d", "6", "--n", "2", "--trials", "1000", "--seed", "3"},
        {"wishart", "game", "--d", "16", "--budget", "32", "--trials", "20", "--seed", "3"},
    };
    std::size_t identical = 0;
    std::ostringstream detail;
    for (const auto& args : runs) {
        std::ostringstream a, b, err;
        ScopedEnv serial("TRACEBOUNDS_THREADS", "1");
        const int ca = run_cli(args, a, err);
        ScopedEnv parallel("TRACEBOUNDS_THREADS", "4");
        const int cb = run_cli(args, b, err);
        if (ca == cb && a.str() == b.str() && !a.str().empty()) ++identical;
        else detail << args[1] << " differs; ";
    }
    detail << identical << "/" << runs.size() << " subcommands byte-identical with 1 and 4 threads";
    return {identical == runs.size(), detail.str()};
}

} // namespace

const std::vector<Criterion>& acceptance_criteria() {
    static const std::vector<Criterion> list = {
        {1, "inv_sqrt certificates", 10.0, c1_inv_sqrt},
        {2, "inv certificates", 10.0, c2_inv},
        {3, "degree scaling", 30.0, c3_degree_scaling},
        {4, "exhaustive Rademacher exactness", 5.0, c4_exhaustive_rademacher},
        {5, "trace pipeline end to end", 60.0, c5_trace_pipeline},
        {6, "Krylov vs polynomial error", 30.0, c6_krylov_vs_poly},
        {7, "posterior block identity and interlacing", 60.0, c7_block_identity},
        {8, "posterior distribution", 300.0, c8_posterior_distribution},
        {9, "lambda_min CDF scaling", 180.0, c9_lambda_min_cdf},
        {10, "inverse trace collapse", 300.0, c10_inverse_trace},
        {11, "query game sanity", 600.0, c11_query_game},
        {12, "determinism of experiment CSV", 600.0, c12_determinism},
    };
    return list;
}

CriterionResult run_criterion(const Criterion& c, VerifyScale scale) {
    CriterionResult r;
    r.id = c.id;
    r.name = c.name;
    r.time_limit_seconds = c.time_limit_seconds;
    const auto start = std::chrono::steady_clock::now();
    CheckOutcome outcome;
    try {
        outcome = c.run(scale);
    } catch (const std::exception& e) {
        outcome = {false, std::string("exception: ") + e.what()};
    }
    r.seconds = std::chrono::duration<double>(std::chrono::steady_clock::now() - start).count();
    r.detail = outcome.detail;
    r.passed = outcome.passed && r.seconds <= r.time_limit_seconds;
    if (outcome.passed && !r.passed) r.detail += " (time limit exceeded)";
    return r;
}

std::string format_result(const CriterionResult& r) {
    char head[64];
    std::snprintf(head, sizeof head, "%s [%2d] ", r.passed ? "PASS" : "FAIL", r.id);
    char timing[64];
    std::snprintf(timing, sizeof timing, " (%.2f s / limit %g s): ", r.seconds, r.time_limit_seconds);
    return head + r.name + timing + r.detail;
}

} // namespace tracebounds
