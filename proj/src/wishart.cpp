#include "tracebounds/wishart.hpp"

#include "tracebounds/errors.hpp"
#include "tracebounds/linalg.hpp"
#include "tracebounds/parallel.hpp"

#include <algorithm>
#include <cmath>
#include <sstream>

namespace tracebounds {

QueryTranscript QueryTranscript::observe(const SymMatrix& w, std::vector<Vector> queries) {
    QueryTranscript t;
    t.dim = w.dim();
    for (const auto& v : queries) {
        if (v.size() != t.dim) throw InvalidArgument("query has wrong length");
        t.responses.push_back(w.apply(v));
    }
    t.queries = std::move(queries);
    return t;
}

QueryTranscript QueryTranscript::canonical(const SymMatrix& w, std::size_t n) {
    std::vector<Vector> queries;
    for (std::size_t i = 0; i < n; ++i) {
        Vector e(w.dim(), 0.0);
        e.at(i) = 1.0;
        queries.push_back(std::move(e));
    }
    return observe(w, std::move(queries));
}

void QueryTranscript::validate() const {
    if (dim == 0) throw InvalidArgument("transcript dimension must be >= 1");
    if (queries.size() >= dim) throw InvalidArgument("transcript needs n < d queries");
    if (responses.size() != queries.size()) throw InvalidArgument("transcript has mismatched responses");
    for (std::size_t i = 0; i < queries.size(); ++i)
        if (queries[i].size() != dim || responses[i].size() != dim)
            throw InvalidArgument("transcript vector has wrong length");
}

RevealedBlocks revealed_blocks(const QueryTranscript& t) {
    t.validate();
    const std::size_t d = t.dim;
    const std::size_t n = t.size();
    if (n == 0) return {Matrix::identity(d), Matrix(0, 0), Matrix(d, 0), Matrix::identity(d)};

    const QRFactors qr = qr_columns(Matrix::from_columns(t.queries));
    Matrix z = orthonormal_complement(qr.q);
    // Columns of W·Q_cols, recovered from responses: W·M = W·Q·R.
    const Matrix wq = solve_right_upper(Matrix::from_columns(t.responses), qr.r);

    const Matrix y1 = cholesky(SymMatrix::symmetrized(transpose_times(qr.q, wq)));
    Matrix y2 = solve_right_lower_transpose(transpose_times(z, wq), y1);

    Matrix v(d, d);
    for (std::size_t i = 0; i < n; ++i)
        for (std::size_t k = 0; k < d; ++k) v(i, k) = qr.q(k, i);
    for (std::size_t i = 0; i < d - n; ++i)
        for (std::size_t k = 0; k < d; ++k) v(n + i, k) = z(k, i);

    return {std::move(v), y1, std::move(y2), std::move(z)};
}

PosteriorDecomposition posterior_decompose(const SymMatrix& w, const QueryTranscript& t) {
    if (t.dim != w.dim()) throw InvalidArgument("transcript dimension does not match W");
    RevealedBlocks blocks = revealed_blocks(t);
    const Matrix& z = blocks.complement;
    Matrix trailing = transpose_times(z, w.matrix() * z);
    trailing -= times_transpose(blocks.y2, blocks.y2);
    return {std::move(blocks.v), std::move(blocks.y1), std::move(blocks.y2), SymMatrix::symmetrized(trailing)};
}

double block_identity_residual(const SymMatrix& w, const PosteriorDecomposition& p) {
    const std::size_t d = w.dim();
    const std::size_t n = p.y1.rows();
    const Matrix rotated = times_transpose(p.v * w.matrix(), p.v);
    const Matrix top_left = times_transpose(p.y1, p.y1);
    const Matrix bottom_left = times_transpose(p.y2, p.y1);
    const Matrix bottom_right = times_transpose(p.y2, p.y2) + p.wtilde.matrix();

    double worst = 0.0;
    for (std::size_t i = 0; i < d; ++i) {
        for (std::size_t j = 0; j < d; ++j) {
            double expected;
            if (i < n && j < n) expected = top_left(i, j);
            else if (i >= n && j < n) expected = bottom_left(i - n, j);
            else if (i < n) expected = bottom_left(j - n, i);
            else expected = bottom_right(i - n, j - n);
            worst = std::max(worst, std::abs(rotated(i, j) - expected));
        }
    }
    return worst;
}

PosteriorTestReport posterior_distribution_test(std::size_t d, std::size_t n, std::size_t trials, RngState rng) {
    if (n >= d) throw InvalidArgument("posterior test needs n < d");
    if (trials < 1000) throw InvalidArgument("posterior test needs trials >= 1000");
    const std::size_t rest = d - n;
    const double rest_sq = static_cast<double>(rest * rest);
    const double fresh_scale = static_cast<double>(rest) / static_cast<double>(d);

    PosteriorTestReport r;
    r.dim = d;
    r.queries = n;
    r.trials = trials;
    r.posterior_trace.resize(trials);
    r.posterior_scaled_lambda_min.resize(trials);
    r.fresh_trace.resize(trials);
    r.fresh_scaled_lambda_min.resize(trials);
    r.uncorrected_trace.resize(trials);
    r.block_residual.resize(trials);
    std::vector<char> interlacing(trials);

    parallel_for(trials, [&](std::size_t trial) {
        const RngState stream = rng.derive(trial);
        const SymMatrix w = sample_wishart(d, stream.derive(0));
        const QueryTranscript t = QueryTranscript::canonical(w, n);
        const PosteriorDecomposition p = posterior_decompose(w, t);

        const Vector post_eigs = sym_eigenvalues(p.wtilde);
        double tr = 0.0;
        for (double l : post_eigs) tr += l;
        r.posterior_trace[trial] = tr;
        r.posterior_scaled_lambda_min[trial] = post_eigs.front() * rest_sq;

        const SymMatrix fresh = sample_wishart(rest, stream.derive(1));
        const Vector fresh_eigs = sym_eigenvalues(fresh);
        double ftr = 0.0;
        for (double l : fresh_eigs) ftr += l * fresh_scale;
        r.fresh_trace[trial] = ftr;
        r.fresh_scaled_lambda_min[trial] = fresh_eigs.front() * fresh_scale * rest_sq;

        double utr = 0.0;
        for (std::size_t i = n; i < d; ++i) utr += w(i, i);
        r.uncorrected_trace[trial] = utr;

        r.block_residual[trial] = block_identity_residual(w, p) / std::max(w.max_abs(), 1e-300);
        interlacing[trial] = sym_eigenvalues(w).front() <= post_eigs.front() + 1e-10;
    });
    r.interlacing_ok.assign(interlacing.begin(), interlacing.end());

    r.trace_test = ks_two_sample(r.posterior_trace, r.fresh_trace);
    r.lambda_min_test = ks_two_sample(r.posterior_scaled_lambda_min, r.fresh_scaled_lambda_min);
    r.negative_control = ks_two_sample(r.uncorrected_trace, r.fresh_trace);
    return r;
}

namespace {

// Sorted eigenvalues of W for every trial, trial t from stream t.
std::vector<Vector> wishart_spectra(std::size_t d, std::size_t trials, RngState rng) {
    std::vector<Vector> spectra(trials);
    parallel_for(trials, [&](std::size_t trial) {
        spectra[trial] = sym_eigenvalues(sample_wishart(d, rng.derive(trial).derive(0)));
    });
    return spectra;
}

} // namespace

std::vector<CdfRow> eig_cdf_experiment(std::size_t d, std::size_t trials, const std::vector<double>& xs,
                                       RngState rng) {
    if (d < 1 || trials < 1) throw InvalidArgument("eig_cdf_experiment needs d, trials >= 1");
    for (double x : xs)
        if (!(x >= 0.0)) throw InvalidArgument("eig_cdf_experiment needs x >= 0");
    const auto spectra = wishart_spectra(d, trials, rng);
    const double d2 = static_cast<double>(d * d);

    std::vector<CdfRow> rows;
    for (double x : xs) {
        CdfRow row{x, x / d2, 0, trials, 0.0, 0.0};
        for (const auto& s : spectra)
            if (s.front() <= row.threshold) ++row.hits;
        row.probability = static_cast<double>(row.hits) / static_cast<double>(trials);
        row.std_error = binomial_std_error(row.probability, trials);
        rows.push_back(row);
    }
    return rows;
}

std::vector<TailRow> lambda_max_tail_experiment(std::size_t d, std::size_t trials, const std::vector<double>& ts,
                                                RngState rng) {
    if (d < 1) throw InvalidArgument("lambda_max_tail_experiment needs d >= 1");
    if (trials < 10000) throw InvalidArgument("lambda_max_tail_experiment needs trials >= 10000");
    for (double t : ts)
        if (!(t >= 0.0)) throw InvalidArgument("lambda_max_tail_experiment needs t >= 0");
    const auto spectra = wishart_spectra(d, trials, rng);

    std::vector<TailRow> rows;
    for (double t : ts) {
        TailRow row;
        row.t = t;
        row.threshold = kLambdaMaxEdge * (1.0 + t);
        row.trials = trials;
        for (const auto& s : spectra)
            if (s.back() >= row.threshold) ++row.hits;
        row.probability = static_cast<double>(row.hits) / static_cast<double>(trials);
        row.std_error = binomial_std_error(row.probability, trials);
        row.bound = 2.0 * std::exp(-static_cast<double>(d) * t);
        row.asserted = t > 0.0;
        row.within_bound = !row.asserted || row.probability <= row.bound + 3.0 * row.std_error;
        rows.push_back(row);
    }
    return rows;
}

InvTraceReport inv_trace_tail_experiment(std::size_t d, std::size_t trials, double p, RngState rng) {
    if (!(p > 0.5)) throw InvalidArgument("inverse trace experiment needs p > 1/2");
    if (d < 2) throw InvalidArgument("inverse trace experiment needs d >= 2");
    if (trials < 1000) throw InvalidArgument("inverse trace experiment needs trials >= 1000");
    const auto spectra = wishart_spectra(d, trials, rng);
    const double dd = static_cast<double>(d);
    const double norm = std::pow(dd, 2.0 * p);

    InvTraceReport r;
    r.dim = d;
    r.power = p;
    r.trials = trials;
    r.records.resize(trials);
    std::vector<double> scaled;
    std::vector<std::vector<double>> profile(d);
    for (std::size_t t = 0; t < trials; ++t) {
        const Vector& s = spectra[t];
        InvTraceTrial& rec = r.records[t];
        rec.lambda_min = s.front();
        rec.lambda_max = s.back();
        if (!(s.front() >= 1e-300)) {
            rec.dropped = true;
            ++r.dropped;
            continue;
        }
        for (double l : s) rec.trace += std::pow(l, -p);
        rec.scaled_trace = rec.trace / norm;
        scaled.push_back(rec.scaled_trace);
        for (std::size_t j = 0; j < d; ++j) {
            const double jj = static_cast<double>(j + 1);
            profile[j].push_back(jj * jj / (dd * dd) / s[j]);
        }
    }
    if (!scaled.empty()) {
        std::sort(scaled.begin(), scaled.end());
        r.q50 = quantile_sorted(scaled, 0.5);
        r.q90 = quantile_sorted(scaled, 0.9);
        r.q99 = quantile_sorted(scaled, 0.99);
        for (auto& column : profile) {
            std::sort(column.begin(), column.end());
            r.index_profile_q99.push_back(quantile_sorted(column, 0.99));
        }
    }
    return r;
}

void MeteredOracle::apply(std::span<const double> x, std::span<double> y) const {
    if (used_ >= budget_) throw BudgetExceeded(budget_);
    ++used_;
    w_.apply(x, y);
}

Vector MeteredOracle::apply(std::span<const double> x) const {
    Vector y(dim());
    apply(x, y);
    return y;
}

GameAlgorithm GameAlgorithm::hutchinson_for_budget(std::size_t d, std::size_t budget) {
    const std::size_t m = std::max<std::size_t>(1, std::min(d, budget));
    return hutchinson_krylov(std::max<std::size_t>(1, budget / m), m);
}

std::string GameAlgorithm::describe() const {
    std::ostringstream os;
    os.precision(17);
    switch (kind) {
    case Kind::exact_recovery: os << "exact_recovery"; break;
    case Kind::hutchinson_krylov: os << "hutchinson_krylov(N_v=" << probes << ", m=" << steps << ")"; break;
    case Kind::constant_guess: os << "constant_guess(" << guess << ")"; break;
    }
    return os.str();
}

namespace {

double play(const MeteredOracle& oracle, const GameAlgorithm& algo, double p, RngState stream) {
    const std::size_t d = oracle.dim();
    switch (algo.kind) {
    case GameAlgorithm::Kind::constant_guess: return algo.guess;
    case GameAlgorithm::Kind::exact_recovery: {
        Matrix recovered(d, d);
        Vector e(d, 0.0);
        for (std::size_t i = 0; i < d; ++i) {
            e[i] = 1.0;
            recovered.set_column(i, oracle.apply(e));
            e[i] = 0.0;
        }
        double tr = 0.0;
        for (double l : sym_eigenvalues(SymMatrix::symmetrized(recovered))) {
            if (!(l > 0.0)) throw SpectrumError("x^-p", l);
            tr += std::pow(l, -p);
        }
        return tr;
    }
    case GameAlgorithm::Kind::hutchinson_krylov: {
        const MatrixFunction f = MatrixFunction::neg_power(p);
        double sum = 0.0;
        for (std::size_t s = 0; s < algo.probes; ++s) {
            Rng r(stream.derive(1 + s));
            Vector z(d);
            for (auto& v : z) v = r.rademacher();
            sum += dot(z, fa_times_vec_lanczos(oracle, z, std::min(algo.steps, d), f).value);
        }
        return sum / static_cast<double>(algo.probes);
    }
    }
    return 0.0;
}

} // namespace

GameResult query_game(std::size_t d, double p, double factor, const GameAlgorithm& algorithm, std::size_t budget,
                      std::size_t trials, RngState rng) {
    if (d < 2) throw InvalidArgument("query game needs d >= 2");
    if (!(p > 0.5)) throw InvalidArgument("query game needs p > 1/2");
    if (!(factor > 1.0)) throw InvalidArgument("query game needs C > 1");
    if (algorithm.kind == GameAlgorithm::Kind::hutchinson_krylov &&
        (algorithm.probes < 1 || algorithm.steps < 1 || algorithm.probes * algorithm.steps > budget))
        throw InvalidArgument("hutchinson_krylov needs N_v*m <= budget");
    if (algorithm.kind == GameAlgorithm::Kind::exact_recovery && budget < d)
        throw InvalidArgument("exact_recovery needs budget >= d");

    GameResult result;
    result.dim = d;
    result.power = p;
    result.factor = factor;
    result.budget = budget;
    result.trials = trials;
    result.algorithm = algorithm.describe();
    result.records.resize(trials);

    parallel_for(trials, [&](std::size_t trial) {
        const RngState stream = rng.derive(trial);
        const SymMatrix w = sample_wishart(d, stream.derive(0));
        GameTrial& rec = result.records[trial];
        for (double l : sym_eigenvalues(w)) rec.true_trace += std::pow(l, -p);

        const MeteredOracle oracle(w, budget);
        try {
            rec.estimate = play(oracle, algorithm, p, stream);
            rec.success = rec.estimate >= rec.true_trace / factor && rec.estimate <= rec.true_trace * factor;
        } catch (const BudgetExceeded&) {
            rec.violation = true;
            rec.estimate = std::nan("");
        }
        rec.queries_used = oracle.used();
    });

    for (const auto& rec : result.records) {
        result.success_count += rec.success ? 1 : 0;
        result.violations += rec.violation ? 1 : 0;
    }
    return result;
}

} // namespace tracebounds
