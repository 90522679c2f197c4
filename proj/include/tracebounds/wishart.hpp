#pragma once

#include "tracebounds/krylov.hpp"
#include "tracebounds/matrix.hpp"
#include "tracebounds/random.hpp"
#include "tracebounds/stats.hpp"

#include <cstddef>
#include <string>
#include <vector>

namespace tracebounds {

/// Bulk edge of the spectrum of (1/d)·G·Gᵀ; reference constant for the
/// λ_max tail experiment.
inline constexpr double kLambdaMaxEdge = 4.0;

/// Queries v_1..v_n and responses w_i = W·v_i.
struct QueryTranscript {
    std::size_t dim = 0;
    std::vector<Vector> queries;
    std::vector<Vector> responses;

    /// Records responses of W to the given queries.
    static QueryTranscript observe(const SymMatrix& w, std::vector<Vector> queries);
    /// Queries e_1..e_n.
    static QueryTranscript canonical(const SymMatrix& w, std::size_t n);

    std::size_t size() const noexcept { return queries.size(); }
    /// Throws InvalidArgument unless n < d and every vector has length d.
    void validate() const;
};

/// The parts of the posterior decomposition that depend only on the transcript.
struct RevealedBlocks {
    Matrix v;          ///< d×d orthogonal; first n rows span the queries
    Matrix y1;         ///< n×n lower triangular
    Matrix y2;         ///< (d−n)×n
    Matrix complement; ///< d×(d−n), orthonormal basis of the unqueried directions
};

/// V·W·Vᵀ = [[Y1·Y1ᵀ, Y1·Y2ᵀ], [Y2·Y1ᵀ, Y2·Y2ᵀ + W̃]].
struct PosteriorDecomposition {
    Matrix v;
    Matrix y1;
    Matrix y2;
    SymMatrix wtilde;
};

/// Builds (V, Y1, Y2) from queries and responses alone. Throws RankDeficient
/// for dependent queries and NotPositiveDefinite when the revealed block
/// S = Q_colsᵀ·W·Q_cols is numerically singular.
RevealedBlocks revealed_blocks(const QueryTranscript& t);

/// Adds W̃ = Zᵀ·W·Z − Y2·Y2ᵀ to the transcript-only blocks. With an empty
/// transcript, V = I and W̃ = W.
PosteriorDecomposition posterior_decompose(const SymMatrix& w, const QueryTranscript& t);

/// ‖V·W·Vᵀ − block form‖_max.
double block_identity_residual(const SymMatrix& w, const PosteriorDecomposition& p);

struct PosteriorTestReport {
    std::size_t dim = 0;
    std::size_t queries = 0;
    std::size_t trials = 0;
    /// Per trial: tr(W̃), λ_min(W̃)·(d−n)², and the same for a fresh draw.
    std::vector<double> posterior_trace, posterior_scaled_lambda_min;
    std::vector<double> fresh_trace, fresh_scaled_lambda_min;
    /// Trace of Zᵀ·W·Z without the Y2·Y2ᵀ correction (negative control).
    std::vector<double> uncorrected_trace;
    /// Block identity residual relative to ‖W‖_max.
    std::vector<double> block_residual;
    std::vector<bool> interlacing_ok;

    KsResult trace_test;
    KsResult lambda_min_test;
    KsResult negative_control;
};

/// Compares W̃ after n canonical queries against fresh draws from the same
/// law. Under W = (1/d)·G·Gᵀ, W̃ is distributed as (1/d)·G'·G'ᵀ with G' of
/// size (d−n)×(d−n), so fresh draws are sample_wishart(d−n) rescaled by
/// (d−n)/d. Trial t uses stream t: W from derive(0), the fresh draw from derive(1).
PosteriorTestReport posterior_distribution_test(std::size_t d, std::size_t n, std::size_t trials, RngState rng);

struct CdfRow {
    double x = 0.0;
    double threshold = 0.0; ///< x/d²
    std::size_t hits = 0;
    std::size_t trials = 0;
    double probability = 0.0;
    double std_error = 0.0;
};

/// Empirical Pr{λ_min(W) ≤ x/d²} for each x, all from the same trials.
std::vector<CdfRow> eig_cdf_experiment(std::size_t d, std::size_t trials, const std::vector<double>& xs,
                                       RngState rng);

struct TailRow {
    double t = 0.0;
    double threshold = 0.0; ///< 4·(1 + t)
    std::size_t hits = 0;
    std::size_t trials = 0;
    double probability = 0.0;
    double std_error = 0.0;
    double bound = 0.0;     ///< 2·exp(−d·t)
    bool asserted = false;  ///< false at t = 0, where the bound is vacuous
    bool within_bound = true;
};

/// Empirical Pr{λ_max(W) ≥ 4·(1 + t)} compared with 2·exp(−d·t) + 3σ.
std::vector<TailRow> lambda_max_tail_experiment(std::size_t d, std::size_t trials, const std::vector<double>& ts,
                                                RngState rng);

struct InvTraceTrial {
    double trace = 0.0;        ///< tr(W^{−p})
    double scaled_trace = 0.0; ///< tr(W^{−p})/d^{2p}
    double lambda_min = 0.0;
    double lambda_max = 0.0;
    bool dropped = false;      ///< λ_min < 1e−300
};

struct InvTraceReport {
    std::size_t dim = 0;
    double power = 1.0;
    std::size_t trials = 0;
    std::size_t dropped = 0;
    double q50 = 0.0, q90 = 0.0, q99 = 0.0;
    /// 0.99-quantile of (1/λ_j)·(j²/d²) for j = 1..d.
    std::vector<double> index_profile_q99;
    std::vector<InvTraceTrial> records;
};

InvTraceReport inv_trace_tail_experiment(std::size_t d, std::size_t trials, double p, RngState rng);

/// W accessed only through counted products. Throws BudgetExceeded on the
/// product that would exceed the budget.
class MeteredOracle final : public LinearOperator {
public:
    MeteredOracle(const SymMatrix& w, std::size_t budget) : w_(w), budget_(budget) {}

    std::size_t dim() const override { return w_.dim(); }
    void apply(std::span<const double> x, std::span<double> y) const override;
    Vector apply(std::span<const double> x) const;

    std::size_t used() const noexcept { return used_; }
    std::size_t budget() const noexcept { return budget_; }

private:
    const SymMatrix& w_;
    std::size_t budget_;
    mutable std::size_t used_ = 0;
};

struct GameAlgorithm {
    enum class Kind { exact_recovery, hutchinson_krylov, constant_guess };

    Kind kind = Kind::exact_recovery;
    std::size_t probes = 1;  ///< N_v
    std::size_t steps = 1;   ///< Lanczos m
    double guess = 1.0;      ///< constant_guess output

    static GameAlgorithm exact_recovery() { return {Kind::exact_recovery, 0, 0, 0.0}; }
    static GameAlgorithm hutchinson_krylov(std::size_t probes, std::size_t steps) {
        return {Kind::hutchinson_krylov, probes, steps, 0.0};
    }
    /// m = min(d, n) Lanczos steps and N_v = max(1, ⌊n/m⌋) probes.
    static GameAlgorithm hutchinson_for_budget(std::size_t d, std::size_t budget);
    static GameAlgorithm constant_guess(double c) { return {Kind::constant_guess, 0, 0, c}; }

    std::string describe() const;
};

struct GameTrial {
    double estimate = 0.0;
    double true_trace = 0.0;
    bool success = false;
    std::size_t queries_used = 0;
    bool violation = false; ///< the algorithm tried to exceed the budget
};

struct GameResult {
    std::size_t dim = 0;
    double power = 1.0;
    double factor = 2.0; ///< C
    std::size_t budget = 0;
    std::size_t trials = 0;
    std::size_t success_count = 0;
    std::size_t violations = 0;
    std::string algorithm;
    std::vector<GameTrial> records;

    double success_rate() const noexcept {
        return trials == 0 ? 0.0 : static_cast<double>(success_count) / static_cast<double>(trials);
    }
};

/// Estimating tr(W^{−p}) to within a factor C from at most `budget` products.
/// Trial t draws W from stream t (derive(0)); probe s of the Hutchinson
/// algorithm uses derive(1 + s).
GameResult query_game(std::size_t d, double p, double factor, const GameAlgorithm& algorithm, std::size_t budget,
                      std::size_t trials, RngState rng);

} // namespace tracebounds
