#pragma once

#include "tracebounds/cheb.hpp"
#include "tracebounds/krylov.hpp"
#include "tracebounds/random.hpp"

#include <cstddef>
#include <functional>
#include <utility>
#include <optional>
#include <string>
#include <variant>
#include <vector>

namespace tracebounds {

enum class ProbeKind { rademacher, gaussian };

std::string to_string(ProbeKind kind);
ProbeKind parse_probe_kind(const std::string& name);

/// Probe s draws from the stream rng.derive(s), so probes are independent of
/// evaluation order.
struct ProbeSpec {
    ProbeKind kind = ProbeKind::rademacher;
    std::size_t count = 1;
    RngState rng{};

    Vector draw(std::size_t s, std::size_t dim) const;
};

/// f(A)·z through a dense eigendecomposition; consumes no metered products.
struct ExactBackend {
    MatrixFunction f;
};

struct LanczosBackend {
    MatrixFunction f;
    std::size_t steps = 1;
};

struct ChebBackend {
    ChebPoly poly;
};

using Backend = std::variant<ExactBackend, LanczosBackend, ChebBackend>;

std::string describe(const Backend& backend);

struct TraceEstimate {
    double value = 0.0;
    Vector quadratic_forms;
    std::size_t mvp_count = 0;
    std::string backend;
    double sample_stddev = 0.0;
    /// Present for estimate_tr_f runs.
    std::optional<ApproxTarget> target;
    std::size_t degree = 0;
};

/// Mean and unbiased sample standard deviation of per-probe quadratic forms.
TraceEstimate summarize(Vector quadratic_forms, std::size_t mvp_count, std::string backend);

/// (1/N_v)·Σ_s z_sᵀ·ĝ(A)·z_s with ĝ the backend's action.
TraceEstimate hutchinson(const SymMatrix& a, const Backend& backend, const ProbeSpec& probes);

/// Same estimator over caller-supplied probe vectors.
TraceEstimate hutchinson(const SymMatrix& a, const Backend& backend, const std::vector<Vector>& probes);

/// z·ĝ(A)·z and its product count for one probe. `eig` is only consulted by
/// the exact backend and may be null otherwise.
std::pair<double, std::size_t> quadratic_form(const LinearOperator& a, const Backend& backend,
                                              std::span<const double> z, const EigenDecomposition* eig);

/// tr(ĝ(A)) computed from the spectrum; for the Lanczos backend this is only
/// meaningful when steps = dim (the action is then f(A) itself).
double backend_trace(const SymMatrix& a, const Backend& backend);

/// Builds the degree-D polynomial for the target on [1, κ] and runs the
/// Chebyshev backend. Total cost is N_v·D products.
TraceEstimate estimate_tr_f(const SymMatrix& a, const ApproxTarget& target, std::size_t probes,
                            RngState rng, ProbeKind kind = ProbeKind::rademacher);

/// d·δ/√κ for inv_sqrt, d·δ/κ for inv. Throws InvalidArgument for monomials.
double bias_bound(const ApproxTarget& target, std::size_t dim);

} // namespace tracebounds
