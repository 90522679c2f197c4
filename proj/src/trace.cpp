#include "tracebounds/trace.hpp"

#include "tracebounds/errors.hpp"
#include "tracebounds/parallel.hpp"
#include "tracebounds/poly_approx.hpp"

#include <cmath>
#include <numeric>
#include <sstream>

namespace tracebounds {

std::string to_string(ProbeKind kind) { return kind == ProbeKind::rademacher ? "rademacher" : "gaussian"; }

ProbeKind parse_probe_kind(const std::string& name) {
    if (name == "rademacher") return ProbeKind::rademacher;
    if (name == "gaussian") return ProbeKind::gaussian;
    throw InvalidArgument("unknown probe kind '" + name + "'");
}

Vector ProbeSpec::draw(std::size_t s, std::size_t dim) const {
    Rng r(rng.derive(s));
    Vector z(dim);
    for (auto& v : z) v = kind == ProbeKind::rademacher ? r.rademacher() : r.normal();
    return z;
}

std::string describe(const Backend& backend) {
    std::ostringstream os;
    os.precision(17);
    std::visit(
        [&](const auto& b) {
            using T = std::decay_t<decltype(b)>;
            if constexpr (std::is_same_v<T, ExactBackend>) {
                os << "exact(" << b.f.name() << ")";
            } else if constexpr (std::is_same_v<T, LanczosBackend>) {
                os << "lanczos(" << b.f.name() << ", m=" << b.steps << ")";
            } else {
                os << "cheb(degree=" << b.poly.degree() << ", interval=[" << b.poly.interval().lo << ", "
                   << b.poly.interval().hi << "])";
            }
        },
        backend);
    return os.str();
}

TraceEstimate summarize(Vector forms, std::size_t mvp_count, std::string backend) {
    if (forms.empty()) throw InvalidArgument("hutchinson needs at least one probe");
    const double n = static_cast<double>(forms.size());
    const double mean = std::accumulate(forms.begin(), forms.end(), 0.0) / n;
    double ss = 0.0;
    for (double q : forms) ss += (q - mean) * (q - mean);
    TraceEstimate out;
    out.value = mean;
    out.sample_stddev = forms.size() > 1 ? std::sqrt(ss / (n - 1.0)) : 0.0;
    out.quadratic_forms = std::move(forms);
    out.mvp_count = mvp_count;
    out.backend = std::move(backend);
    return out;
}

std::pair<double, std::size_t> quadratic_form(const LinearOperator& a, const Backend& backend,
                                              std::span<const double> z, const EigenDecomposition* eig) {
    return std::visit(
        [&](const auto& b) -> std::pair<double, std::size_t> {
            using T = std::decay_t<decltype(b)>;
            if constexpr (std::is_same_v<T, ExactBackend>) {
                if (eig == nullptr) throw InvalidArgument("exact backend needs an eigendecomposition");
                return {dot(z, exact_fa_times_vec(*eig, b.f, z)), 0};
            } else if constexpr (std::is_same_v<T, LanczosBackend>) {
                const KrylovProduct r = fa_times_vec_lanczos(a, z, b.steps, b.f);
                return {dot(z, r.value), r.mvp_count};
            } else {
                const KrylovProduct r = poly_times_vec(a, b.poly, z);
                return {dot(z, r.value), r.mvp_count};
            }
        },
        backend);
}

namespace {

TraceEstimate run(const SymMatrix& a, const Backend& backend, std::size_t count,
                  const std::function<Vector(std::size_t)>& probe) {
    std::optional<EigenDecomposition> eig;
    if (std::holds_alternative<ExactBackend>(backend)) eig = sym_eigen(a);
    const DenseOperator op(a);

    Vector forms(count);
    std::vector<std::size_t> mvps(count);
    parallel_for(count, [&](std::size_t s) {
        const Vector z = probe(s);
        auto [q, cost] = quadratic_form(op, backend, z, eig ? &*eig : nullptr);
        forms[s] = q;
        mvps[s] = cost;
    });
    const std::size_t total = std::accumulate(mvps.begin(), mvps.end(), std::size_t{0});
    return summarize(std::move(forms), total, describe(backend));
}

} // namespace

TraceEstimate hutchinson(const SymMatrix& a, const Backend& backend, const ProbeSpec& probes) {
    if (probes.count < 1) throw InvalidArgument("probe count must be >= 1");
    return run(a, backend, probes.count, [&](std::size_t s) { return probes.draw(s, a.dim()); });
}

TraceEstimate hutchinson(const SymMatrix& a, const Backend& backend, const std::vector<Vector>& probes) {
    for (const auto& z : probes)
        if (z.size() != a.dim()) throw InvalidArgument("probe vector has wrong length");
    return run(a, backend, probes.size(), [&](std::size_t s) { return probes[s]; });
}

double backend_trace(const SymMatrix& a, const Backend& backend) {
    const Vector lambda = sym_eigenvalues(a);
    return std::visit(
        [&](const auto& b) {
            using T = std::decay_t<decltype(b)>;
            double sum = 0.0;
            for (double l : lambda) {
                if constexpr (std::is_same_v<T, ChebBackend>) {
                    sum += b.poly(l);
                } else {
                    if (b.f.needs_positive() && !(l > 0.0)) throw SpectrumError(b.f.name(), l);
                    sum += b.f(l);
                }
            }
            return sum;
        },
        backend);
}

TraceEstimate estimate_tr_f(const SymMatrix& a, const ApproxTarget& target, std::size_t probes, RngState rng,
                            ProbeKind kind) {
    target.validate();
    if (target.kind == ApproxTarget::Kind::monomial)
        throw InvalidArgument("estimate_tr_f supports inv and inv_sqrt targets");
    ChebPoly p = build_poly(target);
    const std::size_t degree = p.degree();
    TraceEstimate est = hutchinson(a, ChebBackend{std::move(p)}, ProbeSpec{kind, probes, rng});
    est.target = target;
    est.degree = degree;
    return est;
}

double bias_bound(const ApproxTarget& target, std::size_t dim) {
    target.validate();
    if (target.kind == ApproxTarget::Kind::monomial)
        throw InvalidArgument("no per-eigenvalue trace bias bound is defined for monomial targets");
    return static_cast<double>(dim) * target.error_bound();
}

} // namespace tracebounds
