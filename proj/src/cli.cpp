#include "tracebounds/cli.hpp"

#include "tracebounds/errors.hpp"
#include "tracebounds/format.hpp"
#include "tracebounds/linalg.hpp"
#include "tracebounds/matrix_io.hpp"
#include "tracebounds/parallel.hpp"
#include "tracebounds/poly_approx.hpp"
#include "tracebounds/random.hpp"
#include "tracebounds/serialize.hpp"
#include "tracebounds/trace.hpp"
#include "tracebounds/verify.hpp"
#include "tracebounds/wishart.hpp"

#include "CLI11.hpp"

#include <algorithm>
#include <chrono>
#include <cmath>
#include <ctime>
#include <filesystem>
#include <fstream>
#include <optional>
#include <sstream>

namespace tracebounds {

namespace {

class IoError : public Error {
public:
    using Error::Error;
};

struct Check {
    std::string name;
    bool passed = true;
};

std::string utc_timestamp() {
    const std::time_t now = std::chrono::system_clock::to_time_t(std::chrono::system_clock::now());
    std::tm tm{};
    gmtime_r(&now, &tm);
    char buf[32];
    std::strftime(buf, sizeof buf, "%Y-%m-%dT%H:%M:%SZ", &tm);
    return buf;
}

void emit(const std::string& text, const std::string& path, std::ostream& out) {
    if (path.empty()) {
        out << text;
        return;
    }
    std::ofstream file(path, std::ios::binary);
    if (!file) throw IoError("cannot open '" + path + "' for writing");
    file << text;
    if (!file) throw IoError("failed writing '" + path + "'");
}

Json read_json_file(const std::string& path) {
    std::ifstream in(path);
    if (!in) throw IoError("cannot open '" + path + "'");
    return Json::parse(in);
}

std::string dump(const Json& j) { return j.dump(2) + "\n"; }

Json metadata() { return Json{{"timestamp", utc_timestamp()}, {"threads", thread_count()}}; }

/// "# key=value" lines in key order; no run-dependent values.
void write_config_comments(std::ostream& os, const Json& config) {
    for (const auto& [key, value] : config.items()) os << "# " << key << '=' << value.dump() << '\n';
}

Json checks_json(const std::vector<Check>& checks) {
    Json arr = Json::array();
    for (const auto& c : checks) arr.push_back({{"name", c.name}, {"passed", c.passed}});
    return arr;
}

int report_checks(const std::vector<Check>& checks, std::ostream& err) {
    int code = kExitOk;
    for (const auto& c : checks) {
        if (c.passed) continue;
        err << "check failed: " << c.name << '\n';
        code = kExitCheckFailed;
    }
    return code;
}

// ---- poly -------------------------------------------------------------------

struct PolyArgs {
    std::string func = "inv";
    double kappa = 2.0;
    double delta = 0.1;
    int s = 1;
    std::size_t grid = 8192;
    std::string poly_path;
    std::optional<std::size_t> error_grid;
    std::string out;
};

ApproxTarget make_target(const std::string& func, double kappa, double delta, int s) {
    ApproxTarget t;
    switch (parse_target_kind(func)) {
    case ApproxTarget::Kind::inv: t = ApproxTarget::inv(kappa, delta); break;
    case ApproxTarget::Kind::inv_sqrt: t = ApproxTarget::inv_sqrt(kappa, delta); break;
    case ApproxTarget::Kind::monomial: t = ApproxTarget::monomial(s, delta); break;
    }
    t.validate();
    return t;
}

int cmd_poly_build(const PolyArgs& a, std::ostream& out, std::ostream& err) {
    const ApproxTarget target = make_target(a.func, a.kappa, a.delta, a.s);
    const ChebPoly p = build_poly(target);
    const Certificate cert = certify(p, target, a.grid);

    Json j = cheb_to_json(p);
    j["target"] = target;
    j["certificate"] = cert;
    j["config"] = Json{{"subcommand", "poly build"}, {"target", target}, {"grid", a.grid}};
    emit(dump(j), a.out, out);
    if (!cert.passed()) {
        err << "check failed: certificate (grid sup error " << format_double(cert.grid_sup_error) << " > bound "
            << format_double(cert.bound) << ")\n";
        return kExitCheckFailed;
    }
    return kExitOk;
}

int cmd_poly_error(const PolyArgs& a, std::ostream& out, std::ostream& err) {
    const Json in = read_json_file(a.poly_path);
    const ChebPoly p = cheb_from_json(in);
    if (!in.contains("target")) throw InvalidArgument("'" + a.poly_path + "' has no 'target' record");
    const auto target = in.at("target").get<ApproxTarget>();
    target.validate();
    std::size_t grid = 8192;
    if (a.error_grid) grid = *a.error_grid;
    else if (in.contains("certificate")) grid = in.at("certificate").at("grid_size").get<std::size_t>();
    const Certificate cert = certify(p, target, grid);

    Json j{{"config", {{"subcommand", "poly error"}, {"poly", a.poly_path}, {"grid", grid}}},
           {"target", target},
           {"certificate", cert}};
    if (in.contains("certificate")) j["stored_certificate"] = in.at("certificate");
    emit(dump(j), a.out, out);
    if (!cert.passed()) {
        err << "check failed: certificate (grid sup error " << format_double(cert.grid_sup_error) << " > bound "
            << format_double(cert.bound) << ")\n";
        return kExitCheckFailed;
    }
    return kExitOk;
}

// ---- trace ------------------------------------------------------------------

struct TraceArgs {
    std::string matrix_path;
    std::size_t d = 0;
    double lambda_min = 1.0;
    double lambda_max = 0.0;
    std::string func = "inv";
    std::string backend = "cheb";
    std::optional<double> kappa;
    double delta = 0.1;
    std::size_t steps = 10;
    std::size_t probes = 32;
    std::string probe_kind = "rademacher";
    std::uint64_t seed = 0;
    bool no_forms = false;
    std::string out;
};

int cmd_trace(const TraceArgs& a, std::ostream& out, std::ostream& err) {
    const RngState base{a.seed, 0};
    Json matrix_info;
    std::optional<SymMatrix> a_mat;
    if (!a.matrix_path.empty()) {
        ParsedMatrix parsed = parse_matrix_file(a.matrix_path);
        matrix_info = {{"source", a.matrix_path},
                       {"format", parsed.format},
                       {"max_asymmetry", parsed.max_asymmetry}};
        a_mat = std::move(parsed.matrix);
    } else {
        if (a.d == 0) throw InvalidArgument("either --matrix or --d with --lambda-max is required");
        if (!(a.lambda_max >= a.lambda_min) || !(a.lambda_min > 0.0))
            throw InvalidArgument("generated spectrum needs 0 < --lambda-min <= --lambda-max");
        a_mat = random_spd(a.d, a.lambda_min, a.lambda_max, base.derive(0));
        matrix_info = {{"source", "generated"}, {"lambda_min", a.lambda_min}, {"lambda_max", a.lambda_max}};
    }
    const SymMatrix& mat = *a_mat;
    matrix_info["dim"] = mat.dim();

    const ProbeSpec probes{parse_probe_kind(a.probe_kind), a.probes, base.derive(1)};
    if (probes.count < 1) throw InvalidArgument("--probes must be at least 1");

    Json config{{"subcommand", "trace"},   {"func", a.func},         {"backend", a.backend},
                {"probes", a.probes},      {"probe_kind", a.probe_kind}, {"seed", a.seed}};
    TraceEstimate est;
    std::optional<double> bias;
    std::optional<bool> in_interval;
    try {
        if (a.backend == "cheb") {
            if (!a.kappa) throw InvalidArgument("--backend cheb requires --kappa");
            const auto kind = parse_target_kind(a.func);
            if (kind == ApproxTarget::Kind::monomial) throw InvalidArgument("--backend cheb supports inv and invsqrt");
            const ApproxTarget target = make_target(a.func, *a.kappa, a.delta, 1);
            config["kappa"] = *a.kappa;
            config["delta"] = a.delta;
            ChebPoly poly = build_poly(target);
            const std::size_t degree = poly.degree();
            est = hutchinson(mat, ChebBackend{std::move(poly)}, probes);
            est.target = target;
            est.degree = degree;
            bias = bias_bound(target, mat.dim());
            const Vector ev = sym_eigenvalues(mat);
            in_interval = ev.front() >= 1.0 && ev.back() <= *a.kappa;
            if (!*in_interval)
                err << "warning: spectrum [" << format_double(ev.front()) << ", " << format_double(ev.back())
                    << "] is not inside [1, kappa]; bias_bound does not apply\n";
        } else if (a.backend == "lanczos") {
            config["steps"] = a.steps;
            est = hutchinson(mat, LanczosBackend{parse_matrix_function(a.func), a.steps}, probes);
        } else if (a.backend == "exact") {
            est = hutchinson(mat, ExactBackend{parse_matrix_function(a.func)}, probes);
        } else {
            throw InvalidArgument("unknown backend '" + a.backend + "'");
        }
    } catch (const InvalidArgument&) {
        throw;
    } catch (const Error& e) {
        throw Error(a.backend + " backend: " + e.what());
    }

    Json j{{"config", config},
           {"matrix", matrix_info},
           {"estimate", est.value},
           {"sample_stddev", est.sample_stddev},
           {"mvp_count", est.mvp_count},
           {"result", trace_estimate_to_json(est, !a.no_forms)},
           {"metadata", metadata()}};
    if (bias) j["bias_bound"] = *bias;
    if (in_interval) j["spectrum_within_interval"] = *in_interval;
    emit(dump(j), a.out, out);
    return kExitOk;
}

// ---- wishart ----------------------------------------------------------------

struct WishartArgs {
    std::optional<std::uint64_t> seed;
    std::string format = "csv";
    std::string out;
    std::size_t d = 0;
    std::size_t n = 0;
    std::optional<std::size_t> trials;
    std::vector<double> xs{0.01, 0.04, 0.16, 0.64};
    std::vector<double> ts{0.0, 0.25, 0.5, 1.0};
    double p = 1.0;
    double factor = 2.0;
    std::size_t budget = 0;
    std::string algo = "hutchinson";
    std::optional<std::size_t> probes;
    std::optional<std::size_t> steps;
    std::optional<double> guess;
};

struct Report {
    Json config;
    Json summary;
    Json rows = Json::array();
    std::string csv_body; ///< header and rows
    std::vector<Check> checks;
};

int finish_report(const WishartArgs& a, const Report& r, std::ostream& out, std::ostream& err) {
    if (a.format == "csv") {
        std::ostringstream os;
        write_config_comments(os, r.config);
        os << r.csv_body;
        emit(os.str(), a.out, out);
    } else {
        Json j{{"config", r.config},
               {"summary", r.summary},
               {"checks", checks_json(r.checks)},
               {"rows", r.rows},
               {"metadata", metadata()}};
        emit(dump(j), a.out, out);
    }
    return report_checks(r.checks, err);
}

Json wishart_config(const std::string& sub, const WishartArgs& a, std::size_t trials) {
    return Json{{"subcommand", "wishart " + sub}, {"seed", *a.seed}, {"d", a.d}, {"trials", trials}};
}

Report run_eigcdf(const WishartArgs& a) {
    const std::size_t trials = a.trials.value_or(20000);
    for (double x : a.xs)
        if (!(x >= 0.0 && x <= 1.0)) throw InvalidArgument("--x values must lie in [0, 1]");
    const auto rows = eig_cdf_experiment(a.d, trials, a.xs, RngState{*a.seed, 0});

    Report r;
    r.config = wishart_config("eigcdf", a, trials);
    r.config["x"] = a.xs;
    std::ostringstream os;
    CsvWriter csv(os, {"x", "threshold", "hits", "trials", "probability", "std_error"});
    for (const auto& row : rows) {
        csv.field(row.x).field(row.threshold).field(row.hits).field(row.trials).field(row.probability)
            .field(row.std_error);
        csv.end_row();
        r.rows.push_back(row);
    }
    r.csv_body = os.str();

    std::vector<CdfRow> sorted = rows;
    std::stable_sort(sorted.begin(), sorted.end(), [](const CdfRow& l, const CdfRow& rr) { return l.x < rr.x; });
    bool monotone = true;
    for (std::size_t i = 1; i < sorted.size(); ++i) monotone = monotone && sorted[i].hits >= sorted[i - 1].hits;
    r.checks.push_back({"eigcdf.monotone", monotone});
    r.summary = Json{{"monotone", monotone}};
    return r;
}

Report run_lmax(const WishartArgs& a) {
    const std::size_t trials = a.trials.value_or(10000);
    for (double t : a.ts)
        if (!(t >= 0.0)) throw InvalidArgument("--t values must be nonnegative");
    const auto rows = lambda_max_tail_experiment(a.d, trials, a.ts, RngState{*a.seed, 0});

    Report r;
    r.config = wishart_config("lmax", a, trials);
    r.config["t"] = a.ts;
    std::ostringstream os;
    CsvWriter csv(os, {"t", "threshold", "hits", "trials", "probability", "std_error", "bound"});
    bool all_within = true;
    for (const auto& row : rows) {
        csv.field(row.t).field(row.threshold).field(row.hits).field(row.trials).field(row.probability)
            .field(row.std_error).field(row.bound);
        csv.end_row();
        r.rows.push_back(row);
        if (row.asserted && !row.within_bound) {
            all_within = false;
            r.checks.push_back({"lmax.tail_bound(t=" + format_double(row.t) + ")", false});
        }
    }
    if (all_within) r.checks.push_back({"lmax.tail_bound", true});
    r.csv_body = os.str();
    r.summary = Json{{"within_bound", all_within}};
    return r;
}

Report run_invtrace(const WishartArgs& a) {
    const std::size_t trials = a.trials.value_or(2000);
    const auto rep = inv_trace_tail_experiment(a.d, trials, a.p, RngState{*a.seed, 0});

    Report r;
    r.config = wishart_config("invtrace", a, trials);
    r.config["p"] = a.p;
    std::ostringstream os;
    CsvWriter csv(os, {"trial", "trace", "scaled_trace", "lambda_min", "lambda_max", "dropped"});
    for (std::size_t i = 0; i < rep.records.size(); ++i) {
        const auto& t = rep.records[i];
        csv.field(i).field(t.trace).field(t.scaled_trace).field(t.lambda_min).field(t.lambda_max).field(t.dropped);
        csv.end_row();
        r.rows.push_back({{"trial", i},
                          {"trace", t.trace},
                          {"scaled_trace", t.scaled_trace},
                          {"lambda_min", t.lambda_min},
                          {"lambda_max", t.lambda_max},
                          {"dropped", t.dropped}});
    }
    r.csv_body = os.str();
    r.summary = inv_trace_summary(rep);
    return r;
}

Report run_posterior(const WishartArgs& a) {
    const std::size_t trials = a.trials.value_or(2000);
    const auto rep = posterior_distribution_test(a.d, a.n, trials, RngState{*a.seed, 0});

    Report r;
    r.config = wishart_config("posterior", a, trials);
    r.config["n"] = a.n;
    std::ostringstream os;
    CsvWriter csv(os, {"trial", "posterior_trace", "posterior_scaled_lambda_min", "fresh_trace",
                       "fresh_scaled_lambda_min", "uncorrected_trace", "block_residual", "interlacing_ok"});
    for (std::size_t i = 0; i < trials; ++i) {
        csv.field(i).field(rep.posterior_trace[i]).field(rep.posterior_scaled_lambda_min[i]).field(rep.fresh_trace[i])
            .field(rep.fresh_scaled_lambda_min[i]).field(rep.uncorrected_trace[i]).field(rep.block_residual[i])
            .field(static_cast<bool>(rep.interlacing_ok[i]));
        csv.end_row();
        r.rows.push_back({{"trial", i},
                          {"posterior_trace", rep.posterior_trace[i]},
                          {"posterior_scaled_lambda_min", rep.posterior_scaled_lambda_min[i]},
                          {"fresh_trace", rep.fresh_trace[i]},
                          {"fresh_scaled_lambda_min", rep.fresh_scaled_lambda_min[i]},
                          {"uncorrected_trace", rep.uncorrected_trace[i]},
                          {"block_residual", rep.block_residual[i]},
                          {"interlacing_ok", static_cast<bool>(rep.interlacing_ok[i])}});
    }
    r.csv_body = os.str();
    r.summary = posterior_summary(rep);

    const double worst = *std::max_element(rep.block_residual.begin(), rep.block_residual.end());
    r.checks.push_back({"posterior.block_identity", worst <= 1e-8});
    r.checks.push_back({"posterior.interlacing",
                        std::all_of(rep.interlacing_ok.begin(), rep.interlacing_ok.end(), [](bool b) { return b; })});
    r.checks.push_back({"posterior.trace_ks", rep.trace_test.p_value > 0.01});
    r.checks.push_back({"posterior.lambda_min_ks", rep.lambda_min_test.p_value > 0.01});
    if (a.n > 0) r.checks.push_back({"posterior.negative_control", rep.negative_control.p_value < 0.01});
    return r;
}

Report run_game(const WishartArgs& a) {
    const std::size_t trials = a.trials.value_or(200);
    if (a.budget == 0) throw InvalidArgument("--budget must be at least 1");
    GameAlgorithm algo;
    if (a.algo == "exact") {
        algo = GameAlgorithm::exact_recovery();
    } else if (a.algo == "hutchinson") {
        if (a.probes.has_value() != a.steps.has_value())
            throw InvalidArgument("--probes and --steps must be given together");
        algo = a.probes ? GameAlgorithm::hutchinson_krylov(*a.probes, *a.steps)
                        : GameAlgorithm::hutchinson_for_budget(a.d, a.budget);
    } else if (a.algo == "constant") {
        if (!a.guess) throw InvalidArgument("--algo constant requires --guess");
        algo = GameAlgorithm::constant_guess(*a.guess);
    } else {
        throw InvalidArgument("unknown algorithm '" + a.algo + "'");
    }
    const auto res = query_game(a.d, a.p, a.factor, algo, a.budget, trials, RngState{*a.seed, 0});

    Report r;
    r.config = wishart_config("game", a, trials);
    r.config["p"] = a.p;
    r.config["C"] = a.factor;
    r.config["budget"] = a.budget;
    r.config["algorithm"] = res.algorithm;
    std::ostringstream os;
    CsvWriter csv(os, {"trial", "estimate", "true_trace", "success", "queries_used", "violation"});
    for (std::size_t i = 0; i < res.records.size(); ++i) {
        const auto& t = res.records[i];
        csv.field(i).field(t.estimate).field(t.true_trace).field(t.success).field(t.queries_used).field(t.violation);
        csv.end_row();
        r.rows.push_back({{"trial", i},
                          {"estimate", t.estimate},
                          {"true_trace", t.true_trace},
                          {"success", t.success},
                          {"queries_used", t.queries_used},
                          {"violation", t.violation}});
    }
    r.csv_body = os.str();
    r.summary = game_summary(res);
    r.checks.push_back({"game.budget_respected", res.violations == 0});
    if (algo.kind == GameAlgorithm::Kind::exact_recovery)
        r.checks.push_back({"game.exact_recovery_succeeds", res.success_count == res.trials});
    return r;
}

// ---- verify -----------------------------------------------------------------

int cmd_verify(bool quick, const std::vector<int>& only, std::ostream& out) {
    const VerifyScale scale = quick ? VerifyScale::quick : VerifyScale::full;
    bool ok = true;
    for (const auto& c : acceptance_criteria()) {
        if (!only.empty() && std::find(only.begin(), only.end(), c.id) == only.end()) continue;
        const CriterionResult res = run_criterion(c, scale);
        out << format_result(res) << '\n';
        out.flush();
        ok = ok && res.passed;
    }
    return ok ? kExitOk : kExitCheckFailed;
}

int dispatch(const std::function<int()>& body, std::ostream& err) {
    try {
        return body();
    } catch (const InvalidArgument& e) {
        err << "error: " << e.what() << '\n';
        return kExitUsage;
    } catch (const CertificateError& e) {
        err << "check failed: certificate: " << e.what() << '\n';
        return kExitCheckFailed;
    } catch (const ParseError& e) {
        err << "parse error: " << e.what() << '\n';
        return kExitIo;
    } catch (const IoError& e) {
        err << "i/o error: " << e.what() << '\n';
        return kExitIo;
    } catch (const std::filesystem::filesystem_error& e) {
        err << "i/o error: " << e.what() << '\n';
        return kExitIo;
    } catch (const Json::parse_error& e) {
        err << "parse error: " << e.what() << '\n';
        return kExitIo;
    } catch (const Json::exception& e) {
        err << "error: malformed JSON input: " << e.what() << '\n';
        return kExitIo;
    } catch (const std::exception& e) {
        err << "error: " << e.what() << '\n';
        return kExitRuntime;
    }
}

} // namespace

int run_cli(const std::vector<std::string>& args, std::ostream& out, std::ostream& err) {
    CLI::App app{"Polynomial, Krylov and Wishart trace experiments", "tracebounds"};
    app.require_subcommand(1);

    PolyArgs poly;
    auto* poly_cmd = app.add_subcommand("poly", "Build or re-certify polynomial approximations");
    poly_cmd->require_subcommand(1);
    auto* poly_build = poly_cmd->add_subcommand("build", "Construct and certify a polynomial");
    poly_build->add_option("--func", poly.func, "inv, invsqrt or monomial")
        ->check(CLI::IsMember({"inv", "invsqrt", "inv_sqrt", "monomial"}));
    poly_build->add_option("--kappa", poly.kappa, "Upper end of [1, kappa]");
    poly_build->add_option("--delta", poly.delta, "Relative accuracy");
    poly_build->add_option("--s", poly.s, "Monomial power");
    poly_build->add_option("--grid", poly.grid, "Certification grid size")->capture_default_str();
    poly_build->add_option("--out", poly.out, "Output file (default stdout)");
    auto* poly_error = poly_cmd->add_subcommand("error", "Re-certify a stored polynomial");
    poly_error->add_option("--poly", poly.poly_path, "Polynomial JSON file")->required();
    poly_error->add_option("--grid", poly.error_grid, "Grid size (default: the stored certificate's)");
    poly_error->add_option("--out", poly.out, "Output file (default stdout)");

    TraceArgs tr;
    auto* trace_cmd = app.add_subcommand("trace", "Hutchinson estimate of tr(f(A))");
    auto* matrix_opt = trace_cmd->add_option("--matrix", tr.matrix_path, "MatrixMarket or raw dense file");
    auto* d_opt = trace_cmd->add_option("--d", tr.d, "Dimension of a generated SPD matrix");
    d_opt->excludes(matrix_opt);
    trace_cmd->add_option("--lambda-min", tr.lambda_min, "Smallest eigenvalue of the generated matrix")
        ->needs(d_opt);
    trace_cmd->add_option("--lambda-max", tr.lambda_max, "Largest eigenvalue of the generated matrix")
        ->needs(d_opt);
    trace_cmd->add_option("--func", tr.func, "inv, invsqrt, exp or identity");
    trace_cmd->add_option("--backend", tr.backend, "cheb, lanczos or exact")
        ->check(CLI::IsMember({"cheb", "lanczos", "exact"}));
    trace_cmd->add_option("--kappa", tr.kappa, "Spectrum bound for the cheb backend");
    trace_cmd->add_option("--delta", tr.delta, "Relative accuracy for the cheb backend");
    trace_cmd->add_option("--m", tr.steps, "Lanczos steps")->check(CLI::PositiveNumber);
    trace_cmd->add_option("--probes", tr.probes, "Number of probe vectors")->check(CLI::PositiveNumber);
    trace_cmd->add_option("--probe-kind", tr.probe_kind, "rademacher or gaussian")
        ->check(CLI::IsMember({"rademacher", "gaussian"}));
    trace_cmd->add_option("--seed", tr.seed, "Random seed")->capture_default_str();
    trace_cmd->add_flag("--no-forms", tr.no_forms, "Omit per-probe quadratic forms");
    trace_cmd->add_option("--out", tr.out, "Output file (default stdout)");

    WishartArgs w;
    auto* wishart_cmd = app.add_subcommand("wishart", "Wishart experiments");
    wishart_cmd->require_subcommand(1);
    auto common = [&w](CLI::App* sub) {
        sub->add_option("--seed", w.seed, "Random seed")->required();
        sub->add_option("--format", w.format, "csv or json")->check(CLI::IsMember({"csv", "json"}));
        sub->add_option("--out", w.out, "Output file (default stdout)");
        sub->add_option("--d", w.d, "Dimension")->required();
        sub->add_option("--trials", w.trials, "Number of trials");
    };
    auto* eigcdf = wishart_cmd->add_subcommand("eigcdf", "Empirical CDF of d^2 * lambda_min");
    common(eigcdf);
    eigcdf->add_option("--x", w.xs, "Points x (comma separated)")->delimiter(',');
    auto* lmax = wishart_cmd->add_subcommand("lmax", "Upper tail of lambda_max");
    common(lmax);
    lmax->add_option("--t", w.ts, "Offsets t (comma separated)")->delimiter(',');
    auto* invtrace = wishart_cmd->add_subcommand("invtrace", "Distribution of tr(W^-p)/d^(2p)");
    common(invtrace);
    invtrace->add_option("--p", w.p, "Power p > 1/2");
    auto* posterior = wishart_cmd->add_subcommand("posterior", "Posterior of W after n canonical queries");
    common(posterior);
    posterior->add_option("--n", w.n, "Number of queries")->required();
    auto* game = wishart_cmd->add_subcommand("game", "Metered query game for tr(W^-p)");
    common(game);
    game->add_option("--p", w.p, "Power p > 1/2");
    game->add_option("--C", w.factor, "Approximation factor C > 1");
    game->add_option("--budget", w.budget, "Product budget n")->required();
    game->add_option("--algo", w.algo, "exact, hutchinson or constant")
        ->check(CLI::IsMember({"exact", "hutchinson", "constant"}));
    game->add_option("--probes", w.probes, "Hutchinson probes N_v");
    game->add_option("--steps", w.steps, "Lanczos steps m");
    game->add_option("--guess", w.guess, "Output of the constant algorithm");

    bool quick = false;
    std::vector<int> only;
    auto* verify = app.add_subcommand("verify", "Run the invariant suite");
    verify->add_flag("--quick", quick, "Reduced trial counts");
    verify->add_option("--only", only, "Criterion numbers to run")->delimiter(',');

    std::vector<const char*> argv{"tracebounds"};
    for (const auto& s : args) argv.push_back(s.c_str());
    try {
        app.parse(static_cast<int>(argv.size()), argv.data());
    } catch (const CLI::ParseError& e) {
        const int code = app.exit(e, out, err);
        return code == 0 ? kExitOk : kExitUsage;
    }

    if (poly_build->parsed()) return dispatch([&] { return cmd_poly_build(poly, out, err); }, err);
    if (poly_error->parsed()) return dispatch([&] { return cmd_poly_error(poly, out, err); }, err);
    if (trace_cmd->parsed()) return dispatch([&] { return cmd_trace(tr, out, err); }, err);
    if (verify->parsed()) return dispatch([&] { return cmd_verify(quick, only, out); }, err);

    const std::pair<CLI::App*, Report (*)(const WishartArgs&)> experiments[] = {
        {eigcdf, run_eigcdf}, {lmax, run_lmax}, {invtrace, run_invtrace}, {posterior, run_posterior}, {game, run_game}};
    for (const auto& [sub, run] : experiments) {
        if (sub->parsed()) return dispatch([&, run = run] { return finish_report(w, run(w), out, err); }, err);
    }
    err << "error: no subcommand\n";
    return kExitUsage;
}

} // namespace tracebounds
