#include "tracebounds/serialize.hpp"

#include "tracebounds/errors.hpp"

#include <algorithm>

namespace tracebounds {

Json cheb_to_json(const ChebPoly& p) {
    return Json{{"interval", {p.interval().lo, p.interval().hi}}, {"coeffs", p.coeffs()}};
}

ChebPoly cheb_from_json(const Json& j) {
    if (!j.is_object() || !j.contains("interval") || !j.contains("coeffs"))
        throw InvalidArgument("polynomial JSON needs 'interval' and 'coeffs'");
    const auto& iv = j.at("interval");
    if (!iv.is_array() || iv.size() != 2) throw InvalidArgument("'interval' must be [a, b]");
    return ChebPoly({iv[0].get<double>(), iv[1].get<double>()}, j.at("coeffs").get<Vector>());
}

void to_json(Json& j, const ApproxTarget& t) {
    j = Json{{"kind", to_string(t.kind)}, {"delta", t.delta}};
    if (t.kind == ApproxTarget::Kind::monomial) j["s"] = t.power;
    else j["kappa"] = t.kappa;
}

void from_json(const Json& j, ApproxTarget& t) {
    t.kind = parse_target_kind(j.at("kind").get<std::string>());
    t.delta = j.at("delta").get<double>();
    if (t.kind == ApproxTarget::Kind::monomial) t.power = j.at("s").get<int>();
    else t.kappa = j.at("kappa").get<double>();
}

void to_json(Json& j, const Certificate& c) {
    j = Json{{"degree", c.degree},
             {"grid_size", c.grid_size},
             {"grid_sup_error", c.grid_sup_error},
             {"bound", c.bound},
             {"passed", c.passed()}};
}

void from_json(const Json& j, Certificate& c) {
    c.degree = j.at("degree").get<std::size_t>();
    c.grid_size = j.at("grid_size").get<std::size_t>();
    c.grid_sup_error = j.at("grid_sup_error").get<double>();
    c.bound = j.at("bound").get<double>();
}

void to_json(Json& j, const KsResult& r) { j = Json{{"statistic", r.statistic}, {"p_value", r.p_value}}; }

void to_json(Json& j, const CdfRow& r) {
    j = Json{{"x", r.x},         {"threshold", r.threshold},     {"hits", r.hits},
             {"trials", r.trials}, {"probability", r.probability}, {"std_error", r.std_error}};
}

void to_json(Json& j, const TailRow& r) {
    j = Json{{"t", r.t},
             {"threshold", r.threshold},
             {"hits", r.hits},
             {"trials", r.trials},
             {"probability", r.probability},
             {"std_error", r.std_error},
             {"bound", r.bound},
             {"asserted", r.asserted},
             {"within_bound", r.within_bound}};
}

Json trace_estimate_to_json(const TraceEstimate& e, bool include_forms) {
    Json j{{"value", e.value},
           {"sample_stddev", e.sample_stddev},
           {"mvp_count", e.mvp_count},
           {"backend", e.backend},
           {"probes", e.quadratic_forms.size()}};
    if (include_forms) j["quadratic_forms"] = e.quadratic_forms;
    if (e.target) {
        j["target"] = *e.target;
        j["degree"] = e.degree;
    }
    return j;
}

TraceEstimate trace_estimate_from_json(const Json& j) {
    TraceEstimate e;
    e.value = j.at("value").get<double>();
    e.sample_stddev = j.at("sample_stddev").get<double>();
    e.mvp_count = j.at("mvp_count").get<std::size_t>();
    e.backend = j.at("backend").get<std::string>();
    if (j.contains("quadratic_forms")) e.quadratic_forms = j.at("quadratic_forms").get<Vector>();
    if (j.contains("target")) {
        e.target = j.at("target").get<ApproxTarget>();
        e.degree = j.at("degree").get<std::size_t>();
    }
    return e;
}

Json inv_trace_summary(const InvTraceReport& r) {
    return Json{{"d", r.dim},          {"p", r.power},     {"trials", r.trials},
                {"dropped", r.dropped}, {"q50", r.q50},     {"q90", r.q90},
                {"q99", r.q99},         {"index_profile_q99", r.index_profile_q99}};
}

Json posterior_summary(const PosteriorTestReport& r) {
    const double worst = r.block_residual.empty()
                             ? 0.0
                             : *std::max_element(r.block_residual.begin(), r.block_residual.end());
    const auto violations = std::count(r.interlacing_ok.begin(), r.interlacing_ok.end(), false);
    return Json{{"d", r.dim},
                {"n", r.queries},
                {"trials", r.trials},
                {"trace_test", r.trace_test},
                {"lambda_min_test", r.lambda_min_test},
                {"negative_control", r.negative_control},
                {"max_relative_block_residual", worst},
                {"interlacing_violations", violations}};
}

Json game_summary(const GameResult& r) {
    return Json{{"d", r.dim},
                {"p", r.power},
                {"C", r.factor},
                {"budget", r.budget},
                {"trials", r.trials},
                {"algorithm", r.algorithm},
                {"success_count", r.success_count},
                {"success_rate", r.success_rate()},
                {"violations", r.violations}};
}

} // namespace tracebounds
