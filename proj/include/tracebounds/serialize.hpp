#pragma once

#include "tracebounds/cheb.hpp"
#include "tracebounds/poly_approx.hpp"
#include "tracebounds/stats.hpp"
#include "tracebounds/trace.hpp"
#include "tracebounds/wishart.hpp"

#include "json.hpp"

namespace tracebounds {

using Json = nlohmann::json;

/// {"interval":[a,b],"coeffs":[...]}
Json cheb_to_json(const ChebPoly& p);
/// Reads the two required keys; other keys are ignored.
ChebPoly cheb_from_json(const Json& j);

void to_json(Json& j, const ApproxTarget& t);
void from_json(const Json& j, ApproxTarget& t);
void to_json(Json& j, const Certificate& c);
void from_json(const Json& j, Certificate& c);
void to_json(Json& j, const KsResult& r);
void to_json(Json& j, const CdfRow& r);
void to_json(Json& j, const TailRow& r);

/// All TraceEstimate fields; quadratic_forms omitted when include_forms is false.
Json trace_estimate_to_json(const TraceEstimate& e, bool include_forms = true);
TraceEstimate trace_estimate_from_json(const Json& j);

Json inv_trace_summary(const InvTraceReport& r);
Json posterior_summary(const PosteriorTestReport& r);
Json game_summary(const GameResult& r);

} // namespace tracebounds

template <>
struct nlohmann::adl_serializer<tracebounds::ChebPoly> {
    static tracebounds::ChebPoly from_json(const json& j) { return tracebounds::cheb_from_json(j); }
    static void to_json(json& j, const tracebounds::ChebPoly& p) { j = tracebounds::cheb_to_json(p); }
};
