#include "doctest.h"

#include "tracebounds/errors.hpp"
#include "tracebounds/format.hpp"
#include "tracebounds/matrix_io.hpp"
#include "tracebounds/poly_approx.hpp"
#include "tracebounds/random.hpp"
#include "tracebounds/serialize.hpp"

#include <cstring>
#include <sstream>

using namespace tracebounds;

namespace {

ParsedMatrix parse(const std::string& text) {
    std::istringstream in(text);
    return parse_matrix(in);
}

std::string parse_error_message(const std::string& text) {
    try {
        parse(text);
    } catch (const ParseError& e) {
        return e.what();
    }
    return {};
}

bool same_bits(double a, double b) { return std::memcmp(&a, &b, sizeof a) == 0; }

} // namespace

TEST_SUITE("io") {

TEST_CASE("raw identity") {
    const auto m = parse("2\n1 0\n0 1");
    CHECK(m.format == "raw");
    CHECK(max_abs_diff(m.matrix.matrix(), Matrix::identity(2)) == 0.0);
}

TEST_CASE("MatrixMarket symmetric expands the lower triangle") {
    const auto m = parse("%%MatrixMarket matrix coordinate real symmetric\n"
                         "% comment\n"
                         "2 2 3\n"
                         "1 1 2.0\n"
                         "2 1 1.0\n"
                         "2 2 3.0\n");
    CHECK(m.format == "matrix-market");
    CHECK(max_abs_diff(m.matrix.matrix(), Matrix({{2.0, 1.0}, {1.0, 3.0}})) == 0.0);
}

TEST_CASE("general MatrixMarket input is symmetrized and the asymmetry reported") {
    const auto m = parse("%%MatrixMarket matrix coordinate real general\n"
                         "2 2 4\n1 1 1\n1 2 2\n2 1 2.5\n2 2 4\n");
    CHECK(m.max_asymmetry == doctest::Approx(0.5));
    CHECK(m.matrix(0, 1) == doctest::Approx(2.25));
    CHECK(m.matrix(1, 0) == doctest::Approx(2.25));
}

TEST_CASE("parse errors name the line") {
    CHECK(parse_error_message("2\n1 0\n0\n").find("line 3") != std::string::npos);
    CHECK(parse_error_message("%%MatrixMarket matrix coordinate real symmetric\n2 3 1\n1 1 1\n").find("line 2") !=
          std::string::npos);
    CHECK(parse_error_message("%%MatrixMarket matrix coordinate real symmetric\n2 2 2\n1 1 1\n3 1 1\n")
              .find("line 4") != std::string::npos);
    CHECK(parse_error_message("2\n1 x\n0 1\n").find("line 2") != std::string::npos);
    CHECK_FALSE(parse_error_message("%%MatrixMarket matrix array real general\n2 2\n1\n0\n0\n1\n").empty());
}

TEST_CASE("missing files raise filesystem errors") {
    CHECK_THROWS_AS(parse_matrix_file("/nonexistent/matrix.txt"), std::filesystem::filesystem_error);
}

TEST_CASE("raw writer round trip") {
    const SymMatrix a = random_spd(5, 0.1, 7.0, RngState{80, 0});
    std::ostringstream out;
    write_raw_matrix(out, a.matrix());
    const auto back = parse(out.str());
    CHECK(max_abs_diff(back.matrix.matrix(), a.matrix()) == 0.0);
}

TEST_CASE("format_double is shortest and round-trips") {
    CHECK(format_double(0.1) == "0.1");
    CHECK(format_double(1e300) == "1e+300");
    CHECK(format_double(std::nan("")) == "nan");
    Rng rng(RngState{81, 0});
    for (int i = 0; i < 1000; ++i) {
        const double v = rng.normal() * std::pow(10.0, static_cast<int>(rng.bits() % 40) - 20);
        CHECK(same_bits(std::stod(format_double(v)), v));
    }
}

TEST_CASE("CSV writer enforces column counts") {
    std::ostringstream out;
    CsvWriter csv(out, {"a", "b"});
    csv.field(std::size_t{1}).field(0.5);
    csv.end_row();
    CHECK(out.str() == "a,b\n1,0.5\n");
    csv.field(true);
    CHECK_THROWS_AS(csv.end_row(), Error);
}

TEST_CASE("ChebPoly JSON round trip is bit exact") {
    const ChebPoly p = inv_sqrt_poly(64.0, 0.01);
    const std::string text = cheb_to_json(p).dump();
    const ChebPoly q = Json::parse(text).get<ChebPoly>();
    CHECK(q.interval() == p.interval());
    REQUIRE(q.coeffs().size() == p.coeffs().size());
    for (std::size_t i = 0; i < p.coeffs().size(); ++i) CHECK(same_bits(q.coeffs()[i], p.coeffs()[i]));
    CHECK_THROWS_AS(cheb_from_json(Json{{"coeffs", {1.0}}}), InvalidArgument);
}

TEST_CASE("target and certificate JSON round trips") {
    for (const auto& t : {ApproxTarget::inv(4.0, 0.1), ApproxTarget::inv_sqrt(16.0, 0.01), ApproxTarget::monomial(7, 0.3)}) {
        const auto back = Json::parse(Json(t).dump()).get<ApproxTarget>();
        CHECK(back.kind == t.kind);
        CHECK(back.delta == t.delta);
        CHECK(back.power == t.power);
        if (t.kind != ApproxTarget::Kind::monomial) CHECK(back.kappa == t.kappa);
    }
    const Certificate c = certify(inv_poly(16.0, 0.1), ApproxTarget::inv(16.0, 0.1), 4096);
    const auto back = Json::parse(Json(c).dump()).get<Certificate>();
    CHECK(back.degree == c.degree);
    CHECK(back.grid_size == c.grid_size);
    CHECK(same_bits(back.grid_sup_error, c.grid_sup_error));
    CHECK(same_bits(back.bound, c.bound));
}

TEST_CASE("TraceEstimate JSON round trip") {
    const SymMatrix a = random_spd(10, 1.0, 4.0, RngState{82, 0});
    const auto est = estimate_tr_f(a, ApproxTarget::inv(4.0, 0.1), 17, RngState{82, 1}, ProbeKind::gaussian);
    const auto back = trace_estimate_from_json(Json::parse(trace_estimate_to_json(est).dump()));
    CHECK(same_bits(back.value, est.value));
    CHECK(same_bits(back.sample_stddev, est.sample_stddev));
    CHECK(back.mvp_count == est.mvp_count);
    CHECK(back.backend == est.backend);
    CHECK(back.degree == est.degree);
    REQUIRE(back.target.has_value());
    REQUIRE(back.quadratic_forms.size() == est.quadratic_forms.size());
    for (std::size_t i = 0; i < est.quadratic_forms.size(); ++i)
        CHECK(same_bits(back.quadratic_forms[i], est.quadratic_forms[i]));
    CHECK_FALSE(trace_estimate_to_json(est, false).contains("quadratic_forms"));
}

} // TEST_SUITE
