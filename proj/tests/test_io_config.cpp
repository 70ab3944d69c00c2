#include <cmath>
#include <sstream>
#include <string>

#include "doctest.h"
#include "sba/config.hpp"
#include "sba/error.hpp"
#include "sba/io.hpp"

using namespace sba;

namespace {

ErrorKind kind_of(const std::function<void()>& f) {
    try {
        f();
    } catch (const Error& e) {
        return e.kind();
    }
    FAIL("no error raised");
    return ErrorKind::invalid_argument;
}

}  // namespace

TEST_SUITE("io") {

TEST_CASE("arrays round-trip exactly") {
    const auto array = build_sba(parse_measure_spec("0.3 point 0.1\n0.7 uniform -1 2.5\n"), 4);
    std::stringstream ss;
    write_array(ss, array);
    CHECK(read_array(ss) == array);

    std::stringstream bounded;
    write_array(bounded, build_sba(parse_measure_spec("domain 0 1\n1 uniform 0 1\n"), 2));
    const auto back = read_array(bounded);
    CHECK(back.domain() == Domain(0, 1));
    CHECK(back.at(3, 7) == 0.875);
}

TEST_CASE("array reader rejects broken input") {
    std::istringstream short_row("domain -inf inf\n0.5\n0.25 0.5\n");
    CHECK(kind_of([&] { read_array(short_row); }) == ErrorKind::parse);
    std::istringstream invalid("domain -inf inf\n0.5\n0.6 0.5 0.7\n");
    CHECK(kind_of([&] { read_array(invalid); }) == ErrorKind::model);
}

TEST_CASE("measure specifications") {
    const auto g = parse_measure_spec("# four parts\n1/4 uniform -2 -1\n1/4 point -1\n1/4 point 1\n1/4 uniform 1 2\n");
    CHECK(g.components().size() == 4);
    CHECK(g.cdf(0.0) == doctest::Approx(0.5));
    try {
        parse_measure_spec("1/2 point 0\n1/2 spike 1\n");
        FAIL("expected a parse error");
    } catch (const Error& e) {
        CHECK(e.kind() == ErrorKind::parse);
        CHECK(std::string(e.what()).find("line 2") != std::string::npos);
    }
    CHECK(kind_of([] { parse_measure_spec("0.5 point 0\n"); }) == ErrorKind::model);
}

TEST_CASE("discrete csv and data csv") {
    const DiscreteMeasure m({-1.0, 0.25, 3.0}, {0.2, 0.3, 0.5});
    std::stringstream ss;
    write_discrete_csv(ss, m);
    const auto back = read_discrete_csv(ss);
    CHECK(back.atoms() == m.atoms());
    CHECK(back.weights() == m.weights());

    std::istringstream with_header("velocity\n9.172\n9.35\n\n");
    CHECK(read_data_csv(with_header) == std::vector<double>{9.172, 9.35});
    std::istringstream bare("1.5\n-2\n");
    CHECK(read_data_csv(bare).size() == 2);
    std::istringstream broken("1.5\nabc\n");
    CHECK(kind_of([&] { read_data_csv(broken); }) == ErrorKind::parse);
}

TEST_CASE("matrices and formatting") {
    const std::vector<std::vector<double>> rows{{0.1, -2.0}, {1.0 / 3, 1e-300}};
    std::stringstream ss;
    write_matrix_csv(ss, rows, "obs");
    CHECK(ss.str().rfind("obs1,obs2\n", 0) == 0);
    CHECK(read_matrix_csv(ss) == rows);
    CHECK(format_double(-kInf) == "-inf");
    CHECK(std::stod(format_double(0.1)) == 0.1);
}

}  // TEST_SUITE

TEST_SUITE("config") {

TEST_CASE("galaxy-style configuration") {
    const auto rc = parse_run_config(R"({
        // comments are allowed
        "kernel": "gaussian", "variant": "parsimonious", "n": 3,
        "node_laws": {"default": {"kind": "normal", "mean": 30.0, "sd": 7.65}},
        "scale_prior": {"kind": "inverse_gamma", "shape": 0.5, "rate": 1.5},
        "mcmc": {"iterations": 2000, "burn_in": 200, "thin": 10, "seed": 7}
    })");
    CHECK(rc.fit.n == 3);
    CHECK(rc.fit.family.default_law() == NodeLaw::normal(30.0, 7.65));
    CHECK(rc.fit.scale_prior == ScaleLaw::inverse_gamma(0.5, 1.5));
    CHECK(rc.has_seed);
    CHECK(rc.fit.seed == 7);
    CHECK(rc.fit.retained_draws() == 180);
    CHECK(rc.fit.family.domain() == Domain::real_line());
    CHECK(fit_config_to_json(rc.fit)["n"] == 3);
}

TEST_CASE("overrides, domains and defaults") {
    const auto rc = parse_run_config(R"({
        "kernel": "beta", "n": 2,
        "node_laws": {"default": {"kind": "uniform", "lower": 0, "upper": 1},
                      "overrides": [{"row": 1, "position": 1, "law": {"kind": "degenerate", "value": 0.4}}]},
        "scale_prior": {"kind": "gamma", "shape": 2, "rate": 0.5},
        "mcmc": {"iterations": 10}
    })");
    CHECK(rc.fit.kernel == KernelKind::beta);
    CHECK(rc.fit.family.domain() == Domain(0, 1));
    CHECK(rc.fit.family.root_is_degenerate());
    CHECK_FALSE(rc.has_seed);

    const auto general = parse_run_config(R"({"variant": "general", "n": 2, "m2": 3,
        "node_laws": {"default": {"kind": "normal", "mean": 0, "sd": 1}}, "mcmc": {"iterations": 10}})");
    CHECK(general.fit.alpha == std::vector<double>{1, 1, 1});
}

TEST_CASE("configuration errors") {
    CHECK(kind_of([] { parse_run_config("{"); }) == ErrorKind::parse);
    CHECK(kind_of([] { parse_run_config(R"({"n": 2, "colour": "red"})"); }) == ErrorKind::parse);
    CHECK(kind_of([] { parse_run_config(R"({"n": "two"})"); }) == ErrorKind::parse);
    CHECK(kind_of([] {
              parse_run_config(R"({"n": 2, "node_laws": {"default": {"kind": "normal", "mean": 0, "sd": -1}}})");
          }) == ErrorKind::model);
    CHECK(kind_of([] { parse_run_config(R"({"n": 0})"); }) == ErrorKind::model);
}

}  // TEST_SUITE
