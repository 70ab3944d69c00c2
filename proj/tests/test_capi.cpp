// Exercises the shared library through its C header only.
#include <cmath>
#include <filesystem>
#include <fstream>
#include <string>

#include <unistd.h>

#include "doctest.h"
#include "sba/sba.h"

namespace fs = std::filesystem;

namespace {

fs::path scratch(const std::string& name) {
    const auto dir = fs::temp_directory_path() / ("sba_capi_" + std::to_string(::getpid()));
    fs::create_directories(dir);
    return dir / name;
}

}  // namespace

TEST_SUITE("capi") {

TEST_CASE("measures, arrays and approximations") {
    sba_measure* g = nullptr;
    REQUIRE(sba_measure_parse("1 uniform 0 1\n", &g) == SBA_OK);
    double mean = 0.0;
    REQUIRE(sba_measure_mean(g, &mean) == SBA_OK);
    CHECK(mean == doctest::Approx(0.5));

    sba_array* a = nullptr;
    REQUIRE(sba_array_build(g, 2, &a) == SBA_OK);
    CHECK(sba_array_depth(a) == 2);
    double v = 0.0;
    REQUIRE(sba_array_at(a, 3, 7, &v) == SBA_OK);
    CHECK(v == 0.875);
    CHECK(sba_array_at(a, 3, 9, &v) == SBA_ERR_INVALID_ARGUMENT);
    size_t violations = 99;
    REQUIRE(sba_array_violations(a, &violations) == SBA_OK);
    CHECK(violations == 0);
    CHECK(sba_array_is_regular(a, 3) == 1);

    const auto path = scratch("array.txt").string();
    REQUIRE(sba_array_write(a, path.c_str()) == SBA_OK);
    sba_array* back = nullptr;
    REQUIRE(sba_array_read(path.c_str(), &back) == SBA_OK);
    REQUIRE(sba_array_at(back, 2, 1, &v) == SBA_OK);
    CHECK(v == 0.25);

    sba_discrete* d = nullptr;
    REQUIRE(sba_discrete_from_array(a, &d) == SBA_OK);
    CHECK(sba_discrete_size(d) == 4);
    double atom = 0.0, weight = 0.0;
    REQUIRE(sba_discrete_get(d, 0, &atom, &weight) == SBA_OK);
    CHECK(atom == 0.125);
    CHECK(weight == doctest::Approx(0.25));
    CHECK(sba_discrete_get(d, 4, &atom, &weight) == SBA_ERR_INVALID_ARGUMENT);
    double w1 = 0.0;
    REQUIRE(sba_wasserstein_to_measure(g, d, 1.0, &w1) == SBA_OK);
    CHECK(w1 == doctest::Approx(1.0 / 16));

    sba_discrete* same = nullptr;
    REQUIRE(sba_approximate(g, 2, &same) == SBA_OK);
    REQUIRE(sba_wasserstein(d, same, 2.0, &w1) == SBA_OK);
    CHECK(w1 == 0.0);
    CHECK(sba_discrete_mean(same) == doctest::Approx(0.5));

    sba_discrete_free(same);
    sba_discrete_free(d);
    sba_array_free(back);
    sba_array_free(a);
    sba_measure_free(g);
}

TEST_CASE("errors carry status codes and messages") {
    sba_measure* g = nullptr;
    CHECK(sba_measure_parse("1 blob 0\n", &g) == SBA_ERR_PARSE);
    CHECK(g == nullptr);
    CHECK(std::string(sba_last_error()).find("line 1") != std::string::npos);
    CHECK(sba_measure_parse("0.5 point 0\n", &g) == SBA_ERR_MODEL);
    CHECK(sba_measure_parse(nullptr, &g) == SBA_ERR_INVALID_ARGUMENT);
    sba_array* a = nullptr;
    CHECK(sba_array_read("/nonexistent/array.txt", &a) == SBA_ERR_IO);
    CHECK(std::string(sba_status_name(SBA_ERR_DATA)) == "data error");
    sba_config* c = nullptr;
    CHECK(sba_config_parse("{\"unknown\": 1}", &c) == SBA_ERR_PARSE);
    // Freeing null handles is a no-op.
    sba_measure_free(nullptr);
    sba_trace_free(nullptr);
}

TEST_CASE("fit through the C interface") {
    sba_config* c = nullptr;
    REQUIRE(sba_config_parse(R"({"n": 2,
        "node_laws": {"default": {"kind": "normal", "mean": 0, "sd": 3},
                      "overrides": [{"row": 1, "position": 1, "law": {"kind": "degenerate", "value": 0}}]},
        "mcmc": {"iterations": 300, "burn_in": 100, "thin": 2, "keep_mixing": true}})",
                             &c) == SBA_OK);
    CHECK(sba_config_depth(c) == 2);
    CHECK(sba_config_has_seed(c) == 0);
    const double ys[] = {-2.1, -1.8, 2.2, 1.9, -2.0, 2.05};
    sba_trace* t = nullptr;
    CHECK(sba_fit(c, ys, 6, &t) == SBA_ERR_INVALID_ARGUMENT);
    sba_config_set_seed(c, 5);
    CHECK(sba_fit(c, ys, 0, &t) == SBA_ERR_DATA);
    REQUIRE(sba_config_set_chains(c, 2) == SBA_OK);
    REQUIRE(sba_fit(c, ys, 6, &t) == SBA_OK);
    CHECK(sba_trace_draws(t) == 200);
    double waic = 0, lppd = 0, p = 0, lpml = 0;
    REQUIRE(sba_trace_waic(t, &waic, &lppd, &p) == SBA_OK);
    REQUIRE(sba_trace_lpml(t, &lpml) == SBA_OK);
    CHECK(std::isfinite(waic));
    CHECK(waic == doctest::Approx(-2 * (lppd - p)));

    const auto dir = scratch("fit");
    REQUIRE(sba_trace_write(t, dir.string().c_str()) == SBA_OK);
    for (const char* name : {"loglik.csv", "density.csv", "band.csv", "mixing.jsonl", "metrics.json", "manifest.json"})
        CHECK(fs::exists(dir / name));

    sba_loglik* ll = nullptr;
    REQUIRE(sba_loglik_read((dir / "loglik.csv").string().c_str(), &ll) == SBA_OK);
    double again = 0;
    REQUIRE(sba_loglik_waic(ll, &again, nullptr, nullptr) == SBA_OK);
    CHECK(again == doctest::Approx(waic).epsilon(1e-12));
    sba_loglik_free(ll);
    sba_trace_free(t);

    const auto prior = scratch("prior.jsonl").string();
    double mean = 1, lo = 1, hi = 1;
    REQUIRE(sba_prior_sample(c, 50, prior.c_str(), &mean, &lo, &hi) == SBA_OK);
    CHECK(std::abs(lo) < 1e-10);
    CHECK(std::abs(hi) < 1e-10);
    std::ifstream in(prior);
    int lines = 0;
    for (std::string s; std::getline(in, s);) ++lines;
    CHECK(lines == 50);
    sba_config_free(c);
}

}  // TEST_SUITE
