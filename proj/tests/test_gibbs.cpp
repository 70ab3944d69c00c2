#include <cmath>
#include <numeric>
#include <vector>

#include "doctest.h"
#include "sba/error.hpp"
#include "sba/gibbs.hpp"
#include "support.hpp"

using namespace sba;
using testing::ks_statistic;

namespace {

FitConfig gaussian_config(int n, NodeLaw law = NodeLaw::normal(0, 3)) {
    FitConfig c;
    c.kernel = KernelKind::gaussian;
    c.n = n;
    c.family = NodeLawFamily(n, Domain::real_line(), law);
    c.scale_prior = ScaleLaw::inverse_gamma(0.5, 1.5);
    return c;
}

// Depth-one state with locations (lo, hi) and masses (p, 1 - p) given by the
// root mu = p lo + (1 - p) hi.
ChainState two_component_state(double lo, double hi, double p, std::vector<double> phis) {
    const double root = p * lo + (1 - p) * hi;
    return ChainState(BarycenterArray(Domain::real_line(), {{root}, {lo, root, hi}}), std::move(phis));
}

double uniform_cdf(double x) { return std::clamp(x, 0.0, 1.0); }

}  // namespace

TEST_SUITE("gibbs") {

TEST_CASE("feasible intervals") {
    const auto u1 = build_sba(AnalyticMeasure::uniform(0, 1), 1);
    auto i = feasible_interval(u1, 1, 1);
    CHECK(i.lo == 0.25);
    CHECK(i.hi == 0.75);
    const auto u2 = build_sba(AnalyticMeasure::uniform(0, 1), 2);
    i = feasible_interval(u2, 2, 1);
    CHECK(i.lo == 0.125);
    CHECK(i.hi == 0.375);
    i = feasible_interval(u2, 3, 1);
    CHECK(i.lo == u2.domain().lower);
    CHECK(i.hi == u2.at(2, 1));
    // Deeper trees: the root is boxed in by its bottom-row neighbours.
    const auto u3 = build_sba(AnalyticMeasure::uniform(0, 1), 3);
    i = feasible_interval(u3, 1, 1);
    CHECK(i.lo == 0.4375);
    CHECK(i.hi == 0.5625);
}

TEST_CASE("allocation probabilities") {
    const auto config = gaussian_config(1);
    const std::vector<double> one{0.0};
    const ChainModel model(config, one);
    Rng rng(1);

    auto far = two_component_state(0, 10, 0.5, {1, 1});
    CHECK(far.weights[0] == doctest::Approx(0.5));
    for (int k = 0; k < 1000; ++k) {
        update_allocations_parsimonious(far, model, rng);
        CHECK(far.alloc_theta[0] == 0);
    }

    ChainState lone(BarycenterArray(Domain::real_line(), {{0.0}, {0.0, 0.0, 0.0}}), {1, 1});
    CHECK(lone.weights[0] == 1.0);
    CHECK(lone.weights[1] == 0.0);
    for (int k = 0; k < 1000; ++k) {
        update_allocations_parsimonious(lone, model, rng);
        CHECK(lone.alloc_theta[0] == 0);
    }

    auto mirror = two_component_state(-1, 1, 0.5, {1, 1});
    int first = 0;
    for (int k = 0; k < 10000; ++k) {
        update_allocations_parsimonious(mirror, model, rng);
        first += mirror.alloc_theta[0] == 0;
    }
    CHECK(first / 10000.0 == doctest::Approx(0.5).epsilon(0.04));
}

TEST_CASE("conjugate dispersion updates") {
    const auto config = gaussian_config(1);
    const std::vector<double> ys{1.0, 3.0, 7.0};
    const ChainModel model(config, ys);
    Rng rng(2);
    auto state = two_component_state(2, 7, 0.5, {1, 1});
    state.alloc_theta = {0, 0, 1};
    std::vector<double> cluster, singleton;
    for (int k = 0; k < 10000; ++k) {
        update_phi_gaussian(state, model, 0.5, 1.5, rng);
        cluster.push_back(state.phis[0]);
        singleton.push_back(state.phis[1]);
    }
    CHECK(ks_statistic(cluster, [](double x) { return testing::inv_gamma_cdf(x, 1.5, 2.5); }) < 0.02);
    CHECK(ks_statistic(singleton, [](double x) { return testing::inv_gamma_cdf(x, 1.0, 1.5); }) < 0.02);

    state.alloc_theta = {0, 0, 0};
    std::vector<double> empty;
    for (int k = 0; k < 10000; ++k) {
        update_phi_gaussian(state, model, 0.5, 1.5, rng);
        empty.push_back(state.phis[1]);
    }
    CHECK(ks_statistic(empty, [](double x) { return testing::inv_gamma_cdf(x, 0.5, 1.5); }) < 0.02);
}

TEST_CASE("slice dispersion update agrees with the conjugate posterior") {
    // Gaussian kernel driven through the generic slice path.
    const auto config = gaussian_config(1);
    const std::vector<double> ys{1.0, 3.0, 2.5, 0.5};
    const ChainModel model(config, ys);
    Rng rng(3);
    auto state = two_component_state(2, 7, 0.5, {1, 1});
    state.alloc_theta = {0, 0, 0, 0};
    Diagnostics diag;
    std::vector<double> draws;
    for (int k = 0; k < 100000; ++k) {
        update_phi_nonconjugate(state, model, rng, diag);
        if (k % 10 == 0) draws.push_back(state.phis[0]);
    }
    const double ss = 1.0 + 1.0 + 0.25 + 2.25;
    CHECK(ks_statistic(draws, [&](double x) { return testing::inv_gamma_cdf(x, 2.5, 1.5 + 0.5 * ss); }) < 0.02);
    CHECK(diag.phi_shrink_exhausted == 0);
}

TEST_CASE("non-conjugate dispersion with no data recovers the prior") {
    FitConfig config;
    config.kernel = KernelKind::gamma;
    config.n = 1;
    config.family = NodeLawFamily(1, Domain(0, kInf), NodeLaw::uniform(0.5, 3));
    config.scale_prior = ScaleLaw::gamma(2.0, 1.0);
    const std::vector<double> none;
    const ChainModel model(config, none);
    Rng rng(4);
    ChainState state(BarycenterArray(Domain(0, kInf), {{1.5}, {1.0, 1.5, 2.0}}), {1, 1});
    Diagnostics diag;
    std::vector<double> draws;
    for (int k = 0; k < 100000; ++k) {
        update_phi_nonconjugate(state, model, rng, diag);
        if (k % 10 == 0) draws.push_back(state.phis[0]);
    }
    CHECK(ks_statistic(draws, [](double x) { return testing::gamma_p(2.0, x); }) < 0.02);

    // Single observation at the mean: the conditional has a finite positive mode.
    const std::vector<double> one{1.0};
    const ChainModel single(config, one);
    state.alloc_theta = {0};
    ChainState at_one(BarycenterArray(Domain(0, kInf), {{1.5}, {1.0, 1.5, 2.0}}), {1, 1});
    at_one.alloc_theta = {0};
    for (int k = 0; k < 1000; ++k) {
        update_phi_nonconjugate(at_one, single, rng, diag);
        CHECK(at_one.phis[0] > 0.0);
        CHECK(std::isfinite(at_one.phis[0]));
    }
}

TEST_CASE("scale weights and scale atoms of the general variant") {
    FitConfig config = gaussian_config(1);
    config.variant = Variant::general;
    config.m2 = 2;
    config.alpha = {1, 1};
    const std::vector<double> ys{1.0, 3.0, 0.0, 0.0};
    const ChainModel model(config, ys);
    Rng rng(5);
    ChainState state(BarycenterArray(Domain::real_line(), {{2.0}, {2.0, 2.0, 2.0}}), {1, 1}, {{0.5, 0.5}, {0.5, 0.5}});
    state.alloc_theta = {0, 0, 0, 0};
    state.alloc_phi = {0, 0, 0, 1};
    double first = 0.0, untouched = 0.0;
    for (int k = 0; k < 10000; ++k) {
        update_scale_weights(state, config.alpha, rng);
        first += state.scale_weights[0][0];
        untouched += state.scale_weights[1][0];
        CHECK(state.scale_weights[0][0] + state.scale_weights[0][1] == doctest::Approx(1.0).epsilon(1e-12));
    }
    CHECK(first / 10000 == doctest::Approx(2.0 / 3).epsilon(0.015));
    CHECK(untouched / 10000 == doctest::Approx(0.5).epsilon(0.02));

    // Observations {1, 3} on a location at 2 give IG(a + 1, b + 1).
    const std::vector<double> two{1.0, 3.0};
    const ChainModel pair(config, two);
    state.alloc_theta = {0, 1};
    state.alloc_phi = {0, 0};
    Diagnostics diag;
    std::vector<double> used, unused;
    for (int k = 0; k < 10000; ++k) {
        update_scale_atoms_general(state, pair, rng, diag);
        used.push_back(state.phis[0]);
        unused.push_back(state.phis[1]);
    }
    CHECK(ks_statistic(used, [](double x) { return testing::inv_gamma_cdf(x, 1.5, 2.5); }) < 0.02);
    CHECK(ks_statistic(unused, [](double x) { return testing::inv_gamma_cdf(x, 0.5, 1.5); }) < 0.02);
}

TEST_CASE("general allocations follow the scale weights when kernels coincide") {
    FitConfig config = gaussian_config(1);
    config.variant = Variant::general;
    config.m2 = 2;
    config.alpha = {1, 1};
    const std::vector<double> ys{0.3};
    const ChainModel model(config, ys);
    Rng rng(6);
    ChainState state(BarycenterArray(Domain::real_line(), {{0.0}, {-1.0, 0.0, 1.0}}), {2, 2}, {{0.3, 0.7}, {0.3, 0.7}});
    int first = 0;
    for (int k = 0; k < 20000; ++k) {
        update_allocations_general(state, model, rng);
        first += state.alloc_phi[0] == 0;
    }
    CHECK(first / 20000.0 == doctest::Approx(0.3).epsilon(0.04));
}

TEST_CASE("slice samplers") {
    Rng rng(7);
    std::vector<double> xs;
    double x = 0.5;
    for (int k = 0; k < 10000; ++k) xs.push_back(x = slice_sample_bounded([](double) { return 0.0; }, 0, 1, x, 100, rng));
    CHECK(ks_statistic(xs, uniform_cdf) < 0.02);

    x = 0.5;
    for (int k = 0; k < 2000; ++k) {
        x = slice_sample_bounded([](double v) { return -2000 * (v - 0.9) * (v - 0.9); }, 0, 1, x, 100, rng);
        CHECK(x > 0.0);
        CHECK(x <= 1.0);
    }

    Rng a(11), b(11);
    auto target = [](double v) { return -v * v; };
    double xa = 0.1, xb = 0.1;
    for (int k = 0; k < 100; ++k) {
        xa = slice_sample_bounded(target, -2, 2, xa, 100, a);
        xb = slice_sample_bounded(target, -2, 2, xb, 100, b);
    }
    CHECK(xa == xb);

    std::vector<double> zs;
    double z = 3.0;
    for (int k = 0; k < 50000; ++k) {
        z = slice_sample_unbounded([](double v) { return -0.5 * v * v; }, z, 1.0, 32, 100, rng);
        if (k % 5 == 0) zs.push_back(z);
    }
    CHECK(ks_statistic(zs, testing::phi_cdf) < 0.02);

    bool exhausted = false;
    CHECK_THROWS_AS(slice_sample_bounded([](double) { return std::nan(""); }, 0, 1, 0.5, 10, rng, &exhausted),
                    NonFiniteTarget);
}

TEST_CASE("bottom nodes without data follow their restricted prior") {
    auto config = gaussian_config(2);
    config.freeze_nodes = false;
    const std::vector<double> none;
    const ChainModel model(config, none);
    Rng rng(8);
    auto state = ChainState::from_draw(draw_dsbasp(2, config.family, config.scale_prior, rng));
    Diagnostics diag;
    std::vector<double> pit;
    for (int k = 0; k < 10000; ++k) {
        update_node(state, model, 3, 3, rng, diag);
        const double a = state.array.at(2, 1), b = state.array.at(2, 2);
        pit.push_back(config.family.law(3, 3).restricted_cdf(a, b, state.array.at(3, 3)));
    }
    CHECK(ks_statistic(pit, uniform_cdf) < 0.02);
}

TEST_CASE("every sweep keeps the array valid") {
    for (NodeTarget target : {NodeTarget::paper, NodeTarget::strict_joint}) {
        auto config = gaussian_config(3);
        config.node_target = target;
        std::vector<double> ys;
        Rng data_rng(9);
        for (int i = 0; i < 60; ++i) ys.push_back(sample_normal(data_rng, i % 2 ? -2.0 : 2.0, 0.5));
        const ChainModel model(config, ys);
        Rng rng(10);
        auto state = ChainState::from_draw(draw_dsbasp(3, config.family, config.scale_prior, rng));
        Diagnostics diag;
        for (int k = 0; k < 300; ++k) {
            sweep(state, model, rng, diag);
            REQUIRE(validate_sba(state.array).empty());
            CHECK(std::accumulate(state.weights.begin(), state.weights.end(), 0.0) ==
                  doctest::Approx(1.0).epsilon(1e-12));
            for (int a : state.alloc_theta) CHECK((a >= 0 && a < 8));
        }
    }
}

TEST_CASE("run_chain retention and mean constraint") {
    auto config = gaussian_config(2);
    config.family = NodeLawFamily(2, Domain::real_line(), NodeLaw::normal(0, 3), {{{1, 1}, NodeLaw::degenerate(0)}});
    config.iterations = 105;
    config.burn_in = 5;
    config.thin = 7;
    config.seed = 3;
    const std::vector<double> ys{-2.1, -1.9, 2.0, 2.2, -2.4, 1.7};
    const auto trace = run_chain(config, ys);
    CHECK(trace.draws() == static_cast<std::size_t>((105 - 5) / 7));
    CHECK(trace.mixing.size() == trace.draws());
    for (const auto& snapshot : trace.mixing) {
        double mean = 0.0;
        for (const auto& a : snapshot) mean += a.weight * a.theta;
        CHECK(std::abs(mean) < 1e-10);
    }
    for (double m : trace.mean) CHECK(std::abs(m) < 1e-10);
    CHECK(trace.grid.size() == 200);
    CHECK(trace.grid.front() == -2.4);
    CHECK(trace.grid.back() == 2.2);

    config.iterations = 12;
    config.burn_in = 10;
    config.thin = 2;
    CHECK(run_chain(config, ys).draws() == 1);

    // Same seed, same path.
    const auto again = run_chain(config, ys);
    CHECK(again.loglik == run_chain(config, ys).loglik);
}

TEST_CASE("frozen nodes reduce to the conjugate posterior") {
    auto config = gaussian_config(1);
    config.freeze_nodes = true;
    config.initial_array = BarycenterArray(Domain::real_line(), {{1.0}, {1.0, 1.0, 1.0}});
    config.iterations = 10000;
    config.seed = 12;
    const std::vector<double> ys{2.5};
    const auto trace = run_chain(config, ys);
    std::vector<double> phis;
    for (const auto& snapshot : trace.mixing) phis.push_back(snapshot[0].phi);
    CHECK(ks_statistic(phis, [](double x) { return testing::inv_gamma_cdf(x, 1.0, 1.5 + 0.5 * 2.25); }) < 0.02);
}

TEST_CASE("configuration and data errors") {
    auto config = gaussian_config(2);
    config.burn_in = config.iterations;
    CHECK_THROWS_AS(config.validate(), Error);
    config = gaussian_config(2);
    config.n = 3;
    CHECK_THROWS_AS(config.validate(), Error);
    config = gaussian_config(2);
    config.thin = 0;
    CHECK_THROWS_AS(config.validate(), Error);
    config = gaussian_config(2);
    config.variant = Variant::general;
    config.m2 = 2;
    config.alpha = {1.0};
    CHECK_THROWS_AS(config.validate(), Error);

    FitConfig beta;
    beta.kernel = KernelKind::beta;
    beta.n = 1;
    beta.family = NodeLawFamily(1, Domain(0, 1), NodeLaw::uniform(0, 1));
    const std::vector<double> outside{0.5, 1.5};
    CHECK_THROWS_AS(run_chain(beta, outside), DomainError);
    beta.family = NodeLawFamily(1, Domain::real_line(), NodeLaw::normal(0, 1));
    CHECK_THROWS_AS(beta.validate(), Error);
}

TEST_CASE("parallel chains concatenate seeded runs") {
    auto config = gaussian_config(2);
    config.iterations = 40;
    config.burn_in = 10;
    config.thin = 3;
    config.seed = 50;
    const std::vector<double> ys{0.1, 0.4, -0.3, 2.0};
    const auto merged = run_chains(config, ys, 3);
    CHECK(merged.draws() == 30);
    config.seed = 51;
    const auto second = run_chain(config, ys);
    for (std::size_t k = 0; k < 10; ++k) CHECK(merged.loglik[10 + k] == second.loglik[k]);
}

TEST_CASE("beta and gamma kernels run end to end") {
    FitConfig beta;
    beta.kernel = KernelKind::beta;
    beta.n = 2;
    beta.family = NodeLawFamily(2, Domain(0, 1), NodeLaw::uniform(0, 1));
    beta.scale_prior = ScaleLaw::gamma(2.0, 0.1);
    beta.iterations = 200;
    beta.burn_in = 100;
    const std::vector<double> props{0.1, 0.15, 0.2, 0.7, 0.8, 0.75, 0.5};
    const auto tb = run_chain(beta, props);
    CHECK(tb.draws() == 100);
    for (const auto& row : tb.loglik)
        for (double v : row) CHECK(std::isfinite(v));

    FitConfig gamma = beta;
    gamma.kernel = KernelKind::gamma;
    gamma.family = NodeLawFamily(2, Domain(0, kInf), NodeLaw::uniform(0.1, 10));
    gamma.variant = Variant::general;
    gamma.m2 = 2;
    gamma.alpha = {1, 1};
    const std::vector<double> waits{0.5, 1.2, 3.3, 0.8, 6.1, 2.2};
    const auto tg = run_chain(gamma, waits);
    CHECK(tg.draws() == 100);
    CHECK(tg.mixing.front().size() == 8);
}

}  // TEST_SUITE
