// Command-line front end. Talks to the library only through the C interface.
#include <cmath>
#include <cstdio>
#include <fstream>
#include <optional>
#include <sstream>
#include <string>

#include <CLI11.hpp>

#include "sba/sba.h"

namespace {

constexpr int kExitUsage = 2;

int exit_code(sba_status s) {
    switch (s) {
        case SBA_OK: return 0;
        case SBA_ERR_PARSE:
        case SBA_ERR_INVALID_ARGUMENT:
        case SBA_ERR_IO: return kExitUsage;
        case SBA_ERR_MODEL: return 3;
        case SBA_ERR_DATA: return 4;
        case SBA_ERR_NUMERICAL: return 5;
        case SBA_ERR_INTERNAL: return 1;
    }
    return 1;
}

struct Failure {
    sba_status status;
};

void check(sba_status s) {
    if (s != SBA_OK) {
        std::fprintf(stderr, "error (%s): %s\n", sba_status_name(s), sba_last_error());
        throw Failure{s};
    }
}

[[noreturn]] void usage(const std::string& what) {
    std::fprintf(stderr, "error: %s\n", what.c_str());
    throw Failure{SBA_ERR_INVALID_ARGUMENT};
}

std::string g17(double x) {
    char buf[32];
    std::snprintf(buf, sizeof buf, "%.17g", x);
    return buf;
}

// Owning wrappers for the C handles.
template <class T, void (*Free)(T*)>
struct Handle {
    T* p = nullptr;
    Handle() = default;
    Handle(const Handle&) = delete;
    Handle& operator=(const Handle&) = delete;
    ~Handle() { Free(p); }
    T** out() { return &p; }
    T* get() const { return p; }
};
using Measure = Handle<sba_measure, sba_measure_free>;
using Array = Handle<sba_array, sba_array_free>;
using Discrete = Handle<sba_discrete, sba_discrete_free>;
using Config = Handle<sba_config, sba_config_free>;
using TraceH = Handle<sba_trace, sba_trace_free>;
using LogLik = Handle<sba_loglik, sba_loglik_free>;

std::string read_text(const std::string& path) {
    std::ifstream in(path);
    if (!in) usage("cannot open '" + path + "'");
    std::ostringstream ss;
    ss << in.rdbuf();
    return ss.str();
}

struct MeasureInputs {
    std::string measure_path;
    std::string config_path;
    int n = 0;
    std::string out;
};

// Loads the measure from --measure, or from the config's "measure" entry.
void load_measure(const MeasureInputs& in, Measure& measure, int& n) {
    n = in.n;
    if (!in.measure_path.empty()) {
        check(sba_measure_parse(read_text(in.measure_path).c_str(), measure.out()));
    } else if (!in.config_path.empty()) {
        Config config;
        check(sba_config_read(in.config_path.c_str(), config.out()));
        const char* spec = sba_config_measure(config.get());
        if (!spec) usage("config has no 'measure' entry");
        check(sba_measure_parse(spec, measure.out()));
        if (n == 0) n = sba_config_depth(config.get());
    } else {
        usage("give --measure or --config");
    }
    if (n < 1) usage("give the depth with --n");
}

int cmd_sba_build(const MeasureInputs& in) {
    Measure measure;
    int n = 0;
    load_measure(in, measure, n);
    Array array;
    check(sba_array_build(measure.get(), n, array.out()));
    check(sba_array_write(array.get(), in.out.c_str()));
    size_t violations = 0;
    check(sba_array_violations(array.get(), &violations));
    std::printf("rows: %d\n", sba_array_depth(array.get()) + 1);
    std::printf("violations: %zu\n", violations);
    std::printf("regular_level_%d: %s\n", n, sba_array_is_regular(array.get(), n) ? "true" : "false");
    std::printf("written: %s\n", in.out.c_str());
    return 0;
}

int cmd_sba_approx(const MeasureInputs& in) {
    Measure measure;
    int n = 0;
    load_measure(in, measure, n);
    Discrete approx;
    check(sba_approximate(measure.get(), n, approx.out()));
    check(sba_discrete_write_csv(approx.get(), in.out.c_str()));
    double mean = 0.0, w1 = 0.0;
    check(sba_measure_mean(measure.get(), &mean));
    check(sba_wasserstein_to_measure(measure.get(), approx.get(), 1.0, &w1));
    const double approx_mean = sba_discrete_mean(approx.get());
    double scale = 1.0;
    for (size_t k = 0; k < sba_discrete_size(approx.get()); ++k) {
        double atom = 0.0;
        check(sba_discrete_get(approx.get(), k, &atom, nullptr));
        scale = std::max(scale, std::abs(atom));
    }
    std::printf("atoms: %zu\n", sba_discrete_size(approx.get()));
    std::printf("mean: %s\n", g17(mean).c_str());
    std::printf("approx_mean: %s\n", g17(approx_mean).c_str());
    std::printf("mean_error: %s\n", g17(std::abs(approx_mean - mean)).c_str());
    std::printf("w1: %s\n", g17(w1).c_str());
    std::printf("exact: %s\n", w1 <= 1e-12 * scale ? "true" : "false");
    std::printf("written: %s\n", in.out.c_str());
    return 0;
}

int cmd_prior_sample(const std::string& config_path, std::optional<std::uint64_t> seed, std::optional<long> draws,
                     const std::string& out) {
    Config config;
    check(sba_config_read(config_path.c_str(), config.out()));
    if (seed) sba_config_set_seed(config.get(), *seed);
    const long count = draws ? *draws : sba_config_draws(config.get());
    double mean = 0.0, lo = 0.0, hi = 0.0;
    check(sba_prior_sample(config.get(), count, out.c_str(), &mean, &lo, &hi));
    std::printf("draws: %ld\n", count);
    if (count > 0) {
        std::printf("mean_of_means: %s\n", g17(mean).c_str());
        std::printf("min_mean: %s\n", g17(lo).c_str());
        std::printf("max_mean: %s\n", g17(hi).c_str());
    }
    std::printf("written: %s\n", out.c_str());
    return 0;
}

int cmd_fit(const std::string& config_path, const std::string& data_path, std::optional<std::uint64_t> seed,
            std::optional<int> chains, const std::string& out) {
    Config config;
    check(sba_config_read(config_path.c_str(), config.out()));
    if (seed) sba_config_set_seed(config.get(), *seed);
    if (chains) check(sba_config_set_chains(config.get(), *chains));
    double* data = nullptr;
    size_t count = 0;
    check(sba_data_read(data_path.c_str(), &data, &count));
    TraceH trace;
    const sba_status fitted = sba_fit(config.get(), data, count, trace.out());
    sba_free_doubles(data);
    check(fitted);
    check(sba_trace_write(trace.get(), out.c_str()));
    const size_t draws = sba_trace_draws(trace.get());
    std::printf("observations: %zu\n", count);
    std::printf("retained_draws: %zu\n", draws);
    if (draws >= 2) {
        double waic = 0.0, lppd = 0.0, p_waic = 0.0, lpml = 0.0;
        check(sba_trace_waic(trace.get(), &waic, &lppd, &p_waic));
        check(sba_trace_lpml(trace.get(), &lpml));
        std::printf("waic: %s\nlppd: %s\np_waic: %s\nlpml: %s\n", g17(waic).c_str(), g17(lppd).c_str(),
                    g17(p_waic).c_str(), g17(lpml).c_str());
    }
    long node = 0, phi = 0, degenerate = 0;
    check(sba_trace_diagnostics(trace.get(), &node, &phi, &degenerate));
    std::printf("node_shrink_exhausted: %ld\nphi_shrink_exhausted: %ld\ndegenerate_intervals: %ld\n", node, phi,
                degenerate);
    std::printf("written: %s\n", out.c_str());
    return 0;
}

int cmd_metrics(const std::string& loglik_path, const std::string& out) {
    LogLik ll;
    check(sba_loglik_read(loglik_path.c_str(), ll.out()));
    double waic = 0.0, lppd = 0.0, p_waic = 0.0, lpml = 0.0;
    check(sba_loglik_waic(ll.get(), &waic, &lppd, &p_waic));
    check(sba_loglik_lpml(ll.get(), &lpml));
    std::printf("waic: %s\nlppd: %s\np_waic: %s\nlpml: %s\n", g17(waic).c_str(), g17(lppd).c_str(),
                g17(p_waic).c_str(), g17(lpml).c_str());
    if (!out.empty()) {
        check(sba_loglik_write_report(ll.get(), out.c_str()));
        std::printf("written: %s\n", out.c_str());
    }
    return 0;
}

}  // namespace

int main(int argc, char** argv) {
    CLI::App app{"Sequential barycenter arrays and mean-constrained mixture models"};
    app.require_subcommand(1);

    MeasureInputs build_in, approx_in;
    auto* build = app.add_subcommand("sba-build", "Build the barycenter array of a measure");
    build->add_option("--measure", build_in.measure_path, "Measure specification file");
    build->add_option("--config", build_in.config_path, "Run configuration with a 'measure' entry");
    build->add_option("--n", build_in.n, "Depth")->check(CLI::Range(1, 20));
    build->add_option("--out", build_in.out, "Output array file")->required();

    auto* approx = app.add_subcommand("sba-approx", "Level-n discrete approximation of a measure");
    approx->add_option("--measure", approx_in.measure_path, "Measure specification file");
    approx->add_option("--config", approx_in.config_path, "Run configuration with a 'measure' entry");
    approx->add_option("--n", approx_in.n, "Depth")->check(CLI::Range(1, 20));
    approx->add_option("--out", approx_in.out, "Output CSV (atom,weight)")->required();

    std::string config_path, data_path, out, loglik_path;
    std::optional<std::uint64_t> seed;
    std::optional<long> draws;
    std::optional<int> chains;

    auto* prior = app.add_subcommand("prior-sample", "Draw mixing measures from the prior");
    prior->add_option("--config", config_path, "Run configuration")->required();
    prior->add_option("--seed", seed, "Random seed");
    prior->add_option("--draws", draws, "Number of draws")->check(CLI::NonNegativeNumber);
    prior->add_option("--out", out, "Output file, one JSON object per draw")->required();

    auto* fit = app.add_subcommand("fit", "Run the Gibbs sampler");
    fit->add_option("--config", config_path, "Run configuration")->required();
    fit->add_option("--data", data_path, "Single-column data CSV")->required();
    fit->add_option("--seed", seed, "Random seed");
    fit->add_option("--chains", chains, "Independent chains")->check(CLI::PositiveNumber);
    fit->add_option("--out", out, "Output directory")->required();

    auto* metrics = app.add_subcommand("metrics", "WAIC and LPML from a log-likelihood matrix");
    metrics->add_option("--loglik", loglik_path, "loglik.csv from a fit")->required();
    metrics->add_option("--out", out, "Optional JSON report");

    try {
        app.parse(argc, argv);
    } catch (const CLI::ParseError& e) {
        const int code = app.exit(e);
        return code == 0 ? 0 : kExitUsage;
    }

    try {
        if (*build) return cmd_sba_build(build_in);
        if (*approx) return cmd_sba_approx(approx_in);
        if (*prior) return cmd_prior_sample(config_path, seed, draws, out);
        if (*fit) return cmd_fit(config_path, data_path, seed, chains, out);
        if (*metrics) return cmd_metrics(loglik_path, out);
    } catch (const Failure& f) {
        return exit_code(f.status);
    }
    return 0;
}
