#include "sba/sba.h"

#include <cmath>
#include <cstdlib>
#include <cstring>
#include <filesystem>
#include <fstream>
#include <limits>
#include <new>
#include <sstream>
#include <string>

#include <json.hpp>

#include "sba/barycenter_array.hpp"
#include "sba/config.hpp"
#include "sba/error.hpp"
#include "sba/gibbs.hpp"
#include "sba/io.hpp"
#include "sba/measure.hpp"
#include "sba/metrics.hpp"
#include "sba/random_measures.hpp"

struct sba_measure {
    sba::AnalyticMeasure value;
};
struct sba_array {
    sba::BarycenterArray value;
};
struct sba_discrete {
    sba::DiscreteMeasure value;
};
struct sba_config {
    sba::RunConfig value;
};
struct sba_trace {
    sba::Trace value;
    sba::RunConfig config;
    std::size_t observations;
};
struct sba_loglik {
    sba::LogLikMatrix value;
};

namespace {

thread_local std::string last_error;

sba_status status_of(sba::ErrorKind kind) {
    switch (kind) {
        case sba::ErrorKind::invalid_argument: return SBA_ERR_INVALID_ARGUMENT;
        case sba::ErrorKind::parse: return SBA_ERR_PARSE;
        case sba::ErrorKind::model: return SBA_ERR_MODEL;
        case sba::ErrorKind::data: return SBA_ERR_DATA;
        case sba::ErrorKind::numerical: return SBA_ERR_NUMERICAL;
        case sba::ErrorKind::io: return SBA_ERR_IO;
    }
    return SBA_ERR_INTERNAL;
}

template <class F>
sba_status guarded(F&& body) {
    try {
        body();
        last_error.clear();
        return SBA_OK;
    } catch (const sba::Error& e) {
        last_error = e.what();
        return status_of(e.kind());
    } catch (const std::bad_alloc&) {
        last_error = "out of memory";
        return SBA_ERR_INTERNAL;
    } catch (const std::exception& e) {
        last_error = e.what();
        return SBA_ERR_INTERNAL;
    }
}

void require(const void* p, const char* what) {
    if (!p) throw sba::Error(sba::ErrorKind::invalid_argument, std::string(what) + " must not be null");
}

std::ifstream open_in(const char* path) {
    require(path, "path");
    std::ifstream in(path);
    if (!in) throw sba::Error(sba::ErrorKind::io, std::string("cannot open '") + path + "' for reading");
    return in;
}

std::ofstream open_out(const std::string& path) {
    std::ofstream out(path);
    if (!out) throw sba::Error(sba::ErrorKind::io, "cannot open '" + path + "' for writing");
    return out;
}

void finish(std::ofstream& out, const std::string& path) {
    out.flush();
    if (!out) throw sba::Error(sba::ErrorKind::io, "failed writing '" + path + "'");
}

std::string slurp(const char* path) {
    auto in = open_in(path);
    std::ostringstream ss;
    ss << in.rdbuf();
    return ss.str();
}

nlohmann::json criteria(const sba::LogLikMatrix& ll) {
    nlohmann::json j;
    j["draws"] = ll.size();
    j["observations"] = ll.empty() ? 0 : ll.front().size();
    if (ll.size() < 2 || ll.front().empty()) {
        j["waic"] = nullptr;
        j["lpml"] = nullptr;
        return j;
    }
    const auto w = sba::waic(ll);
    const auto l = sba::lpml_cpo(ll);
    j["waic"] = w.waic;
    j["lppd"] = w.lppd;
    j["p_waic"] = w.p_waic;
    j["lpml"] = l.lpml;
    return j;
}

}  // namespace

extern "C" {

const char* sba_last_error(void) { return last_error.c_str(); }

const char* sba_status_name(sba_status status) {
    switch (status) {
        case SBA_OK: return "ok";
        case SBA_ERR_PARSE: return "parse error";
        case SBA_ERR_MODEL: return "model error";
        case SBA_ERR_DATA: return "data error";
        case SBA_ERR_NUMERICAL: return "numerical error";
        case SBA_ERR_INVALID_ARGUMENT: return "invalid argument";
        case SBA_ERR_IO: return "i/o error";
        case SBA_ERR_INTERNAL: return "internal error";
    }
    return "unknown status";
}

sba_status sba_measure_parse(const char* spec, sba_measure** out) {
    return guarded([&] {
        require(spec, "spec");
        require(out, "out");
        *out = new sba_measure{sba::parse_measure_spec(spec)};
    });
}

sba_status sba_measure_mean(const sba_measure* measure, double* out) {
    return guarded([&] {
        require(measure, "measure");
        require(out, "out");
        *out = measure->value.mean();
    });
}

sba_status sba_measure_cdf(const sba_measure* measure, double x, double* out) {
    return guarded([&] {
        require(measure, "measure");
        require(out, "out");
        *out = measure->value.cdf(x);
    });
}

void sba_measure_free(sba_measure* measure) { delete measure; }

sba_status sba_array_build(const sba_measure* measure, int n, sba_array** out) {
    return guarded([&] {
        require(measure, "measure");
        require(out, "out");
        *out = new sba_array{sba::build_sba(measure->value, n)};
    });
}

sba_status sba_array_read(const char* path, sba_array** out) {
    return guarded([&] {
        require(out, "out");
        auto in = open_in(path);
        *out = new sba_array{sba::read_array(in)};
    });
}

sba_status sba_array_write(const sba_array* array, const char* path) {
    return guarded([&] {
        require(array, "array");
        require(path, "path");
        auto out = open_out(path);
        sba::write_array(out, array->value);
        finish(out, path);
    });
}

int sba_array_depth(const sba_array* array) { return array ? array->value.depth() : 0; }

sba_status sba_array_at(const sba_array* array, int j, long l, double* out) {
    return guarded([&] {
        require(array, "array");
        require(out, "out");
        if (j < 1 || j > array->value.rows() || l < 0 || l > (1L << j))
            throw sba::Error(sba::ErrorKind::invalid_argument, "array index out of range");
        *out = array->value.at(j, l);
    });
}

sba_status sba_array_violations(const sba_array* array, size_t* count) {
    return guarded([&] {
        require(array, "array");
        require(count, "count");
        *count = sba::validate_sba(array->value).size();
    });
}

int sba_array_is_regular(const sba_array* array, int level) {
    if (!array || level < 1 || level > array->value.rows()) return 0;
    return sba::is_regular(array->value, level) ? 1 : 0;
}

void sba_array_free(sba_array* array) { delete array; }

sba_status sba_approximate(const sba_measure* measure, int n, sba_discrete** out) {
    return guarded([&] {
        require(measure, "measure");
        require(out, "out");
        *out = new sba_discrete{sba::approximate(measure->value, n)};
    });
}

sba_status sba_discrete_from_array(const sba_array* array, sba_discrete** out) {
    return guarded([&] {
        require(array, "array");
        require(out, "out");
        *out = new sba_discrete{sba::DiscreteMeasure::from_array(array->value)};
    });
}

size_t sba_discrete_size(const sba_discrete* measure) { return measure ? measure->value.size() : 0; }

sba_status sba_discrete_get(const sba_discrete* measure, size_t k, double* atom, double* weight) {
    return guarded([&] {
        require(measure, "measure");
        if (k >= measure->value.size()) throw sba::Error(sba::ErrorKind::invalid_argument, "atom index out of range");
        if (atom) *atom = measure->value.atoms()[k];
        if (weight) *weight = measure->value.weights()[k];
    });
}

double sba_discrete_mean(const sba_discrete* measure) {
    return measure ? sba::discrete_mean(measure->value) : std::numeric_limits<double>::quiet_NaN();
}

sba_status sba_discrete_read_csv(const char* path, sba_discrete** out) {
    return guarded([&] {
        require(out, "out");
        auto in = open_in(path);
        *out = new sba_discrete{sba::read_discrete_csv(in)};
    });
}

sba_status sba_discrete_write_csv(const sba_discrete* measure, const char* path) {
    return guarded([&] {
        require(measure, "measure");
        require(path, "path");
        auto out = open_out(path);
        sba::write_discrete_csv(out, measure->value);
        finish(out, path);
    });
}

void sba_discrete_free(sba_discrete* measure) { delete measure; }

sba_status sba_wasserstein(const sba_discrete* a, const sba_discrete* b, double p, double* out) {
    return guarded([&] {
        require(a, "a");
        require(b, "b");
        require(out, "out");
        *out = sba::wasserstein_p(a->value, b->value, p);
    });
}

sba_status sba_wasserstein_to_measure(const sba_measure* a, const sba_discrete* b, double p, double* out) {
    return guarded([&] {
        require(a, "a");
        require(b, "b");
        require(out, "out");
        *out = sba::wasserstein_p(a->value, b->value, p);
    });
}

sba_status sba_config_parse(const char* json_text, sba_config** out) {
    return guarded([&] {
        require(json_text, "json_text");
        require(out, "out");
        *out = new sba_config{sba::parse_run_config(json_text)};
    });
}

sba_status sba_config_read(const char* path, sba_config** out) {
    return guarded([&] {
        require(out, "out");
        *out = new sba_config{sba::parse_run_config(slurp(path))};
    });
}

void sba_config_set_seed(sba_config* config, uint64_t seed) {
    if (!config) return;
    config->value.fit.seed = seed;
    config->value.has_seed = true;
}

int sba_config_has_seed(const sba_config* config) { return config && config->value.has_seed ? 1 : 0; }

sba_status sba_config_set_chains(sba_config* config, int chains) {
    return guarded([&] {
        require(config, "config");
        if (chains < 1) throw sba::Error(sba::ErrorKind::invalid_argument, "chains must be at least 1");
        config->value.chains = chains;
    });
}

int sba_config_depth(const sba_config* config) { return config ? config->value.fit.n : 0; }

long sba_config_draws(const sba_config* config) { return config ? config->value.draws : 0; }

const char* sba_config_measure(const sba_config* config) {
    return config && config->value.measure ? config->value.measure->c_str() : nullptr;
}

void sba_config_free(sba_config* config) { delete config; }

sba_status sba_prior_sample(const sba_config* config, long draws, const char* path, double* mean_of_means,
                            double* min_mean, double* max_mean) {
    return guarded([&] {
        require(config, "config");
        require(path, "path");
        const auto& rc = config->value;
        if (!rc.has_seed) throw sba::Error(sba::ErrorKind::invalid_argument, "prior sampling needs a seed");
        if (draws < 0) throw sba::Error(sba::ErrorKind::invalid_argument, "draws must be nonnegative");
        const auto& fit = rc.fit;
        if (fit.family.depth() != fit.n) throw sba::Error(sba::ErrorKind::model, "family depth does not match n");
        sba::Rng rng(fit.seed);
        auto out = open_out(path);
        const double nan = std::numeric_limits<double>::quiet_NaN();
        double sum = 0.0, lo = nan, hi = nan;
        for (long d = 0; d < draws; ++d) {
            const auto joint = fit.variant == sba::Variant::general
                                   ? sba::sample_dsbasg(fit.n, fit.family, fit.scale_prior, fit.m2, fit.alpha, rng)
                                   : sba::sample_dsbasp(fit.n, fit.family, fit.scale_prior, rng);
            const double m = joint.theta_mean();
            sum += m;
            lo = d == 0 ? m : std::min(lo, m);
            hi = d == 0 ? m : std::max(hi, m);
            sba::write_mixing_line(out, d + 1, joint.atoms());
        }
        finish(out, path);
        if (mean_of_means) *mean_of_means = draws > 0 ? sum / static_cast<double>(draws) : nan;
        if (min_mean) *min_mean = lo;
        if (max_mean) *max_mean = hi;
    });
}

sba_status sba_data_read(const char* path, double** values, size_t* count) {
    return guarded([&] {
        require(values, "values");
        require(count, "count");
        auto in = open_in(path);
        const auto data = sba::read_data_csv(in);
        auto* buf = static_cast<double*>(std::malloc(sizeof(double) * (data.empty() ? 1 : data.size())));
        if (!buf) throw std::bad_alloc();
        std::copy(data.begin(), data.end(), buf);
        *values = buf;
        *count = data.size();
    });
}

void sba_free_doubles(double* values) { std::free(values); }

sba_status sba_fit(const sba_config* config, const double* data, size_t count, sba_trace** out) {
    return guarded([&] {
        require(config, "config");
        require(out, "out");
        if (count > 0) require(data, "data");
        const auto& rc = config->value;
        if (!rc.has_seed) throw sba::Error(sba::ErrorKind::invalid_argument, "fitting needs a seed");
        if (count == 0) throw sba::DomainError("the data set has no observations");
        auto trace = sba::run_chains(rc.fit, std::span<const double>(data, count), rc.chains);
        *out = new sba_trace{std::move(trace), rc, count};
    });
}

size_t sba_trace_draws(const sba_trace* trace) { return trace ? trace->value.draws() : 0; }

sba_status sba_trace_waic(const sba_trace* trace, double* waic, double* lppd, double* p_waic) {
    return guarded([&] {
        require(trace, "trace");
        const auto r = sba::waic(trace->value.loglik);
        if (waic) *waic = r.waic;
        if (lppd) *lppd = r.lppd;
        if (p_waic) *p_waic = r.p_waic;
    });
}

sba_status sba_trace_lpml(const sba_trace* trace, double* lpml) {
    return guarded([&] {
        require(trace, "trace");
        require(lpml, "lpml");
        *lpml = sba::lpml_cpo(trace->value.loglik).lpml;
    });
}

sba_status sba_trace_diagnostics(const sba_trace* trace, long* node_shrink_exhausted, long* phi_shrink_exhausted,
                                 long* degenerate_intervals) {
    return guarded([&] {
        require(trace, "trace");
        const auto& d = trace->value.diagnostics;
        if (node_shrink_exhausted) *node_shrink_exhausted = d.node_shrink_exhausted;
        if (phi_shrink_exhausted) *phi_shrink_exhausted = d.phi_shrink_exhausted;
        if (degenerate_intervals) *degenerate_intervals = d.degenerate_intervals;
    });
}

sba_status sba_trace_write(const sba_trace* trace, const char* outdir) {
    return guarded([&] {
        require(trace, "trace");
        require(outdir, "outdir");
        namespace fs = std::filesystem;
        const fs::path dir(outdir);
        std::error_code ec;
        fs::create_directories(dir, ec);
        if (ec) throw sba::Error(sba::ErrorKind::io, "cannot create '" + dir.string() + "': " + ec.message());
        const auto& t = trace->value;
        auto write = [&](const char* name, auto&& body) {
            const std::string path = (dir / name).string();
            auto out = open_out(path);
            body(out);
            finish(out, path);
        };
        write("loglik.csv", [&](std::ostream& out) { sba::write_matrix_csv(out, t.loglik, "obs_"); });
        write("density.csv", [&](std::ostream& out) { sba::write_matrix_csv(out, t.density, "grid_"); });
        if (!t.density.empty())
            write("band.csv", [&](std::ostream& out) {
                sba::write_band_csv(out, t.grid, sba::density_band(t, trace->config.band_prob));
            });
        if (!t.mixing.empty())
            write("mixing.jsonl", [&](std::ostream& out) {
                for (std::size_t k = 0; k < t.mixing.size(); ++k)
                    sba::write_mixing_line(out, static_cast<long>(k + 1), t.mixing[k]);
            });
        write("metrics.json", [&](std::ostream& out) { out << criteria(t.loglik).dump(2) << '\n'; });
        write("manifest.json", [&](std::ostream& out) {
            nlohmann::json m;
            m["config"] = sba::fit_config_to_json(trace->config.fit);
            m["seed"] = trace->config.fit.seed;
            m["chains"] = trace->config.chains;
            m["observations"] = trace->observations;
            m["retained_draws"] = t.draws();
            m["band_prob"] = trace->config.band_prob;
            if (!t.grid.empty())
                m["grid"] = {{"lo", t.grid.front()}, {"hi", t.grid.back()}, {"count", t.grid.size()}};
            m["diagnostics"] = {{"node_shrink_exhausted", t.diagnostics.node_shrink_exhausted},
                                {"phi_shrink_exhausted", t.diagnostics.phi_shrink_exhausted},
                                {"degenerate_intervals", t.diagnostics.degenerate_intervals}};
            out << m.dump(2) << '\n';
        });
    });
}

void sba_trace_free(sba_trace* trace) { delete trace; }

sba_status sba_loglik_read(const char* path, sba_loglik** out) {
    return guarded([&] {
        require(out, "out");
        auto in = open_in(path);
        *out = new sba_loglik{sba::read_matrix_csv(in)};
    });
}

sba_status sba_loglik_waic(const sba_loglik* ll, double* waic, double* lppd, double* p_waic) {
    return guarded([&] {
        require(ll, "ll");
        const auto r = sba::waic(ll->value);
        if (waic) *waic = r.waic;
        if (lppd) *lppd = r.lppd;
        if (p_waic) *p_waic = r.p_waic;
    });
}

sba_status sba_loglik_lpml(const sba_loglik* ll, double* lpml) {
    return guarded([&] {
        require(ll, "ll");
        require(lpml, "lpml");
        *lpml = sba::lpml_cpo(ll->value).lpml;
    });
}

sba_status sba_loglik_write_report(const sba_loglik* ll, const char* path) {
    return guarded([&] {
        require(ll, "ll");
        require(path, "path");
        auto out = open_out(path);
        out << criteria(ll->value).dump(2) << '\n';
        finish(out, path);
    });
}

void sba_loglik_free(sba_loglik* ll) { delete ll; }

}  // extern "C"
