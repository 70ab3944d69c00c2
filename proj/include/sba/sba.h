/* C interface to the sba library. Every object is an opaque handle released
 * by its matching *_free function. Functions returning sba_status leave the
 * message of the most recent failure on the calling thread in sba_last_error(). */
#ifndef SBA_SBA_H
#define SBA_SBA_H

#include <stddef.h>
#include <stdint.h>

#if defined(_WIN32)
#  if defined(SBA_BUILDING_LIBRARY)
#    define SBA_API __declspec(dllexport)
#  else
#    define SBA_API __declspec(dllimport)
#  endif
#else
#  define SBA_API __attribute__((visibility("default")))
#endif

#ifdef __cplusplus
extern "C" {
#endif

/* Values 2..5 double as the command-line exit codes. */
typedef enum sba_status {
    SBA_OK = 0,
    SBA_ERR_PARSE = 2,
    SBA_ERR_MODEL = 3,
    SBA_ERR_DATA = 4,
    SBA_ERR_NUMERICAL = 5,
    SBA_ERR_INVALID_ARGUMENT = 6,
    SBA_ERR_IO = 7,
    SBA_ERR_INTERNAL = 8
} sba_status;

typedef struct sba_measure sba_measure;   /* analytic target measure */
typedef struct sba_array sba_array;       /* barycenter array */
typedef struct sba_discrete sba_discrete; /* discrete measure */
typedef struct sba_config sba_config;     /* parsed run configuration */
typedef struct sba_trace sba_trace;       /* retained posterior draws */
typedef struct sba_loglik sba_loglik;     /* draws x observations log-likelihoods */

SBA_API const char* sba_last_error(void);
SBA_API const char* sba_status_name(sba_status status);

/* Measures, from the line-based specification format. */
SBA_API sba_status sba_measure_parse(const char* spec, sba_measure** out);
SBA_API sba_status sba_measure_mean(const sba_measure* measure, double* out);
SBA_API sba_status sba_measure_cdf(const sba_measure* measure, double x, double* out);
SBA_API void sba_measure_free(sba_measure* measure);

/* Arrays. Rows are 1-based, positions 0..2^j address the domain bounds. */
SBA_API sba_status sba_array_build(const sba_measure* measure, int n, sba_array** out);
SBA_API sba_status sba_array_read(const char* path, sba_array** out);
SBA_API sba_status sba_array_write(const sba_array* array, const char* path);
SBA_API int sba_array_depth(const sba_array* array);
SBA_API sba_status sba_array_at(const sba_array* array, int j, long l, double* out);
SBA_API sba_status sba_array_violations(const sba_array* array, size_t* count);
SBA_API int sba_array_is_regular(const sba_array* array, int level);
SBA_API void sba_array_free(sba_array* array);

/* Discrete measures and Wasserstein distances. */
SBA_API sba_status sba_approximate(const sba_measure* measure, int n, sba_discrete** out);
SBA_API sba_status sba_discrete_from_array(const sba_array* array, sba_discrete** out);
SBA_API size_t sba_discrete_size(const sba_discrete* measure);
SBA_API sba_status sba_discrete_get(const sba_discrete* measure, size_t k, double* atom, double* weight);
SBA_API double sba_discrete_mean(const sba_discrete* measure);
SBA_API sba_status sba_discrete_read_csv(const char* path, sba_discrete** out);
SBA_API sba_status sba_discrete_write_csv(const sba_discrete* measure, const char* path);
SBA_API void sba_discrete_free(sba_discrete* measure);
SBA_API sba_status sba_wasserstein(const sba_discrete* a, const sba_discrete* b, double p, double* out);
SBA_API sba_status sba_wasserstein_to_measure(const sba_measure* a, const sba_discrete* b, double p, double* out);

/* Run configuration (JSON document). */
SBA_API sba_status sba_config_parse(const char* json_text, sba_config** out);
SBA_API sba_status sba_config_read(const char* path, sba_config** out);
SBA_API void sba_config_set_seed(sba_config* config, uint64_t seed);
SBA_API int sba_config_has_seed(const sba_config* config);
SBA_API sba_status sba_config_set_chains(sba_config* config, int chains);
SBA_API int sba_config_depth(const sba_config* config);
SBA_API long sba_config_draws(const sba_config* config);
/* Measure specification embedded in the config, or NULL. Owned by the config. */
SBA_API const char* sba_config_measure(const sba_config* config);
SBA_API void sba_config_free(sba_config* config);

/* Prior draws written one JSON object per line. Summary outputs may be NULL;
 * they are NaN when draws == 0. */
SBA_API sba_status sba_prior_sample(const sba_config* config, long draws, const char* path,
                                    double* mean_of_means, double* min_mean, double* max_mean);

/* Single-column data file. Release with sba_free_doubles. */
SBA_API sba_status sba_data_read(const char* path, double** values, size_t* count);
SBA_API void sba_free_doubles(double* values);

/* Posterior sampling. */
SBA_API sba_status sba_fit(const sba_config* config, const double* data, size_t count, sba_trace** out);
SBA_API size_t sba_trace_draws(const sba_trace* trace);
SBA_API sba_status sba_trace_waic(const sba_trace* trace, double* waic, double* lppd, double* p_waic);
SBA_API sba_status sba_trace_lpml(const sba_trace* trace, double* lpml);
SBA_API sba_status sba_trace_diagnostics(const sba_trace* trace, long* node_shrink_exhausted,
                                         long* phi_shrink_exhausted, long* degenerate_intervals);
/* Writes loglik.csv, density.csv, band.csv, metrics.json, manifest.json and,
 * when snapshots were kept, mixing.jsonl into outdir (created if needed). */
SBA_API sba_status sba_trace_write(const sba_trace* trace, const char* outdir);
SBA_API void sba_trace_free(sba_trace* trace);

/* Model-comparison criteria from a stored log-likelihood matrix. */
SBA_API sba_status sba_loglik_read(const char* path, sba_loglik** out);
SBA_API sba_status sba_loglik_waic(const sba_loglik* ll, double* waic, double* lppd, double* p_waic);
SBA_API sba_status sba_loglik_lpml(const sba_loglik* ll, double* lpml);
SBA_API sba_status sba_loglik_write_report(const sba_loglik* ll, const char* path);
SBA_API void sba_loglik_free(sba_loglik* ll);

#ifdef __cplusplus
}
#endif

#endif /* SBA_SBA_H */
