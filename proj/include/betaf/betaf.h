/* C interface to the beta-F distribution library and grouped-data fitter. */
#ifndef BETAF_BETAF_H
#define BETAF_BETAF_H

#include <stddef.h>
#include <stdint.h>

#if defined(BETAF_BUILDING_LIBRARY)
#define BETAF_API __attribute__((visibility("default")))
#else
#define BETAF_API
#endif

#ifdef __cplusplus
extern "C" {
#endif

typedef enum betaf_status {
    BETAF_OK = 0,
    BETAF_ERR_DOMAIN = 1,
    BETAF_ERR_NUMERIC = 2,
    BETAF_ERR_NONEXISTENCE = 3,
    BETAF_ERR_PARSE = 4,
    BETAF_ERR_SCHEMA = 5,
    BETAF_ERR_IO = 6,
    BETAF_ERR_FIT = 7,
    BETAF_ERR_METRIC = 8,
    BETAF_ERR_NULL = 9,
    BETAF_ERR_INTERNAL = 10
} betaf_status;

/* Kernel families in table order. */
typedef enum betaf_family {
    BETAF_GB1 = 0,
    BETAF_GB2 = 1,
    BETAF_BN = 2,
    BETAF_SKEWT = 3,
    BETAF_LOGF = 4,
    BETAF_BE = 5,
    BETAF_BW = 6
} betaf_family;

#define BETAF_FAMILY_COUNT 7
#define BETAF_MAX_PARAMS 4

typedef enum betaf_hessian_mode {
    BETAF_HESSIAN_BFGS = 0,
    BETAF_HESSIAN_FINITE_DIFFERENCE = 1
} betaf_hessian_mode;

typedef struct betaf_dist betaf_dist;
typedef struct betaf_sample betaf_sample;
typedef struct betaf_report betaf_report;

/* Message of the last failed call on this thread ("" if none). */
BETAF_API const char* betaf_last_error(void);
BETAF_API const char* betaf_status_name(betaf_status status);

/* Short names: gb1, gb2, bn, skewt, logf, be, bw. */
BETAF_API const char* betaf_family_name(betaf_family family);
BETAF_API betaf_status betaf_family_parse(const char* name, betaf_family* out);
/* Number of parameters (alpha, beta, theta_F...) of a family. */
BETAF_API size_t betaf_family_param_count(betaf_family family);

/* Distributions. params = (alpha, beta, theta_F...). */
BETAF_API betaf_status betaf_dist_create(betaf_family family, const double* params, size_t n_params,
                                         betaf_dist** out);
BETAF_API void betaf_dist_free(betaf_dist* d);
BETAF_API betaf_status betaf_dist_pdf(const betaf_dist* d, double x, double* out);
BETAF_API betaf_status betaf_dist_cdf(const betaf_dist* d, double x, double* out);
BETAF_API betaf_status betaf_dist_quantile(const betaf_dist* d, double p, double* out);
/* Closed-form or series mean when the family has one, else quadrature.
   *exists is 0 when the mean is infinite. */
BETAF_API betaf_status betaf_dist_mean(const betaf_dist* d, double* out, int* exists);
BETAF_API betaf_status betaf_dist_moment(const betaf_dist* d, int n, double rel_tol, double* out);
BETAF_API betaf_status betaf_dist_sample(const betaf_dist* d, size_t n, uint64_t seed, double* out);
/* CSV x,pdf,cdf on start, start + step, ... <= stop. path "-" is stdout. */
BETAF_API betaf_status betaf_dist_write_density(const betaf_dist* d, double start, double stop, double step,
                                                const char* path);

/* Grouped samples. Edges and means are in currency units and are divided by
   unit_scale; group_means may be NULL. */
BETAF_API betaf_status betaf_sample_create(const double* edges, size_t n_edges, const uint64_t* counts,
                                           const double* group_means, double unit_scale, betaf_sample** out);
BETAF_API betaf_status betaf_sample_read_csv(const char* path, double unit_scale, betaf_sample** out);
BETAF_API betaf_status betaf_sample_parse_csv(const char* text, double unit_scale, betaf_sample** out);
/* Draws n values from d and bins them; edges are in model units, and an
   open last bin is added when the last edge is finite. */
BETAF_API betaf_status betaf_sample_simulate(const betaf_dist* d, size_t n, const double* edges, size_t n_edges,
                                             uint64_t seed, double unit_scale, betaf_sample** out);
BETAF_API betaf_status betaf_sample_write_csv(const betaf_sample* s, const char* path);
BETAF_API void betaf_sample_free(betaf_sample* s);
BETAF_API size_t betaf_sample_cells(const betaf_sample* s);
BETAF_API uint64_t betaf_sample_total(const betaf_sample* s);
BETAF_API betaf_status betaf_sample_loglik(const betaf_sample* s, const betaf_dist* d, double* out);
/* out must hold betaf_sample_cells(s) values. */
BETAF_API betaf_status betaf_sample_cell_probs(const betaf_sample* s, const betaf_dist* d, double* out);

/* Fitting. */
typedef struct betaf_config {
    double grad_tol;
    double step_tol;
    int max_iter;
    betaf_hessian_mode hessian_mode;
    double coordinate_cap;
    double quad_tol;
    /* Optional user starts, n_starts rows of betaf_family_param_count values.
       Only allowed when fitting a single family. */
    const double* starts;
    size_t n_starts;
} betaf_config;

BETAF_API void betaf_config_default(betaf_config* cfg);

/* Fits each family (concurrently when more than one). A family whose fit
   fails outright is recorded in the report with ok = 0. */
BETAF_API betaf_status betaf_fit(const betaf_sample* s, const betaf_family* families, size_t n_families,
                                 const betaf_config* cfg, betaf_report** out);
BETAF_API void betaf_report_free(betaf_report* r);

typedef struct betaf_fit_summary {
    betaf_family family;
    int ok;
    int converged;
    int cap_hit;
    int iterations;
    size_t start_index;
    size_t n_params;
    double params[BETAF_MAX_PARAMS];
    double loglik;
    double grad_norm;
    double sse;
    double sae;
    double chi_square;
    int has_est_mean;
    double est_mean;
    const char* message; /* owned by the report */
} betaf_fit_summary;

BETAF_API size_t betaf_report_count(const betaf_report* r);
BETAF_API int betaf_report_all_converged(const betaf_report* r);
/* Entries are ordered by family. */
BETAF_API betaf_status betaf_report_entry(const betaf_report* r, size_t i, betaf_fit_summary* out);
/* Strings owned by the report, valid until betaf_report_free. */
BETAF_API const char* betaf_report_json(const betaf_report* r);
BETAF_API const char* betaf_report_table(const betaf_report* r);
BETAF_API betaf_status betaf_report_write_json(const betaf_report* r, const char* path);
BETAF_API betaf_status betaf_report_write_table(const betaf_report* r, const char* path);

#ifdef __cplusplus
}
#endif

#endif
