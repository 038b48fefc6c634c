/* C interface to the distributional synthetic controls library.
 *
 * All functions return a status code (dsc_status); 0 means success. On
 * failure, dsc_last_error() describes what went wrong in the calling thread.
 * Output strings are heap-allocated and must be released with
 * dsc_string_free(); panels with dsc_panel_free().
 */
#ifndef DSC_DSC_H
#define DSC_DSC_H

#include <stdint.h>

#ifdef __cplusplus
extern "C" {
#endif

typedef enum dsc_status {
    DSC_OK = 0,
    DSC_ERR_USAGE = 1,      /* bad arguments or configuration */
    DSC_ERR_DATA = 2,       /* unusable input data */
    DSC_ERR_ESTIMATION = 3, /* a solve or resampling step failed */
    DSC_ERR_INTERNAL = 4    /* invariant violation; please report */
} dsc_status;

typedef struct dsc_panel dsc_panel;

const char* dsc_version(void);

/* Message from the most recent failing call in this thread. */
const char* dsc_last_error(void);

void dsc_string_free(char* s);
void dsc_panel_free(dsc_panel* panel);

/* Long-format CSV with one observation per row. Column names may be NULL for
 * the defaults "unit", "period", "outcome". */
dsc_status dsc_panel_parse_csv(const char* csv, const char* unit_col, const char* period_col,
                               const char* outcome_col, dsc_panel** out);

/* Employment-spell CSV to a quarterly panel. outcome is "tenure" or "title";
 * boundaries are n_boundaries ISO dates marking n_boundaries - 1 consecutive
 * quarters. excluded_tally (nullable) receives the count of spells starting
 * after their quarter. */
dsc_status dsc_panel_from_spells_csv(const char* csv, const char* outcome,
                                     const char* const* boundaries, int n_boundaries,
                                     dsc_panel** out, long* excluded_tally);

dsc_status dsc_panel_to_csv(const dsc_panel* panel, char** out_csv);
dsc_status dsc_panel_summary_json(const dsc_panel* panel, char** out_json);

/* Keeps the treated unit plus donors with at least min_share of its
 * observation count. dropped_json (nullable) receives the dropped names. */
dsc_status dsc_panel_filter_donors(const dsc_panel* panel, const char* treated, double min_share,
                                   dsc_panel** out, char** dropped_json);

typedef struct dsc_fit_options {
    const char* treated;
    const char* const* donors;
    int n_donors;
    int t_star;  /* pre-periods are 1..t_star */
    int t_total; /* 0 = use every period in the panel */
    const char* outcome; /* "continuous", "ordinal", or "share" */
    int grid_size;
    double q_min;
    double q_max;
    int max_iterations;
    double tolerance;
    int threads; /* 0 = all available */
} dsc_fit_options;

void dsc_fit_options_init(dsc_fit_options* opt);

/* Full fit; out_json carries weights, counterfactuals, effects, diagnostics. */
dsc_status dsc_fit(const dsc_panel* panel, const dsc_fit_options* opt, char** out_json);

/* Gram conditioning report per pre-period. */
dsc_status dsc_gram_diagnostic(const dsc_panel* panel, const dsc_fit_options* opt,
                               char** out_json);

typedef struct dsc_permute_options {
    /* Distance restriction: quantile fractions for continuous outcomes,
     * outcome units for ordinal/share. range_set = 0 uses the fit's q-range
     * (continuous) or the full support. */
    double range_min;
    double range_max;
    int range_set;
    int include_treated_in_placebo_pools;
} dsc_permute_options;

void dsc_permute_options_init(dsc_permute_options* opt);

dsc_status dsc_permutation_test(const dsc_panel* panel, const dsc_fit_options* opt,
                                const dsc_permute_options* popt, char** out_json);

typedef struct dsc_bootstrap_options {
    int draws;
    double alpha;
    uint64_t seed;
    const char* mode;  /* "with-replacement" or "paper-literal" */
    const char* bands; /* "uniform" or "pointwise" */
    int resample_treated;
} dsc_bootstrap_options;

void dsc_bootstrap_options_init(dsc_bootstrap_options* opt);

dsc_status dsc_bootstrap(const dsc_panel* panel, const dsc_fit_options* opt,
                         const dsc_bootstrap_options* bopt, char** out_json);

/* Simulation scenarios. dsc_simspec_preset returns the JSON spec of a named
 * scenario ("null-dgp", "top-quantile-shift", "ordinal-mass-shift");
 * dsc_simulate draws the panel and the population truth from a spec. */
dsc_status dsc_simspec_preset(const char* name, char** out_json);
dsc_status dsc_simulate(const char* simspec_json, int threads, dsc_panel** out_panel,
                        char** out_truth_json);

#ifdef __cplusplus
}
#endif

#endif
