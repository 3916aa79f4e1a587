#ifndef RIGIDLID_H
#define RIGIDLID_H

#include <stddef.h>
#include <stdint.h>

#if defined(RIGIDLID_BUILDING)
#define RL_API __attribute__((visibility("default")))
#else
#define RL_API
#endif

#ifdef __cplusplus
extern "C" {
#endif

typedef enum rl_status {
  RL_OK = 0,
  RL_ERR_INVALID_ARGUMENT = 1,
  RL_ERR_SHAPE_MISMATCH = 2,
  RL_ERR_NON_FINITE = 3,
  RL_ERR_INADMISSIBLE = 4,
  RL_ERR_DEGENERATE = 5,
  RL_ERR_DEPTH_FLOOR = 6,
  RL_ERR_BOUNDARY = 7,
  RL_ERR_NON_CONVERGENCE = 8,
  RL_ERR_RESOLUTION = 9,
  RL_ERR_CONFIG = 10,
  RL_ERR_IO = 11,
  RL_ERR_UNKNOWN_TAG = 12,
  RL_ERR_INTERNAL = 99
} rl_status;

typedef struct rl_config rl_config;          /* single simulation */
typedef struct rl_trajectory rl_trajectory;
typedef struct rl_suite rl_suite;            /* resolved rate suite */
typedef struct rl_sweep rl_sweep;            /* raw table plus fitted report */
typedef struct rl_probe rl_probe;            /* kernel decay probe result */

/* Message of the last failed call on this thread; "" if none. */
RL_API const char* rl_last_error(void);
RL_API const char* rl_status_string(rl_status s);
RL_API const char* rl_version(void);
/* Strings returned through char** are owned by the caller. */
RL_API void rl_string_free(char* s);

/* ---- simulation ---- */
RL_API rl_status rl_config_from_file(const char* path, rl_config** out);
RL_API rl_status rl_config_from_string(const char* json_text, rl_config** out);
RL_API rl_status rl_config_set_seed(rl_config* cfg, uint64_t seed);
RL_API rl_status rl_config_to_json(const rl_config* cfg, char** out);
RL_API void rl_config_free(rl_config* cfg);

RL_API rl_status rl_simulate(const rl_config* cfg, rl_trajectory** out);
RL_API rl_status rl_trajectory_shape(const rl_trajectory* tr, int* dim, int* n, size_t* snapshots);
/* times has room for `snapshots` values */
RL_API rl_status rl_trajectory_times(const rl_trajectory* tr, double* times);
/* Physical values of component c (0 = zeta, 1.. = V) of snapshot s; buf has n^dim values. */
RL_API rl_status rl_trajectory_field(const rl_trajectory* tr, size_t s, int c, double* buf);
RL_API rl_status rl_trajectory_mass_drift(const rl_trajectory* tr, double* drift);
/* trajectory.hdr, trajectory.bin and diagnostics.csv */
RL_API rl_status rl_trajectory_write(const rl_trajectory* tr, const char* dir);
RL_API void rl_trajectory_free(rl_trajectory* tr);

/* ---- rate suites ---- */
RL_API size_t rl_theorem_tag_count(void);
RL_API const char* rl_theorem_tag(size_t i);
/* preset_dir and overrides_json may be NULL; overrides is a JSON merge patch. */
RL_API rl_status rl_suite_load(const char* tag, int smoke, const char* preset_dir,
                               const char* overrides_json, rl_suite** out);
RL_API rl_status rl_suite_set_seed(rl_suite* suite, uint64_t seed);
RL_API rl_status rl_suite_to_json(const rl_suite* suite, char** out);
RL_API rl_status rl_suite_tag(const rl_suite* suite, char** out);
RL_API void rl_suite_free(rl_suite* suite);

/* verbose: progress lines on stderr */
RL_API rl_status rl_suite_run(const rl_suite* suite, int jobs, int verbose, rl_sweep** out);

typedef struct rl_fit_info {
  char key[128];
  double mu;
  double slope, intercept, residual;
  double target;
  int fitted;
  char verdict[8]; /* pass, fail, flag, none */
} rl_fit_info;

RL_API rl_status rl_sweep_summary(const rl_sweep* sw, int* all_pass, int* failed_cells,
                                  size_t* n_fits);
RL_API rl_status rl_sweep_fit(const rl_sweep* sw, size_t i, rl_fit_info* out);
RL_API rl_status rl_sweep_uniformity(const rl_sweep* sw, size_t i, char* key, size_t key_len,
                                     double* variation, int* pass, size_t* count);
/* raw.csv, spec.json, report.json, plots/ */
RL_API rl_status rl_sweep_render(const rl_sweep* sw, const char* dir);
RL_API void rl_sweep_free(rl_sweep* sw);

/* Re-fits raw.csv against spec.json in dir and rewrites report.json and plots. */
RL_API rl_status rl_report_rerender(const char* dir, int* all_pass, int* failed_cells);

/* ---- phase ---- */
typedef struct rl_phase_info {
  int sum_zero;
  double ell;
  int alpha;
  int m_max;
  int p, p0;
  double sigma;
  int gp_positive;
  int alpha_excluded;
  size_t n_zeros;
} rl_phase_info;

RL_API rl_status rl_phase_classify(double a, double b, double c, double d, rl_phase_info* out);
/* Location and multiplicity of the i-th zero of g''. */
RL_API rl_status rl_phase_zero(double a, double b, double c, double d, size_t i, double* r,
                               int* multiplicity);
/* g, g', g'', g''' at r */
RL_API rl_status rl_phase_derivatives(double a, double b, double c, double d, double r,
                                      double out[4]);

typedef enum rl_band { RL_BAND_LOW = 0, RL_BAND_HIGH, RL_BAND_DYADIC, RL_BAND_FULL } rl_band;
typedef enum rl_weight { RL_WEIGHT_POWER = 0, RL_WEIGHT_BESSEL } rl_weight;

typedef struct rl_probe_spec {
  double a, b, c, d;
  int wave; /* nonzero: g(r) = r */
  double mu;
  rl_band band;
  int dyadic_j;
  rl_weight weight;
  double s;
  double bessel_beta;
  const double* times; /* NULL: band defaults */
  size_t n_times;
  int n;          /* 0: automatic */
  double length;  /* 0: automatic */
} rl_probe_spec;

RL_API void rl_probe_spec_init(rl_probe_spec* spec);
RL_API rl_status rl_kernel_probe(const rl_probe_spec* spec, rl_probe** out);
RL_API rl_status rl_probe_result(const rl_probe* pr, double* theta, double* theta_lo,
                                 double* theta_hi, double* predicted, int* skipped);
RL_API size_t rl_probe_count(const rl_probe* pr);
RL_API rl_status rl_probe_point(const rl_probe* pr, size_t i, double* t, double* sup);
RL_API const char* rl_probe_note(const rl_probe* pr);
RL_API void rl_probe_free(rl_probe* pr);

#ifdef __cplusplus
}
#endif

#endif
