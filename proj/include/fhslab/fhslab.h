#ifndef FHSLAB_FHSLAB_H
#define FHSLAB_FHSLAB_H

#include <stddef.h>
#include <stdint.h>

#if defined(FHSLAB_BUILDING)
#define FHS_API __attribute__((visibility("default")))
#else
#define FHS_API
#endif

#ifdef __cplusplus
extern "C" {
#endif

typedef enum fhs_status {
  FHS_OK = 0,
  FHS_INVALID_ARGUMENT = 1,
  FHS_NON_INTEGRABLE_WEIGHT = 2,
  FHS_INVALID_DATA = 3,
  FHS_SOLVER_FAILURE = 4,
  FHS_NUMERICAL_INSTABILITY = 5,
  FHS_CONSISTENCY_FAILURE = 6,
  FHS_DEGENERATE_INPUT = 7,
  FHS_DEGENERATE_CONFIGURATION = 8,
  FHS_INSUFFICIENT_DATA = 9,
  FHS_IO_ERROR = 10,
  FHS_CONFIG_ERROR = 11,
  FHS_BUFFER_TOO_SMALL = 50,
  FHS_INTERNAL = 99
} fhs_status;

typedef struct fhs_params fhs_params;
typedef struct fhs_grid fhs_grid;
typedef struct fhs_bubble fhs_bubble;
typedef struct fhs_spectrum fhs_spectrum;
typedef struct fhs_config fhs_config;
typedef struct fhs_run fhs_run;

FHS_API const char* fhs_version(void);
FHS_API const char* fhs_status_name(fhs_status status);
/* Message of the last failed call on this thread; "" after a success. */
FHS_API const char* fhs_last_error(void);
FHS_API fhs_status fhs_last_status(void);

/* Array getters copy up to cap values and store the full length in *len.
   FHS_BUFFER_TOO_SMALL is returned when cap < *len; out may be NULL then. */

FHS_API fhs_status fhs_params_new(int N, double s, double t, fhs_params** out);
FHS_API void fhs_params_free(fhs_params* params);
FHS_API fhs_status fhs_params_exponents(const fhs_params* params, double* crit, double* p, double* q);

FHS_API fhs_status fhs_grid_new(double r_min, double r_max, size_t n, fhs_grid** out);
FHS_API fhs_status fhs_grid_default(fhs_grid** out);
FHS_API void fhs_grid_free(fhs_grid* grid);
FHS_API fhs_status fhs_grid_nodes(const fhs_grid* grid, double* out, size_t cap, size_t* len);

FHS_API fhs_status fhs_bubble_solve(const fhs_params* params, const fhs_grid* grid, double tol,
                                    fhs_bubble** out);
FHS_API fhs_status fhs_bubble_load(const char* path, fhs_bubble** out);
FHS_API fhs_status fhs_bubble_save(const fhs_bubble* bubble, const char* path);
FHS_API void fhs_bubble_free(fhs_bubble* bubble);
FHS_API fhs_status fhs_bubble_info(const fhs_bubble* bubble, double* mu, double* residual,
                                   int* iterations);
FHS_API fhs_status fhs_bubble_values(const fhs_bubble* bubble, double* out, size_t cap, size_t* len);
/* lambda^{(N-2s)/2} V(lambda r) sampled on the bubble's grid */
FHS_API fhs_status fhs_bubble_dilate(const fhs_bubble* bubble, double lambda, double* out, size_t cap,
                                     size_t* len);
/* Gamma(u) for u = sum coeffs[i] V_{scales[i]} */
FHS_API fhs_status fhs_family_deficit(const fhs_bubble* bubble, const double* scales, const double* coeffs,
                                      size_t count, double* gamma);
FHS_API fhs_status fhs_two_bubble_integral(const fhs_bubble* bubble, double lambda_i, double lambda_j,
                                           double alpha, double beta, double* out);

FHS_API fhs_status fhs_spectrum_compute(const fhs_bubble* bubble, int k, double lambda, fhs_spectrum** out);
FHS_API void fhs_spectrum_free(fhs_spectrum* spectrum);
FHS_API fhs_status fhs_spectrum_eigenvalues(const fhs_spectrum* spectrum, double* out, size_t cap,
                                            size_t* len);
FHS_API fhs_status fhs_spectrum_gap_margin(const fhs_spectrum* spectrum, double* margin);

FHS_API fhs_status fhs_cutoff_norm(const fhs_params* params, const fhs_grid* grid, double r, double R,
                                   double* out);

FHS_API fhs_status fhs_config_load(const char* path, fhs_config** out);
FHS_API fhs_status fhs_config_parse(const char* text, const char* source, fhs_config** out);
FHS_API void fhs_config_free(fhs_config* config);
/* Canonical echo; the pointer lives as long as the config. */
FHS_API const char* fhs_config_echo(const fhs_config* config);

/* experiment: NULL or "" uses the config's experiment key.
   seed: negative uses the config's seed. threads: 0 uses the config's value.
   cache_dir: NULL or "" uses FHSLAB_CACHE_DIR, then <out_dir>/cache. */
FHS_API fhs_status fhs_run_experiment(const fhs_config* config, const char* experiment, const char* out_dir,
                                      int64_t seed, int threads, const char* cache_dir, fhs_run** out);
FHS_API void fhs_run_free(fhs_run* run);
FHS_API int fhs_run_cache_hit(const fhs_run* run);
FHS_API double fhs_run_wall_time(const fhs_run* run);
FHS_API size_t fhs_run_output_count(const fhs_run* run);
FHS_API const char* fhs_run_output(const fhs_run* run, size_t i);
FHS_API size_t fhs_run_warning_count(const fhs_run* run);
FHS_API const char* fhs_run_warning(const fhs_run* run, size_t i);

#ifdef __cplusplus
}
#endif

#endif
