/* C interface to the Schrodinger-Poisson ground-state solver. */
#ifndef SPGS_H
#define SPGS_H

#include <stddef.h>

#if defined(_WIN32)
#define SPGS_API __declspec(dllexport)
#else
#define SPGS_API __attribute__((visibility("default")))
#endif

#ifdef __cplusplus
extern "C" {
#endif

/* Status codes double as process exit codes. */
typedef enum spgs_status {
    SPGS_OK = 0,
    SPGS_ERR_CONFIG = 2,       /* config error, precondition or bad argument */
    SPGS_ERR_SOLVER = 3,       /* nonconvergence, bracket or range failure */
    SPGS_ERR_VERIFICATION = 4, /* a verification check failed */
    SPGS_ERR_INTERNAL = 5
} spgs_status;

typedef struct spgs_config spgs_config;
typedef struct spgs_result spgs_result;
typedef struct spgs_grid spgs_grid;
typedef struct spgs_nonlinearity spgs_nonlinearity;
typedef struct spgs_ground_state spgs_ground_state;

SPGS_API const char* spgs_version(void);

/* Message and kind (e.g. "config_error", "stagnation") of the last failure on
 * this thread. Valid until the next failing call on the same thread. */
SPGS_API const char* spgs_last_error(void);
SPGS_API const char* spgs_last_error_kind(void);

/* ---- configuration ---- */

SPGS_API int spgs_config_default(spgs_config** out);
/* Parses `[section] key = value` text; apply_env != 0 then applies SPGS_* variables. */
SPGS_API int spgs_config_parse(const char* text, int apply_env, spgs_config** out);
SPGS_API int spgs_config_set(spgs_config* cfg, const char* section, const char* key, const char* value);
/* *out must be released with spgs_string_free. */
SPGS_API int spgs_config_render(const spgs_config* cfg, char** out);
SPGS_API const char* spgs_config_output_directory(const spgs_config* cfg);
SPGS_API void spgs_config_free(spgs_config* cfg);
SPGS_API void spgs_string_free(char* s);

/* ---- subcommands ---- */

typedef struct spgs_run_options {
    int has_lambda;        /* solve: lambda is used when nonzero */
    double lambda;
    const double* q_list;  /* constants: NULL keeps the default list */
    size_t q_count;
    int grid_study;        /* rerun at n/2, n, 2n and append observed orders */
} spgs_run_options;

SPGS_API size_t spgs_subcommand_count(void);
SPGS_API const char* spgs_subcommand_name(size_t i);
SPGS_API const char* spgs_branch_csv_header(void);

/* Runs one subcommand. Returns its exit code; *out receives the result (also on
 * failure, carrying a JSON failure list) unless the arguments themselves are invalid. */
SPGS_API int spgs_run(const spgs_config* cfg, const char* subcommand, const spgs_run_options* opts,
                      spgs_result** out);
SPGS_API int spgs_result_exit_code(const spgs_result* res);
SPGS_API const char* spgs_result_summary(const spgs_result* res);
SPGS_API size_t spgs_result_artifact_count(const spgs_result* res);
SPGS_API const char* spgs_result_artifact_name(const spgs_result* res, size_t i);
SPGS_API const char* spgs_result_artifact_content(const spgs_result* res, size_t i);
SPGS_API void spgs_result_free(spgs_result* res);

/* ---- direct numerics ---- */

SPGS_API int spgs_grid_create(double R, int n, spgs_grid** out);
SPGS_API int spgs_grid_size(const spgs_grid* grid);
SPGS_API int spgs_grid_nodes(const spgs_grid* grid, double* r, size_t len);
SPGS_API void spgs_grid_free(spgs_grid* grid);

/* f(s) = cw s_+^5 + mu s_+^(q-1). */
SPGS_API int spgs_nonlinearity_canonical(double mu, double q, double critical_weight, spgs_nonlinearity** out);
SPGS_API int spgs_nonlinearity_eval(const spgs_nonlinearity* nl, double s, double* f, double* F);
SPGS_API double spgs_nonlinearity_kappa(const spgs_nonlinearity* nl);
SPGS_API void spgs_nonlinearity_free(spgs_nonlinearity* nl);

/* Ground state of the limit problem by the constrained flow. */
SPGS_API int spgs_ground_state_solve(const spgs_nonlinearity* nl, const spgs_grid* grid, spgs_ground_state** out);
SPGS_API int spgs_ground_state_levels(const spgs_ground_state* gs, double* M, double* p, double* b);
/* Copies omega into values[0..len); len must equal the grid size. */
SPGS_API int spgs_ground_state_omega(const spgs_ground_state* gs, double* values, size_t len);
/* Solution at lambda warm-started from omega; any output pointer may be NULL. */
SPGS_API int spgs_ground_state_solve_lambda(const spgs_ground_state* gs, double lambda, double* gamma_energy,
                                            double* h1_dist_to_omega, double* grad_residual_norm);
SPGS_API void spgs_ground_state_free(spgs_ground_state* gs);

#ifdef __cplusplus
}
#endif

#endif
