/* Exercises the C interface from plain C. */
#include <math.h>
#include <stdio.h>
#include <stdlib.h>
#include <string.h>

#include "spgs/spgs.h"

static int failures = 0;

#define EXPECT(cond)                                                        \
    do {                                                                    \
        if (!(cond)) {                                                      \
            fprintf(stderr, "%s:%d: expected %s\n", __FILE__, __LINE__, #cond); \
            ++failures;                                                     \
        }                                                                   \
    } while (0)

int main(void) {
    EXPECT(strcmp(spgs_version(), "1.0.0") == 0);

    spgs_config* cfg = NULL;
    EXPECT(spgs_config_parse("[grid]\nn = abc\n", 0, &cfg) == SPGS_ERR_CONFIG);
    EXPECT(cfg == NULL);
    EXPECT(strstr(spgs_last_error(), "line 2") != NULL);
    EXPECT(strcmp(spgs_last_error_kind(), "config_error") == 0);

    EXPECT(spgs_config_parse("[grid]\nn = 1500\n", 0, &cfg) == SPGS_OK);
    EXPECT(spgs_config_set(cfg, "nonlinearity", "q", "6") == SPGS_ERR_CONFIG);
    EXPECT(spgs_config_set(cfg, "grid", "n", "3000") == SPGS_OK);
    char* text = NULL;
    EXPECT(spgs_config_render(cfg, &text) == SPGS_OK);
    EXPECT(text && strstr(text, "n = 3000") != NULL);
    spgs_string_free(text);

    EXPECT(spgs_subcommand_count() == 6);
    EXPECT(spgs_subcommand_name(100) == NULL);
    EXPECT(strncmp(spgs_branch_csv_header(), "lambda,gamma_energy,", 20) == 0);

    spgs_run_options opts;
    memset(&opts, 0, sizeof opts);
    opts.has_lambda = 1;
    opts.lambda = -0.1;
    spgs_result* res = NULL;
    EXPECT(spgs_run(cfg, "solve", &opts, &res) == SPGS_ERR_CONFIG);
    EXPECT(res != NULL && spgs_result_exit_code(res) == SPGS_ERR_CONFIG);
    EXPECT(strstr(spgs_result_summary(res), "\"error\"") != NULL);
    spgs_result_free(res);

    res = NULL;
    EXPECT(spgs_run(cfg, "poisson-test", NULL, &res) == SPGS_OK);
    EXPECT(spgs_result_artifact_count(res) >= 1);
    EXPECT(strcmp(spgs_result_artifact_name(res, 0), "poisson.csv") == 0);
    EXPECT(spgs_result_artifact_name(res, 99) == NULL);
    spgs_result_free(res);
    EXPECT(spgs_run(NULL, "verify", NULL, &res) == SPGS_ERR_CONFIG);
    spgs_config_free(cfg);

    spgs_grid* grid = NULL;
    EXPECT(spgs_grid_create(30.0, 8, &grid) == SPGS_ERR_CONFIG);
    EXPECT(spgs_grid_create(30.0, 3000, &grid) == SPGS_OK);
    EXPECT(spgs_grid_size(grid) == 3000);
    double* r = malloc(3000 * sizeof *r);
    EXPECT(spgs_grid_nodes(grid, r, 10) == SPGS_ERR_CONFIG);
    EXPECT(spgs_grid_nodes(grid, r, 3000) == SPGS_OK);
    EXPECT(r[0] == 0.0 && r[2999] == 30.0);

    spgs_nonlinearity* nl = NULL;
    EXPECT(spgs_nonlinearity_canonical(1.0, 6.5, 0.0, &nl) == SPGS_ERR_CONFIG);
    EXPECT(spgs_nonlinearity_canonical(1.0, 4.0, 0.0, &nl) == SPGS_OK);
    double f = 0.0, F = 0.0;
    EXPECT(spgs_nonlinearity_eval(nl, 2.0, &f, &F) == SPGS_OK);
    EXPECT(fabs(f - 8.0) < 1e-14 && fabs(F - 4.0) < 1e-14);

    spgs_ground_state* gs = NULL;
    EXPECT(spgs_ground_state_solve(nl, grid, &gs) == SPGS_OK);
    double M = 0.0, p = 0.0, b = 0.0;
    EXPECT(spgs_ground_state_levels(gs, &M, &p, &b) == SPGS_OK);
    EXPECT(fabs(p - 2.0 * sqrt(3.0) / 9.0 * pow(M, 1.5)) <= 1e-6 * p);
    EXPECT(fabs(b / p - 1.0) <= 1e-4);
    EXPECT(spgs_ground_state_omega(gs, r, 3000) == SPGS_OK);
    EXPECT(r[0] > 4.3 && r[0] < 4.4);
    double gamma = 0.0, dist = 0.0, resid = 1.0;
    EXPECT(spgs_ground_state_solve_lambda(gs, 0.05, &gamma, &dist, &resid) == SPGS_OK);
    EXPECT(gamma > b && dist > 0.0 && resid <= 1e-8);
    EXPECT(spgs_ground_state_solve_lambda(gs, -1.0, NULL, NULL, NULL) == SPGS_ERR_CONFIG);

    free(r);
    spgs_ground_state_free(gs);
    spgs_nonlinearity_free(nl);
    spgs_grid_free(grid);

    if (failures) fprintf(stderr, "%d failures\n", failures);
    else printf("all C API checks passed\n");
    return failures ? 1 : 0;
}
