/*
 Copyright 2026 The mtsc Authors

 Licensed under the Apache License, Version 2.0 (the "License");
 you may not use this file except in compliance with the License.
 You may obtain a copy of the License at

      https://www.apache.org/licenses/LICENSE-2.0

 Unless required by applicable law or agreed to in writing, software
 distributed under the License is distributed on an "AS IS" BASIS,
 WITHOUT WARRANTIES OR CONDITIONS OF ANY KIND, either express or implied.
 See the License for the specific language governing permissions and
 limitations under the License.
*/
#ifndef MTSC_C_API_H
#define MTSC_C_API_H

#include <stddef.h>
#include <stdint.h>

#if defined(MTSC_BUILDING_LIBRARY)
#define MTSC_API __attribute__((visibility("default")))
#else
#define MTSC_API
#endif

#ifdef __cplusplus
extern "C" {
#endif

typedef enum mtsc_status {
    MTSC_OK = 0,
    MTSC_E_SINGULAR_BF,
    MTSC_E_BAD_DIMENSIONS,
    MTSC_E_INCONSISTENT_TRAJECTORY,
    MTSC_E_LENGTH_MISMATCH,
    MTSC_E_UNSUPPORTED_NORM_PAIR,
    MTSC_E_UNBOUNDED,
    MTSC_E_MAX_ITERATIONS,
    MTSC_E_BAD_BRACKET,
    MTSC_E_BOUND_VIOLATED,
    MTSC_E_CHECK_FAILED,
    MTSC_E_DEGENERATE_OPT,
    MTSC_E_PARSE,
    MTSC_E_VALIDATION,
    MTSC_E_IO,
    MTSC_E_INVALID_ARGUMENT,
    MTSC_E_INTERNAL
} mtsc_status;

typedef enum mtsc_norm { MTSC_NORM_L1 = 1, MTSC_NORM_L2 = 2, MTSC_NORM_LINF = 3 } mtsc_norm;

typedef enum mtsc_controller {
    MTSC_CONTROLLER_MRPC = 0,
    MTSC_CONTROLLER_OFFLINE_OPT,
    MTSC_CONTROLLER_ZERO_SLOW
} mtsc_controller;

/* Receives text output; NULL sinks write to stdout. */
typedef void (*mtsc_write_fn)(const char* text, size_t length, void* user);

typedef struct mtsc_scenario mtsc_scenario;
typedef struct mtsc_system mtsc_system;

typedef struct mtsc_run_options {
    const char* out_dir;   /* NULL keeps the scenario's output_dir */
    int64_t seed_offset;
    double tol;            /* <= 0 keeps the scenario's tol */
    int dump_trajectories;
    int jobs;              /* 0 = hardware concurrency */
    int corrupt_mrpc;
    int quiet;
} mtsc_run_options;

typedef struct mtsc_run_summary {
    int rows;
    int failed_rows;
    char csv_path[4096];
} mtsc_run_summary;

MTSC_API const char* mtsc_version(void);
MTSC_API const char* mtsc_status_name(mtsc_status status);
/* Message of the last failure on the calling thread. Never NULL. */
MTSC_API const char* mtsc_last_error(void);

MTSC_API void mtsc_run_options_init(mtsc_run_options* options);

MTSC_API mtsc_status mtsc_scenario_load(const char* path, mtsc_scenario** out);
MTSC_API mtsc_status mtsc_scenario_parse(const char* text, mtsc_scenario** out);
MTSC_API void mtsc_scenario_free(mtsc_scenario* scenario);
MTSC_API const char* mtsc_scenario_name(const mtsc_scenario* scenario);
MTSC_API mtsc_status mtsc_scenario_has_sweep(const mtsc_scenario* scenario, int* out);
/* Number of (sweep point, seed) tasks. */
MTSC_API mtsc_status mtsc_scenario_task_count(const mtsc_scenario* scenario, int* out);

MTSC_API mtsc_status mtsc_scenario_run(const mtsc_scenario* scenario, const mtsc_run_options* options,
                                       mtsc_write_fn log, void* user, mtsc_run_summary* summary);

/* scenario may be NULL for the built-in corpus; *passed is 1 iff no check was violated. */
MTSC_API mtsc_status mtsc_validate(const mtsc_scenario* scenario, const mtsc_run_options* options,
                                   mtsc_write_fn out, void* user, int* passed);

MTSC_API mtsc_status mtsc_show(const char* csv_path, mtsc_write_fn out, void* user);

/* Matrices are row-major n x n. */
MTSC_API mtsc_status mtsc_system_create(int n, int T, int k, const double* A, const double* Bf, const double* Bs,
                                        mtsc_system** out);
MTSC_API void mtsc_system_free(mtsc_system* system);
MTSC_API mtsc_status mtsc_system_set_norm_costs(mtsc_system* system, mtsc_norm px, double wx, mtsc_norm pf, double wf,
                                                mtsc_norm ps, double ws);
/* w and w_hat are T x n row-major; w_hat may be NULL for perfect predictions.
   states, when not NULL, receives x_1..x_T as T x n row-major. */
MTSC_API mtsc_status mtsc_system_run(const mtsc_system* system, mtsc_controller controller, const double* w,
                                     const double* w_hat, double tol, double* total_cost, double* states);

MTSC_API mtsc_status mtsc_induced_norm(const double* M, int rows, int cols, mtsc_norm p, double* out);
MTSC_API mtsc_status mtsc_norm_equivalence_constant(mtsc_norm px, mtsc_norm pf, int n, double* out);

#ifdef __cplusplus
}
#endif

#endif
